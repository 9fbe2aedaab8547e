#include "doctest.h"
#include "garrote/glm.hpp"
#include "garrote/tuning.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace garrote;

TEST_SUITE("tuning") {

TEST_CASE("AUC equals the pair-count concordance") {
    std::mt19937_64 rng(2);
    std::normal_distribution<double> z(0.0, 1.0);
    std::uniform_int_distribution<int> coin(0, 1), level(0, 4);
    for (int rep = 0; rep < 20; ++rep) {
        Vector y(40), s(40);
        for (Index i = 0; i < 40; ++i) {
            y[i] = coin(rng);
            s[i] = rep % 2 ? z(rng) : static_cast<double>(level(rng));  // odd reps have heavy ties
        }
        y[0] = 0.0;
        y[1] = 1.0;
        const double a = auc(y, s);
        CHECK(a == doctest::Approx(oracles::pair_count_auc(y, s)).epsilon(1e-12));
        // invariant under strictly increasing transforms
        CHECK(auc(y, s.array().exp().matrix()) == doctest::Approx(a).epsilon(1e-12));
        CHECK(auc(y, -s) == doctest::Approx(1.0 - a).epsilon(1e-12));
    }
    Vector y(4), s(4);
    y << 0, 0, 1, 1;
    s << 0.1, 0.2, 0.3, 0.4;
    CHECK(auc(y, s) == 1.0);
    CHECK(auc(y, Vector::Constant(4, 2.0)) == 0.5);
    CHECK_THROWS_AS(auc(Vector::Zero(3), Vector::Zero(3)), UsageError);
}

TEST_CASE("choose_indices and the one-SE rule") {
    CVResult r;
    r.mean_loss = {5.0, 3.0, 2.2, 2.0, 2.1};
    r.se_loss = {0.1, 0.1, 0.1, 0.3, 0.1};
    choose_indices(r);
    CHECK(r.idx_opt == 3);
    CHECK(r.idx_1se == 2);

    // the one-SE search stays inside the block holding the minimum
    r.mean_loss = {2.05, 4.0, 3.0, 2.0};
    r.se_loss = {0.1, 0.1, 0.1, 0.1};
    choose_indices(r, {0, 2});
    CHECK(r.idx_opt == 3);
    CHECK(r.idx_1se == 3);
    choose_indices(r);
    CHECK(r.idx_1se == 0);
}

TEST_CASE("one-SE point is the most penalized point under the threshold") {
    const Dataset d = testing::gaussian_data(80, 15, 7, 2.0);
    const CVResult cv = cv_lasso(d, assign_folds(80, 10, 3), Norm::l1, 50);
    const double threshold = cv.mean_loss[cv.idx_opt] + cv.se_loss[cv.idx_opt];
    CHECK(cv.idx_1se <= cv.idx_opt);
    CHECK(cv.mean_loss[cv.idx_1se] <= threshold);
    for (std::size_t i = 0; i < cv.idx_1se; ++i) CHECK(cv.mean_loss[i] > threshold);
    for (std::size_t i = 0; i < cv.mean_loss.size(); ++i) CHECK(cv.mean_loss[i] >= cv.mean_loss[cv.idx_opt]);
    CHECK(cv.grid[cv.idx_1se].at("lambda") >= cv.grid[cv.idx_opt].at("lambda"));
}

TEST_CASE("leave-one-out CV matches the hat-matrix shortcut") {
    const Dataset d = testing::gaussian_data(25, 3, 4);
    const GridFitter ols = [](const Dataset& train, const Matrix& x_test) {
        const FitResult f = fit_full(train);
        Matrix eta(x_test.rows(), 1);
        eta.col(0) = linear_predictor(x_test, f.coefficients, f.intercept);
        return eta;
    };
    const CVResult cv = cv_tune(d, ols, {TuningPoint{{"k", 3.0}}}, assign_folds(25, 25, 1));
    Matrix a(25, 4);
    a.col(0).setOnes();
    a.rightCols(3) = d.x();
    const Matrix h = a * (a.transpose() * a).inverse() * a.transpose();
    const Vector e = d.y() - h * d.y();
    double press = 0.0;
    for (Index i = 0; i < 25; ++i) press += std::pow(e[i] / (1.0 - h(i, i)), 2);
    CHECK(cv.mean_loss[0] == doctest::Approx(press / 25.0).epsilon(1e-10));
}

TEST_CASE("CV fold losses and standard errors") {
    const Dataset d = testing::gaussian_data(60, 5, 9);
    const CVResult cv = cv_lasso(d, assign_folds(60, 6, 2), Norm::l1, 10);
    CHECK(cv.fold_loss.rows() == 6);
    CHECK(cv.fold_loss.cols() == 10);
    for (Index j = 0; j < 10; ++j) {
        const Vector col = cv.fold_loss.col(j);
        const double m = col.mean();
        const double sd = std::sqrt((col.array() - m).square().sum() / 5.0);
        CHECK(cv.mean_loss[static_cast<std::size_t>(j)] == doctest::Approx(m));
        CHECK(cv.se_loss[static_cast<std::size_t>(j)] == doctest::Approx(sd / std::sqrt(6.0)));
    }
}

TEST_CASE("one-SE fits use no more variables than optimal fits") {
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
        const Dataset d = testing::gaussian_data(70, 12, seed, 2.5);
        const FoldAssignment folds = assign_folds(70, 10, seed);
        for (Method m : {Method::lasso, Method::nng}) {
            MethodSpec spec;
            spec.method = m;
            spec.init = InitKind::ols;
            spec.rule = Rule::opt;
            const SelectorFit opt = tuned_fit(d, spec, folds);
            spec.rule = Rule::one_se;
            const SelectorFit one = tuned_fit(d, spec, folds);
            CHECK(one.selected.size() <= opt.selected.size());
        }
    }
}

TEST_CASE("tuned fits record their tuning and refit identically") {
    const Dataset d = load_prostate(testing::data_dir());
    const FoldAssignment folds = assign_folds(d.n(), 10, 1);
    for (const char* name : {"nng", "alasso", "rlasso", "lasso", "ridge", "subset_cv"}) {
        MethodSpec spec;
        spec.method = method_from_string(name);
        spec.init = InitKind::ridge;
        const SelectorFit f = tuned_fit(d, spec, folds);
        CHECK(f.tuning.size() > 0);
        const SelectorFit again = fit_with_tuning(d, spec, f.tuning);
        CHECK((again.coefficients - f.coefficients).cwiseAbs().maxCoeff() < 1e-9);
    }
    CHECK_THROWS_AS(method_from_string("elastic"), UsageError);
}

TEST_CASE("cached tuning gives the same fits") {
    const Dataset d = load_prostate(testing::data_dir());
    const FoldAssignment folds = assign_folds(d.n(), 10, 5);
    TuningCache cache;
    for (InitKind init : {InitKind::ridge, InitKind::lasso})
        for (Method m : {Method::nng, Method::alasso, Method::lasso}) {
            MethodSpec spec;
            spec.method = m;
            spec.init = init;
            const SelectorFit plain = tuned_fit(d, spec, folds);
            const SelectorFit cached = tuned_fit(d, spec, folds, &cache);
            CHECK((plain.coefficients - cached.coefficients).cwiseAbs().maxCoeff() < 1e-12);
            CHECK(plain.tuning == cached.tuning);
        }
}

TEST_CASE("shared prediction runs equal separate runs and ignore thread count") {
    const Dataset d = testing::gaussian_data(60, 6, 3, 2.0);
    std::vector<MethodSpec> specs(3);
    specs[0].method = Method::lasso;
    specs[1].method = Method::nng;
    specs[1].init = InitKind::lasso;
    specs[2].method = Method::alasso;
    specs[2].init = InitKind::ridge;
    specs[2].rule = Rule::one_se;
    PredictionOptions o;
    o.outer_folds = 5;
    o.inner_folds = 5;
    o.seed = 8;
    const auto together = cv_prediction_errors(d, specs, o);
    o.threads = 4;
    const auto threaded = cv_prediction_errors(d, specs, o);
    o.threads = 1;
    for (std::size_t s = 0; s < specs.size(); ++s) {
        const PredictionReport alone = cv_prediction_error(d, specs[s], o);
        CHECK(alone.value == together[s].value);
        CHECK(alone.avg_vars == together[s].avg_vars);
        CHECK(threaded[s].value == together[s].value);
        CHECK(threaded[s].held_out == together[s].held_out);
        CHECK(together[s].per_fold.size() == 5);
    }
    CHECK(together[1].method == "NNG(L,opt)");
    CHECK(together[2].method == "Alasso(R,1se)");

    o.nested = false;
    const PredictionReport fixed = cv_prediction_error(d, specs[0], o);
    CHECK(std::isfinite(fixed.value));
}

TEST_CASE("binomial prediction reports pooled AUC") {
    const Dataset d = testing::binomial_data(150, 6, 4);
    MethodSpec spec;
    spec.method = Method::lasso;
    PredictionOptions o;
    o.outer_folds = 5;
    o.inner_folds = 5;
    const PredictionReport r = cv_prediction_error(d, spec, o);
    CHECK(r.metric == "auc");
    CHECK(r.value == doctest::Approx(auc(d.y(), r.held_out)));
    CHECK(r.value > 0.6);
}

TEST_CASE("relaxed lasso usually relaxes") {
    int relaxed = 0;
    for (std::uint64_t seed = 1; seed <= 9; ++seed) {
        const Dataset d = testing::gaussian_data(60, 15, seed, 1.5);
        MethodSpec spec;
        spec.method = Method::rlasso;
        spec.n_lambda = 40;
        const SelectorFit f = tuned_fit(d, spec, assign_folds(60, 10, seed));
        if (f.tuning.at("phi") < 1.0) ++relaxed;
    }
    CHECK(relaxed >= 5);
}

}  // TEST_SUITE
