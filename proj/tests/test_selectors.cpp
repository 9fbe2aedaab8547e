#include <algorithm>

#include "doctest.h"
#include "garrote/glm.hpp"
#include "garrote/selectors.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace garrote;

TEST_SUITE("selectors") {

TEST_CASE("garrote on an orthonormal design has the closed form") {
    std::mt19937_64 rng(17);
    for (int rep = 0; rep < 10; ++rep) {
        const Dataset d = testing::orthogonal_data(50, 5, rng);
        const InitialEstimate init = initial_at(d, InitKind::ols, std::nullopt);
        const LambdaPath lp = nng_lambda_path(d, init, 20);
        for (std::size_t k = 0; k < lp.values.size(); k += 3) {
            const double lam = lp.values[k];
            const SelectorFit f = nng_fit(d, init, lam);
            const Vector expected = oracles::orthogonal_garrote(init.values, lam);
            CHECK((*f.shrinkage_factors - expected).cwiseAbs().maxCoeff() < 1e-6);
            CHECK((nng_orthogonal(d, init, lam) - expected).cwiseAbs().maxCoeff() < 1e-14);
        }
    }
    CHECK_THROWS_AS(nng_orthogonal(testing::gaussian_data(30, 4, 1),
                                   initial_at(testing::gaussian_data(30, 4, 1), InitKind::ols, std::nullopt), 0.1),
                    UsageError);
}

TEST_CASE("garrote drops zero initial estimates and keeps signs") {
    const Dataset d = testing::gaussian_data(80, 8, 4);
    const FitResult ols = fit_full(d);
    Vector values = ols.coefficients;
    values[2] = 0.0;
    values[5] = 0.0;
    const InitialEstimate init = make_initial(InitKind::lasso, values, ols.intercept, 0.1);
    CHECK(init.nonzero_set == std::vector<Index>{0, 1, 3, 4, 6, 7});
    CHECK(garrote_design(d, init).p() == 6);
    const LambdaPath lp = nng_lambda_path(d, init, 15);
    for (double lam : lp.values) {
        const SelectorFit f = nng_fit(d, init, lam);
        CHECK(f.coefficients[2] == 0.0);
        CHECK(f.coefficients[5] == 0.0);
        for (Index j = 0; j < 8; ++j) {
            CHECK((*f.shrinkage_factors)[j] >= 0.0);
            CHECK(f.coefficients[j] * values[j] >= 0.0);
        }
    }
    CHECK_THROWS_AS(garrote_design(d, make_initial(InitKind::lasso, Vector::Zero(8), 0.0, 1.0)), UsageError);
}

TEST_CASE("nng_fit equals the matching path column") {
    const Dataset d = load_prostate(testing::data_dir());
    const InitialEstimate init = initial_at(d, InitKind::ols, std::nullopt);
    const LambdaPath lp = nng_lambda_path(d, init);
    const PathFit path = nng_path(d, init, lp.values);
    for (Index k = 10; k < path.size(); k += 30) {
        const SelectorFit f = nng_fit(d, init, lp.values[static_cast<std::size_t>(k)]);
        Vector c(8);
        for (Index j = 0; j < 8; ++j) c[j] = (*f.shrinkage_factors)[j];
        CHECK((c - path.coefficients.col(k)).cwiseAbs().maxCoeff() < 1e-9);
    }
}

TEST_CASE("relaxed lasso endpoints") {
    const Dataset d = testing::gaussian_data(60, 10, 3);
    const LambdaPath lp = lambda_path(d, PenaltySpec::lasso(10), 20);
    for (std::size_t k = 2; k < lp.values.size(); k += 4) {
        const double lam = lp.values[k];
        const SelectorFit lasso = lasso_fit(d, lam);
        const SelectorFit one = rlasso_fit(d, lam, 1.0);
        CHECK((one.coefficients - lasso.coefficients).cwiseAbs().maxCoeff() < 1e-12);
        CHECK(std::abs(one.intercept - lasso.intercept) < 1e-12);

        const SelectorFit zero = rlasso_fit(d, lam, 0.0);
        const FitResult refit = fit_subset(d, lasso.selected);
        CHECK((zero.coefficients - refit.coefficients).cwiseAbs().maxCoeff() < 1e-10);
        CHECK(zero.selected == lasso.selected);

        const SelectorFit half = rlasso_fit(d, lam, 0.5);
        CHECK((half.coefficients - 0.5 * (lasso.coefficients + refit.coefficients)).cwiseAbs().maxCoeff() < 1e-10);
    }
    CHECK_THROWS_AS(rlasso_fit(d, 0.1, 1.5), UsageError);
}

TEST_CASE("relax_path matches pointwise relaxed fits") {
    const Dataset d = testing::gaussian_data(50, 6, 8);
    const LambdaPath lp = lambda_path(d, PenaltySpec::lasso(6), 12);
    const PathFit lasso = solve_path(d, PenaltySpec::lasso(6), lp);
    const std::vector<double> phis{0.0, 0.5};
    const auto relaxed = relax_path(d, lasso, phis);
    for (Index k = 1; k < lasso.size(); k += 3)
        for (std::size_t m = 0; m < phis.size(); ++m) {
            const SelectorFit f = rlasso_fit(d, lp.values[static_cast<std::size_t>(k)], phis[m]);
            CHECK((relaxed[m].coefficients.col(k) - f.coefficients).cwiseAbs().maxCoeff() < 1e-7);
        }
}

TEST_CASE("adaptive lasso weights") {
    Vector v(4);
    v << 2.0, -0.5, 0.0, 1.0;
    const InitialEstimate init = make_initial(InitKind::ols, v);
    const PenaltySpec spec = adaptive_weights(init, 2.0);
    CHECK(spec.weights.size() == 3);
    CHECK(spec.weights[0] == doctest::Approx(0.25));
    CHECK(spec.weights[1] == doctest::Approx(4.0));
    CHECK(spec.weights[2] == doctest::Approx(1.0));
    CHECK_THROWS_AS(adaptive_weights(init, 0.0), UsageError);

    const Dataset d = testing::gaussian_data(60, 4, 2);
    const SelectorFit f = alasso_fit(d, init, 1.0, 0.05);
    CHECK(f.coefficients[2] == 0.0);
}

TEST_CASE("best subset agrees with enumeration") {
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        const Dataset d = testing::gaussian_data(40, 7, seed, 2.0);
        const auto fits = best_subset(d, 7);
        const auto oracle = oracles::best_rss_by_size(d);
        REQUIRE(fits.size() == 8);
        for (std::size_t k = 0; k < fits.size(); ++k) {
            CHECK(fits[k].selected.size() == k);
            const double rss =
                (d.y() - linear_predictor(d.x(), fits[k].coefficients, fits[k].intercept)).squaredNorm();
            CHECK(std::abs(rss - oracle[k]) <= 1e-10 * std::max(1.0, oracle[k]));
        }
    }
    const Dataset pr = load_prostate(testing::data_dir());
    const auto fits = best_subset(pr, 8);
    CHECK(fits[3].selected == std::vector<Index>{0, 1, 4});
}

TEST_CASE("best subset ties go to the smallest index set") {
    std::mt19937_64 rng(3);
    Matrix x = testing::random_matrix(30, 4, rng);
    x.col(3) = x.col(1);
    const Vector y = x.col(1) * 2.0 + x.col(0) * 0.1;
    const Dataset d(x, y, testing::names(4), Family::gaussian);
    const auto fits = best_subset(d, 1);
    CHECK(fits[1].selected == std::vector<Index>{1});
}

TEST_CASE("best subset limits") {
    CHECK_THROWS_WITH_AS(best_subset(testing::gaussian_data(40, 17, 1), 3), "subset requires p <= 16", UsageError);
    CHECK_THROWS_AS(best_subset(testing::binomial_data(40, 3, 1), 3), UsageError);
}

TEST_CASE("BIC choice matches the formula") {
    const Dataset d = testing::gaussian_data(60, 6, 5);
    const auto fits = best_subset(d, 6);
    const SelectorFit bic = select_subset_bic(fits, d);
    const double n = 60.0;
    double best = std::numeric_limits<double>::infinity();
    std::size_t arg = 0;
    for (std::size_t k = 0; k < fits.size(); ++k) {
        const double rss = (d.y() - linear_predictor(d.x(), fits[k].coefficients, fits[k].intercept)).squaredNorm();
        const double b = n * std::log(rss / n) + static_cast<double>(k + 1) * std::log(n);
        if (b < best) {
            best = b;
            arg = k;
        }
    }
    CHECK(bic.selected == fits[arg].selected);
    CHECK(bic.fit_stats.at("bic") == doctest::Approx(best));
    CHECK(bic.selected == std::vector<Index>{0, 1, 2});
}

TEST_CASE("initial estimates") {
    const Dataset wide = testing::gaussian_data(30, 80, 2);
    const InitialEstimate r = initial_at(wide, InitKind::ridge, 0.5);
    CHECK(r.values.allFinite());
    CHECK(r.nonzero_set.size() == 80);
    CHECK_THROWS_AS(compute_initial(wide, InitKind::ols, assign_folds(30, 5, 1), Rule::opt), UsageError);
    CHECK_THROWS_AS(initial_at(wide, InitKind::lasso, std::nullopt), UsageError);

    const InitialEstimate l = compute_initial(wide, InitKind::lasso, assign_folds(30, 5, 1), Rule::opt);
    CHECK(l.lambda.has_value());
    CHECK(l.rule == Rule::opt);
    CHECK(l.nonzero_set.size() < 30);

    CHECK(init_kind_from_string("ridge") == InitKind::ridge);
    CHECK(rule_from_string("1se") == Rule::one_se);
    CHECK_THROWS_AS(init_kind_from_string("bogus"), UsageError);
}

}  // TEST_SUITE
