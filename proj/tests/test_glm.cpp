#include <boost/math/special_functions/beta.hpp>

#include "doctest.h"
#include "garrote/glm.hpp"
#include "helpers.hpp"

using namespace garrote;

namespace {

Matrix with_ones(const Matrix& x) {
    Matrix a(x.rows(), x.cols() + 1);
    a.col(0).setOnes();
    a.rightCols(x.cols()) = x;
    return a;
}

}  // namespace

TEST_SUITE("glm") {

TEST_CASE("least squares matches the uncentered normal equations") {
    const Dataset d = testing::gaussian_data(60, 5, 3);
    const FitResult f = fit_full(d);
    const Matrix a = with_ones(d.x());
    const Vector theta = (a.transpose() * a).ldlt().solve(a.transpose() * d.y());
    CHECK(std::abs(f.intercept - theta[0]) < 1e-10);
    CHECK((f.coefficients - theta.tail(5)).cwiseAbs().maxCoeff() < 1e-10);

    // p-values through the regularized incomplete beta function
    const Vector resid = d.y() - a * theta;
    const double dof = 60.0 - 6.0;
    const double s2 = resid.squaredNorm() / dof;
    const Matrix cov = s2 * (a.transpose() * a).inverse();
    for (Index j = 0; j < 5; ++j) {
        const double t = theta[j + 1] / std::sqrt(cov(j + 1, j + 1));
        const double p = boost::math::ibeta(dof / 2.0, 0.5, dof / (dof + t * t));
        CHECK(f.p_values[j] == doctest::Approx(p).epsilon(1e-8));
    }
    CHECK(f.sigma2_hat == doctest::Approx(s2));
}

TEST_CASE("prostate full model") {
    const Dataset d = load_prostate(testing::data_dir());
    const FitResult f = fit_full(d);
    const double ols[] = {0.662, 0.265, -0.157, 0.140, 0.314, -0.148, 0.035, 0.125};
    for (Index j = 0; j < 8; ++j) CHECK(std::abs(f.coefficients[j] - ols[j]) <= 0.001);
    const double p[] = {0.000, 0.003, 0.058, 0.098, 0.002, 0.241, 0.752, 0.310};
    for (Index j = 0; j < 8; ++j) CHECK(std::abs(f.p_values[j] - p[j]) <= 0.0015);
    const RSquared r = r_squared(f, d);
    CHECK(std::abs(r.r2 - 0.663) <= 0.001);
    CHECK(std::abs(r.adj_r2 - 0.633) <= 0.001);
}

TEST_CASE("r_squared from residuals") {
    const Dataset d = testing::gaussian_data(40, 4, 8);
    Vector b(4);
    b << 1.0, 0.0, -0.5, 0.0;
    const RSquared r = r_squared(d, b, 0.2);
    const Vector e = d.y() - (d.x() * b).array().matrix() - Vector::Constant(40, 0.2);
    const double tss = (d.y().array() - d.y().mean()).square().sum();
    const double r2 = 1.0 - e.squaredNorm() / tss;
    CHECK(r.r2 == doctest::Approx(r2));
    CHECK(r.adj_r2 == doctest::Approx(1.0 - (1.0 - r2) * 39.0 / (40.0 - 2.0 - 1.0)));
}

TEST_CASE("logistic maximum likelihood solves the score equations") {
    const Dataset d = testing::binomial_data(300, 4, 5);
    const FitResult f = fit_full(d);
    const Matrix a = with_ones(d.x());
    Vector theta(5);
    theta << f.intercept, f.coefficients;
    const Vector mu = (a * theta).unaryExpr([](double e) { return 1.0 / (1.0 + std::exp(-e)); });
    CHECK((a.transpose() * (d.y() - mu)).cwiseAbs().maxCoeff() < 1e-6);
    CHECK((f.fitted - mu).cwiseAbs().maxCoeff() < 1e-12);
    for (Index j = 0; j < 4; ++j) CHECK((f.p_values[j] >= 0.0 && f.p_values[j] <= 1.0));
}

TEST_CASE("subset fits scatter coefficients") {
    const Dataset d = testing::gaussian_data(50, 6, 2);
    const FitResult f = fit_subset(d, {0, 2});
    CHECK(f.coefficients.size() == 6);
    CHECK(f.coefficients[1] == 0.0);
    CHECK(f.coefficients[3] == 0.0);
    const FitResult direct = fit_full(d.columns({0, 2}));
    CHECK(f.coefficients[2] == doctest::Approx(direct.coefficients[1]));
    const FitResult empty = fit_subset(d, {});
    CHECK(empty.intercept == doctest::Approx(d.y().mean()));
}

TEST_CASE("deviance") {
    Vector y(4), mu(4);
    y << 1, 0, 1, 0;
    mu << 0.8, 0.3, 0.6, 0.1;
    const double expected = -2.0 * (std::log(0.8) + std::log(0.7) + std::log(0.6) + std::log(0.9));
    CHECK(deviance(y, mu, Family::binomial) == doctest::Approx(expected));
    CHECK(deviance(y, mu, Family::gaussian) == doctest::Approx((y - mu).squaredNorm()));
}

TEST_CASE("collinearity against auxiliary regressions and SVD") {
    for (const auto& d : {load_prostate(testing::data_dir()), load_bodyfat(testing::data_dir())}) {
        const CollinearityReport c = collinearity(d);
        for (Index j = 0; j < d.p(); ++j) {
            std::vector<Index> others;
            for (Index k = 0; k < d.p(); ++k)
                if (k != j) others.push_back(k);
            const Dataset aux(d.columns(others).x(), d.x().col(j), d.columns(others).names(), Family::gaussian);
            const double r2 = r_squared(fit_full(aux), aux).r2;
            CHECK(c.vif[j] == doctest::Approx(1.0 / (1.0 - r2)).epsilon(1e-8));
        }
        Matrix z = d.x();
        z.rowwise() -= z.colwise().mean();
        for (Index j = 0; j < z.cols(); ++j) z.col(j) /= z.col(j).norm();
        Eigen::JacobiSVD<Matrix> svd(z);
        const Vector sv = svd.singularValues();
        CHECK(c.condition_number == doctest::Approx(sv[0] / sv[sv.size() - 1]).epsilon(1e-8));
    }
    const CollinearityReport pr = collinearity(load_prostate(testing::data_dir()));
    CHECK(std::abs(pr.vif.minCoeff() - 1.34) <= 0.05);
    CHECK(std::abs(pr.vif.maxCoeff() - 3.10) <= 0.05);
    CHECK(std::abs(pr.condition_number - 4.15) <= 0.05);
    const CollinearityReport bf = collinearity(load_bodyfat(testing::data_dir()));
    CHECK(std::abs(bf.condition_number - 21.06) <= 0.5);
    CHECK(std::abs(bf.vif.maxCoeff() - 45.32) <= 1.0);
}

TEST_CASE("singular least squares is a numerical failure") {
    Matrix x(10, 2);
    for (Index i = 0; i < 10; ++i) x(i, 0) = x(i, 1) = static_cast<double>(i);
    const Dataset d(x, Vector::LinSpaced(10, 0.0, 1.0), {"a", "b"}, Family::gaussian);
    CHECK_THROWS_AS(fit_full(d), NumericalError);
    CHECK_THROWS_AS(fit_full(testing::gaussian_data(5, 6, 1)), UsageError);
}

}  // TEST_SUITE
