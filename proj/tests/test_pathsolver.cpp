#include <limits>

#include "doctest.h"
#include "garrote/pathsolver.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace garrote;

TEST_SUITE("pathsolver") {

TEST_CASE("lambda grid") {
    const Dataset d = testing::gaussian_data(50, 5, 1);
    const PenaltySpec spec = PenaltySpec::lasso(5);
    const LambdaPath lp = lambda_path(d, spec);
    CHECK(lp.values.size() == 100);
    CHECK(lp.ratio == 1e-4);
    CHECK(lp.values.back() == doctest::Approx(lp.lambda_max * 1e-4));
    for (std::size_t k = 1; k < lp.values.size(); ++k) CHECK(lp.values[k] < lp.values[k - 1]);
    CHECK(default_lambda_ratio(testing::gaussian_data(20, 30, 1)) == 1e-2);

    // lambda_max = max |x_j'(y - ybar)| / n on centered columns
    Matrix xc = d.x().rowwise() - d.x().colwise().mean();
    const Vector g = xc.transpose() * (d.y().array() - d.y().mean()).matrix() / 50.0;
    CHECK(lp.lambda_max == doctest::Approx(g.cwiseAbs().maxCoeff()));

    const PathFit fit = solve_path(d, spec, lp);
    CHECK(fit.coefficients.col(0).cwiseAbs().maxCoeff() == 0.0);
    CHECK(fit.df[0] == 0);
    CHECK(fit.df[1] > 0);
}

TEST_CASE("orthonormal design: lasso is soft thresholding") {
    std::mt19937_64 rng(4);
    const Dataset d = testing::orthogonal_data(60, 6, rng);
    const Vector z = d.x().transpose() * (d.y().array() - d.y().mean()).matrix() / 60.0;
    const PenaltySpec spec = PenaltySpec::lasso(6);
    const LambdaPath lp = lambda_path(d, spec, 30);
    const PathFit fit = solve_path(d, spec, lp);
    for (Index k = 0; k < fit.size(); ++k) {
        const double lam = fit.lambdas[static_cast<std::size_t>(k)];
        for (Index j = 0; j < 6; ++j) {
            const double st = z[j] > 0 ? std::max(z[j] - lam, 0.0) : std::min(z[j] + lam, 0.0);
            CHECK(std::abs(fit.coefficients(j, k) - st) < 1e-7);
        }
    }
}

TEST_CASE("p = 2 solutions agree with dense grid search") {
    std::mt19937_64 rng(11);
    for (int rep = 0; rep < 6; ++rep) {
        const Dataset d = oracles::random_p2_problem(rng);
        for (const PenaltySpec& spec : oracles::p2_specs()) {
            const LambdaPath lp = lambda_path(d, spec, 8, 0.05);
            const PathFit fit = solve_path(d, spec, lp);
            for (Index k = 0; k < fit.size(); ++k) {
                const double lam = fit.lambdas[static_cast<std::size_t>(k)];
                const Vector grid = oracles::grid_minimizer_p2(d, spec, lam);
                CHECK((fit.coefficients.col(k) - grid).cwiseAbs().maxCoeff() < 2e-3);
                CHECK(kkt_violation(d, spec, lam, fit.coefficients.col(k), fit.intercepts[k]) < 1e-6);
            }
        }
    }
}

TEST_CASE("KKT conditions hold along paths") {
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        const Dataset g = testing::gaussian_data(80, 12, seed);
        const Dataset b = testing::binomial_data(150, 10, seed);
        const Dataset wide = testing::gaussian_data(30, 60, seed);
        for (const Dataset* d : {&g, &b, &wide}) {
            std::vector<PenaltySpec> specs{PenaltySpec::lasso(d->p()), PenaltySpec::nonnegative_lasso(d->p()),
                                           PenaltySpec::ridge(d->p())};
            PenaltySpec weighted = PenaltySpec::lasso(d->p());
            for (Index j = 0; j < d->p(); ++j) weighted.weights[j] = 0.5 + 0.25 * static_cast<double>(j % 4);
            weighted.weights[0] = 0.0;
            specs.push_back(weighted);
            for (const auto& spec : specs) {
                const PathFit fit = solve_path(*d, spec, lambda_path(*d, spec, 40));
                for (Index k = 0; k < fit.size(); ++k) {
                    CHECK(fit.converged[static_cast<std::size_t>(k)]);
                    CHECK(kkt_violation(*d, spec, fit.lambdas[static_cast<std::size_t>(k)], fit.coefficients.col(k),
                                        fit.intercepts[k]) < 1e-6);
                }
            }
        }
    }
}

TEST_CASE("sign constraints are respected") {
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
        const Dataset d = seed % 2 ? testing::gaussian_data(60, 8, seed) : testing::binomial_data(120, 8, seed);
        PenaltySpec spec = PenaltySpec::nonnegative_lasso(8);
        const PathFit fit = solve_path(d, spec, lambda_path(d, spec));
        CHECK(fit.coefficients.minCoeff() >= 0.0);
    }
}

TEST_CASE("warm starts match cold single-lambda solves") {
    const Dataset g = testing::gaussian_data(70, 10, 6);
    const Dataset b = testing::binomial_data(160, 8, 6);
    for (const Dataset* d : {&g, &b}) {
        const PenaltySpec spec = PenaltySpec::lasso(d->p());
        const LambdaPath lp = lambda_path(*d, spec, 25);
        const PathFit warm = solve_path(*d, spec, lp);
        for (Index k = 3; k < warm.size(); k += 5) {
            const double lam = lp.values[static_cast<std::size_t>(k)];
            const PathFit cold = solve_path(*d, spec, std::vector<double>{lam});
            CHECK((cold.coefficients.col(0) - warm.coefficients.col(k)).cwiseAbs().maxCoeff() < 1e-6);
            CHECK(std::abs(cold.intercepts[0] - warm.intercepts[k]) < 1e-6);
        }
    }
}

TEST_CASE("active-set cycling matches naive full sweeps") {
    const Dataset g = testing::gaussian_data(50, 30, 9);
    const Dataset b = testing::binomial_data(120, 15, 9);
    for (const Dataset* d : {&g, &b}) {
        const PenaltySpec spec = PenaltySpec::lasso(d->p());
        const LambdaPath lp = lambda_path(*d, spec, 30);
        SolverOptions naive;
        naive.active_set = false;
        const PathFit a = solve_path(*d, spec, lp);
        const PathFit n = solve_path(*d, spec, lp, naive);
        CHECK((a.coefficients - n.coefficients).cwiseAbs().maxCoeff() < 1e-6);
        CHECK((a.intercepts - n.intercepts).cwiseAbs().maxCoeff() < 1e-6);
    }
}

TEST_CASE("ridge closed form") {
    const Dataset d = testing::gaussian_data(40, 6, 12);
    const double lam = 0.3;
    const LinearFit f = ridge_fit(d, lam);
    Matrix xc = d.x().rowwise() - d.x().colwise().mean();
    const Vector yc = d.y().array() - d.y().mean();
    const Vector beta = (xc.transpose() * xc + 40.0 * lam * Matrix::Identity(6, 6)).ldlt().solve(xc.transpose() * yc);
    CHECK((f.coefficients - beta).cwiseAbs().maxCoeff() < 1e-10);

    const PenaltySpec spec = PenaltySpec::ridge(6);
    const PathFit path = solve_path(d, spec, std::vector<double>{lam});
    CHECK((path.coefficients.col(0) - beta).cwiseAbs().maxCoeff() < 1e-7);

    // dual form when p >= n
    const Dataset wide = testing::gaussian_data(20, 50, 3);
    const LinearFit fw = ridge_fit(wide, lam);
    Matrix wc = wide.x().rowwise() - wide.x().colwise().mean();
    const Vector wy = wide.y().array() - wide.y().mean();
    const Vector bw = (wc.transpose() * wc + 20.0 * lam * Matrix::Identity(50, 50)).ldlt().solve(wc.transpose() * wy);
    CHECK((fw.coefficients - bw).cwiseAbs().maxCoeff() < 1e-9);

    const Dataset bin = testing::binomial_data(100, 5, 2);
    const LinearFit fb = ridge_fit(bin, 0.05);
    CHECK(kkt_violation(bin, PenaltySpec::ridge(5), 0.05, fb.coefficients, fb.intercept) < 1e-8);
}

TEST_CASE("path solutions minimize the objective locally") {
    const Dataset d = testing::binomial_data(100, 6, 21);
    const PenaltySpec spec = PenaltySpec::lasso(6);
    const LambdaPath lp = lambda_path(d, spec, 20);
    const PathFit fit = solve_path(d, spec, lp);
    std::mt19937_64 rng(5);
    std::normal_distribution<double> z(0.0, 1e-3);
    for (Index k = 0; k < fit.size(); k += 4) {
        const double lam = lp.values[static_cast<std::size_t>(k)];
        const double best = penalized_objective(d, spec, lam, fit.coefficients.col(k), fit.intercepts[k]);
        for (int t = 0; t < 20; ++t) {
            Vector b = fit.coefficients.col(k);
            for (Index j = 0; j < 6; ++j) b[j] += z(rng);
            CHECK(penalized_objective(d, spec, lam, b, fit.intercepts[k] + z(rng)) >= best - 1e-12);
        }
    }
}

TEST_CASE("penalty spec validation") {
    PenaltySpec bad = PenaltySpec::ridge(3);
    bad.lower_bounds[1] = 0.0;
    CHECK_THROWS_AS(bad.validate(3), UsageError);
    CHECK_THROWS_AS(PenaltySpec::lasso(3).validate(4), UsageError);
    PenaltySpec neg = PenaltySpec::lasso(3);
    neg.weights[0] = -1.0;
    CHECK_THROWS_AS(neg.validate(3), UsageError);
    PenaltySpec bound = PenaltySpec::lasso(3);
    bound.lower_bounds[2] = 1.0;
    CHECK_THROWS_AS(bound.validate(3), UsageError);
    const Dataset d = testing::gaussian_data(20, 3, 1);
    CHECK_THROWS_AS(solve_path(d, PenaltySpec::lasso(3), std::vector<double>{0.5, 1.0}), UsageError);
}

}  // TEST_SUITE
