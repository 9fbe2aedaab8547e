#pragma once

// Reference computations written independently of the library, used as test oracles.

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "garrote/dataset.hpp"
#include "garrote/pathsolver.hpp"

namespace oracles {

using garrote::Dataset;
using garrote::Index;
using garrote::Matrix;
using garrote::PenaltySpec;
using garrote::Vector;

/// n = 30 gaussian problem with two correlated covariates.
inline Dataset random_p2_problem(std::mt19937_64& rng) {
    std::normal_distribution<double> z(0.0, 1.0);
    std::uniform_real_distribution<double> u(-0.8, 0.8);
    const double rho = u(rng);
    const double b1 = 2.0 * z(rng), b2 = 2.0 * z(rng);
    Matrix x(30, 2);
    Vector y(30);
    for (Index i = 0; i < 30; ++i) {
        x(i, 0) = z(rng);
        x(i, 1) = rho * x(i, 0) + std::sqrt(1.0 - rho * rho) * z(rng);
        y[i] = 1.0 + b1 * x(i, 0) + b2 * x(i, 1) + z(rng);
    }
    return Dataset(x, y, {"a", "b"}, garrote::Family::gaussian);
}

inline std::vector<PenaltySpec> p2_specs() {
    PenaltySpec weighted = PenaltySpec::lasso(2);
    weighted.weights << 0.5, 2.0;
    return {PenaltySpec::lasso(2), PenaltySpec::nonnegative_lasso(2), weighted};
}

/// Minimizer of (1/2n)||y - a - Xb||^2 + lambda sum w_j |b_j| over b (b >= lower),
/// with the intercept profiled out, by successively refined grid search.
inline Vector grid_minimizer_p2(const Dataset& d, const PenaltySpec& spec, double lambda) {
    const double n = static_cast<double>(d.n());
    Matrix xc = d.x();
    double ybar = 0.0;
    for (Index i = 0; i < d.n(); ++i) ybar += d.y()[i];
    ybar /= n;
    for (Index j = 0; j < 2; ++j) {
        double m = 0.0;
        for (Index i = 0; i < d.n(); ++i) m += xc(i, j);
        m /= n;
        for (Index i = 0; i < d.n(); ++i) xc(i, j) -= m;
    }
    double g11 = 0, g12 = 0, g22 = 0, c1 = 0, c2 = 0, yy = 0;
    for (Index i = 0; i < d.n(); ++i) {
        const double yc = d.y()[i] - ybar;
        g11 += xc(i, 0) * xc(i, 0);
        g12 += xc(i, 0) * xc(i, 1);
        g22 += xc(i, 1) * xc(i, 1);
        c1 += xc(i, 0) * yc;
        c2 += xc(i, 1) * yc;
        yy += yc * yc;
    }
    const auto f = [&](double b1, double b2) {
        const double rss = yy - 2.0 * (b1 * c1 + b2 * c2) + b1 * b1 * g11 + 2.0 * b1 * b2 * g12 + b2 * b2 * g22;
        return 0.5 * rss / n + lambda * (spec.weights[0] * std::abs(b1) + spec.weights[1] * std::abs(b2));
    };
    const double det = g11 * g22 - g12 * g12;
    const double o1 = (g22 * c1 - g12 * c2) / det, o2 = (g11 * c2 - g12 * c1) / det;
    double h = 2.0 * std::max(std::abs(o1), std::abs(o2)) + 1.0;
    double best1 = 0.0, best2 = 0.0;
    for (int round = 0; round < 9; ++round) {
        const double cen1 = best1, cen2 = best2;
        double best = std::numeric_limits<double>::infinity();
        for (int i = 0; i <= 40; ++i) {
            double b1 = cen1 + h * (i / 20.0 - 1.0);
            if (b1 < spec.lower_bounds[0]) b1 = spec.lower_bounds[0];
            for (int k = 0; k <= 40; ++k) {
                double b2 = cen2 + h * (k / 20.0 - 1.0);
                if (b2 < spec.lower_bounds[1]) b2 = spec.lower_bounds[1];
                const double v = f(b1, b2);
                if (v < best) {
                    best = v;
                    best1 = b1;
                    best2 = b2;
                }
            }
        }
        h /= 10.0;
    }
    Vector b(2);
    b << best1, best2;
    return b;
}

/// Residual sum of squares of the least-squares fit with intercept on columns `cols`.
inline double subset_rss(const Dataset& d, const std::vector<Index>& cols) {
    Matrix a(d.n(), static_cast<Index>(cols.size()) + 1);
    a.col(0).setOnes();
    for (std::size_t c = 0; c < cols.size(); ++c) a.col(static_cast<Index>(c) + 1) = d.x().col(cols[c]);
    const Vector coef = a.colPivHouseholderQr().solve(d.y());
    return (d.y() - a * coef).squaredNorm();
}

/// Smallest RSS per subset size 0..p by enumerating every bit mask.
inline std::vector<double> best_rss_by_size(const Dataset& d) {
    const Index p = d.p();
    std::vector<double> best(static_cast<std::size_t>(p) + 1, std::numeric_limits<double>::infinity());
    for (unsigned mask = 0; mask < (1u << p); ++mask) {
        std::vector<Index> cols;
        for (Index j = 0; j < p; ++j)
            if (mask & (1u << j)) cols.push_back(j);
        const double rss = subset_rss(d, cols);
        auto& b = best[cols.size()];
        b = std::min(b, rss);
    }
    return best;
}

/// Concordance by direct enumeration of positive/negative pairs.
inline double pair_count_auc(const Vector& y, const Vector& s) {
    double num = 0.0, pairs = 0.0;
    for (Index i = 0; i < y.size(); ++i) {
        if (y[i] != 1.0) continue;
        for (Index k = 0; k < y.size(); ++k) {
            if (y[k] != 0.0) continue;
            pairs += 1.0;
            if (s[i] > s[k])
                num += 1.0;
            else if (s[i] == s[k])
                num += 0.5;
        }
    }
    return num / pairs;
}

/// (1 - lambda / beta_j^2)_+
inline Vector orthogonal_garrote(const Vector& beta, double lambda) {
    Vector c(beta.size());
    for (Index j = 0; j < beta.size(); ++j) c[j] = beta[j] == 0.0 ? 0.0 : std::max(0.0, 1.0 - lambda / (beta[j] * beta[j]));
    return c;
}

}  // namespace oracles
