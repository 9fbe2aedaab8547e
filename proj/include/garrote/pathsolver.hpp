#pragma once

#include <optional>
#include <span>
#include <vector>

#include "garrote/dataset.hpp"

namespace garrote {

enum class Norm { l1, l2 };

/// Per-coefficient penalty weights and lower bounds.
///
/// A weight of 0 leaves the coefficient unpenalized. Lower bounds are either
/// 0 (sign-constrained) or -infinity. The L2 norm only supports unbounded coefficients.
struct PenaltySpec {
    Vector weights;
    Vector lower_bounds;
    Norm norm = Norm::l1;

    static PenaltySpec lasso(Index p);
    static PenaltySpec nonnegative_lasso(Index p);
    static PenaltySpec ridge(Index p);

    void validate(Index p) const;
};

struct LambdaPath {
    std::vector<double> values;  // strictly decreasing
    double lambda_max = 0.0;
    double ratio = 0.0;
};

struct PathFit {
    std::vector<double> lambdas;
    Matrix coefficients;  // p x n_lambda
    Vector intercepts;
    std::vector<int> df;
    std::vector<bool> converged;

    Index size() const { return static_cast<Index>(lambdas.size()); }
};

struct SolverOptions {
    /// Convergence threshold on max_j sqrt(v_j) |delta beta_j|, v_j the (weighted) column second moment.
    double tolerance = 1e-9;
    int max_sweeps = 100000;
    int max_irls = 100;
    /// Cycle on the nonzero set between full sweeps and screen with the sequential strong rule.
    bool active_set = true;
};

/// Default lambda_min / lambda_max ratio: 1e-4 when n > p, else 1e-2.
double default_lambda_ratio(const Dataset& d);

/// Log-equispaced grid from the smallest lambda that zeroes every penalized
/// coefficient down to ratio * lambda_max.
LambdaPath lambda_path(const Dataset& d, const PenaltySpec& spec, int n_lambda = 100,
                       std::optional<double> ratio = std::nullopt);

/// Minimizes (1/2n) loss + lambda * sum_j w_j pen(beta_j) subject to
/// beta_j >= lower_j at every lambda, warm-started along the sequence.
/// loss is the residual sum of squares (gaussian) or the deviance (binomial,
/// solved by IRLS); the intercept is always unpenalized.
PathFit solve_path(const Dataset& d, const PenaltySpec& spec, std::span<const double> lambdas,
                   const SolverOptions& options = {});
PathFit solve_path(const Dataset& d, const PenaltySpec& spec, const LambdaPath& path,
                   const SolverOptions& options = {});

struct LinearFit {
    Vector coefficients;
    double intercept = 0.0;
};

/// Closed-form ridge: (X'X + n lambda I)^{-1} X'y on centered data (gaussian), or
/// L2-penalized IRLS with direct solves (binomial). Uses the n x n dual system when p >= n.
LinearFit ridge_fit(const Dataset& d, double lambda);

/// Value of the penalized objective minimized by solve_path.
double penalized_objective(const Dataset& d, const PenaltySpec& spec, double lambda, const Vector& beta,
                           double intercept);

/// Largest violation of the optimality conditions at (beta, intercept); includes the intercept score.
double kkt_violation(const Dataset& d, const PenaltySpec& spec, double lambda, const Vector& beta,
                     double intercept);

Vector linear_predictor(const Matrix& x, const Vector& beta, double intercept);

}  // namespace garrote
