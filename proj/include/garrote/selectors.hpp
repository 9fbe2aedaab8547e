#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "garrote/dataset.hpp"
#include "garrote/pathsolver.hpp"

namespace garrote {

enum class InitKind { ols, ridge, lasso };
enum class Rule { opt, one_se };

std::string_view to_string(InitKind k);
std::string_view to_string(Rule r);
InitKind init_kind_from_string(std::string_view s);
Rule rule_from_string(std::string_view s);

using TuningMap = std::map<std::string, double>;

/// Full-model coefficients that define the garrote design and adaptive weights.
struct InitialEstimate {
    InitKind kind = InitKind::ols;
    std::optional<double> lambda;  // ridge / lasso tuning value
    std::optional<Rule> rule;
    Vector values;
    double intercept = 0.0;
    std::vector<Index> nonzero_set;
};

InitialEstimate make_initial(InitKind kind, Vector values, double intercept = 0.0,
                             std::optional<double> lambda = std::nullopt, std::optional<Rule> rule = std::nullopt);

struct SelectorFit {
    std::string method;
    Vector coefficients;
    double intercept = 0.0;
    std::vector<Index> selected;
    std::optional<Vector> shrinkage_factors;
    TuningMap tuning;
    /// r2 / adj_r2 (gaussian) or deviance (binomial), in-sample.
    std::map<std::string, double> fit_stats;
};

/// Fills `selected` and `fit_stats` from the coefficients.
void finalize_fit(SelectorFit& fit, const Dataset& d);

/// OLS/ML (no tuning), or ridge / lasso tuned by cross-validation at `rule`.
InitialEstimate compute_initial(const Dataset& d, InitKind kind, const FoldAssignment& folds, Rule rule);

/// Ridge / lasso initial estimate at a fixed tuning value; OLS ignores lambda.
InitialEstimate initial_at(const Dataset& d, InitKind kind, std::optional<double> lambda);

/// Solution of a penalized problem at one lambda, warm-started down the
/// default grid of `d` (so it equals the corresponding column of a path fit).
LinearFit solve_at(const Dataset& d, const PenaltySpec& spec, double lambda);

// --- nonnegative garrote ---------------------------------------------------

/// Transformed design x*_ij = beta_init_j x_ij restricted to the nonzero initial estimates.
Dataset garrote_design(const Dataset& d, const InitialEstimate& init);

/// Shrinkage-factor path on the garrote design (nonnegative, unit-weight L1).
LambdaPath nng_lambda_path(const Dataset& d, const InitialEstimate& init, int n_lambda = 100);
PathFit nng_path(const Dataset& d, const InitialEstimate& init, std::span<const double> lambdas);

/// Builds a SelectorFit from shrinkage factors over the nonzero set (c_j = 0 elsewhere).
SelectorFit nng_from_factors(const Dataset& d, const InitialEstimate& init, const Vector& factors_on_set,
                             double intercept, double lambda);

SelectorFit nng_fit(const Dataset& d, const InitialEstimate& init, double lambda);

/// Closed-form factors (1 - lambda / beta_j^2)_+ valid when X'X = n I.
Vector nng_orthogonal(const Vector& init_values, double lambda);
/// Same, after checking that the centered design satisfies X'X = n I to 1e-8.
Vector nng_orthogonal(const Dataset& d, const InitialEstimate& init, double lambda);

// --- lasso family ----------------------------------------------------------

SelectorFit lasso_fit(const Dataset& d, double lambda);

/// Adaptive-lasso penalty over the nonzero initial estimates: w_j = |beta_init_j|^-gamma.
PenaltySpec adaptive_weights(const InitialEstimate& init, double gamma);
SelectorFit alasso_fit(const Dataset& d, const InitialEstimate& init, double gamma, double lambda);

/// phi * lasso + (1 - phi) * unpenalized refit on the lasso support.
SelectorFit rlasso_fit(const Dataset& d, double lambda, double phi);

/// Relaxed versions of every column of a lasso path; result[k] holds the path for phis[k].
std::vector<PathFit> relax_path(const Dataset& d, const PathFit& lasso, std::span<const double> phis);

SelectorFit ridge_selector(const Dataset& d, double lambda);

// --- best subset -----------------------------------------------------------

/// Exhaustive best subset per size 0..max_k by residual sum of squares (gaussian, p <= 16).
/// Ties go to the lexicographically smallest index set.
std::vector<SelectorFit> best_subset(const Dataset& d, Index max_k);

/// Minimizes n log(RSS/n) + (k+1) log n over the per-size fits.
SelectorFit select_subset_bic(const std::vector<SelectorFit>& fits, const Dataset& d);

}  // namespace garrote
