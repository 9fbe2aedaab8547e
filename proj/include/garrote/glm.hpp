#pragma once

#include <vector>

#include "garrote/dataset.hpp"

namespace garrote {

struct FitResult {
    Vector coefficients;
    double intercept = 0.0;
    /// Linear predictor (gaussian) or fitted probability (binomial).
    Vector fitted;
    double sigma2_hat = 0.0;
    Matrix cov;
    Vector p_values;
    Index df_used = 0;
    int iterations = 0;
};

/// Unpenalized full-model fit: least squares with t-test p-values (gaussian)
/// or Newton-Raphson maximum likelihood with Wald p-values (binomial).
FitResult fit_full(const Dataset& d);

/// Unpenalized fit on a column subset; coefficients are scattered back to length p
/// (zeros outside `cols`). An empty subset gives the intercept-only model.
FitResult fit_subset(const Dataset& d, const std::vector<Index>& cols);

struct RSquared {
    double r2 = 0.0;
    double adj_r2 = 0.0;
};

/// In-sample R^2 and adjusted R^2 of a gaussian linear predictor; k counts nonzero coefficients.
RSquared r_squared(const Dataset& d, const Vector& coefficients, double intercept);
RSquared r_squared(const FitResult& f, const Dataset& d);

/// Gaussian: residual sum of squares. Binomial: -2 log-likelihood, with
/// probabilities clamped to [1e-10, 1 - 1e-10] (a warning is recorded when clamping).
double deviance(const Vector& y, const Vector& mu, Family family);

struct CollinearityReport {
    Vector vif;
    double condition_number = 1.0;
};

/// VIFs from the inverse correlation matrix and the condition number of the
/// centered, unit-SD design (ratio of extreme singular values).
CollinearityReport collinearity(const Dataset& d);

double sigmoid(double eta);

}  // namespace garrote
