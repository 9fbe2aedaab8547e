#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "garrote/selectors.hpp"
#include "garrote/tuning.hpp"

namespace garrote {

struct SandwichSE {
    Vector se;  // 0 for variables outside the active set
    double sigma2 = 0.0;
    std::vector<Index> active;
};

enum class SandwichKind {
    /// cov(c_A) = s2 (G)^-1: the exact covariance of the garrote solution for a
    /// fixed active set, since the linear penalty only shifts c_A by a constant.
    active_set,
    /// Local quadratic approximation of the penalty:
    /// cov(c_A) = s2 (G + n S)^-1 G (G + n S)^-1, S = diag(lambda / c_j).
    lqa,
};

/// Sandwich standard errors of a gaussian garrote fit on the active set A = {c_j > 0},
/// G = X*_A'X*_A and s2 = RSS / (n - |A| - 1), mapped to coefficients through |beta_init_j|.
SandwichSE sandwich_se(const SelectorFit& fit, const InitialEstimate& init, const Dataset& d, double lambda,
                       SandwichKind kind = SandwichKind::active_set);

enum class BootstrapMode { fixed_opt, fixed_1se, reestimated_opt, reestimated_1se };

std::string_view to_string(BootstrapMode m);
BootstrapMode bootstrap_mode_from_string(std::string_view s);

struct BootstrapOptions {
    int B = 1000;
    BootstrapMode mode = BootstrapMode::fixed_opt;
    std::uint64_t seed = 1;
    int threads = 1;
    int folds = 10;
    /// Recompute the initial estimate on every resample (default); false reuses
    /// the original-data estimate in fixed modes.
    bool recompute_init = true;
    bool keep_draws = false;
};

struct BootstrapSummary {
    int B = 0;
    BootstrapMode mode = BootstrapMode::fixed_opt;
    std::uint64_t seed = 0;
    std::string method;
    Vector mean_est;
    Vector se;
    Vector nonzero_prop;
    /// Tuning values held fixed across replicates (fixed modes only).
    TuningMap fixed_tuning;
    int failed = 0;
    int retries = 0;
    Matrix draws;  // B x p, filled when keep_draws is set; failed rows are NaN
};

/// Nonparametric (row-resampling) bootstrap of a tuned method. Each replicate
/// uses its own RNG substream so results do not depend on thread count. A
/// replicate whose fit fails is retried with a fresh substream up to 10 times.
BootstrapSummary bootstrap_se(const Dataset& d, const MethodSpec& spec, const BootstrapOptions& options);

}  // namespace garrote
