#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "garrote/dataset.hpp"
#include "garrote/selectors.hpp"

namespace garrote {

enum class LossKind { mse, deviance };

using TuningPoint = TuningMap;

/// Cross-validated loss over an ordered tuning grid. The grid runs from the most
/// penalized (simplest) point to the least penalized one.
struct CVResult {
    std::vector<TuningPoint> grid;
    std::vector<double> mean_loss;
    std::vector<double> se_loss;
    Matrix fold_loss;  // K x points
    std::size_t idx_opt = 0;
    std::size_t idx_1se = 0;
    LossKind loss_kind = LossKind::mse;

    std::size_t index(Rule r) const { return r == Rule::opt ? idx_opt : idx_1se; }
};

/// Fits on a training split and returns held-out linear predictors, one column per grid point.
using GridFitter = std::function<Matrix(const Dataset& train, const Matrix& x_test)>;

/// K-fold CV: per-fold mean loss (MSE, or deviance per observation for binomial),
/// averaged over folds; se = SD of fold losses / sqrt(K). The 1SE point is the
/// first (most penalized) point within one SE of the minimum.
CVResult cv_tune(const Dataset& d, const GridFitter& fitter, std::vector<TuningPoint> grid,
                 const FoldAssignment& folds);

/// Picks argmin and 1SE indices for precomputed fold losses. `blocks` splits the
/// grid into runs sharing a second parameter; the 1SE search stays inside the
/// block that holds the minimum.
void choose_indices(CVResult& r, const std::vector<std::size_t>& block_starts = {0});

/// Lasso (L1) or ridge (L2) path CV on the default grid of `d`.
CVResult cv_lasso(const Dataset& d, const FoldAssignment& folds, Norm norm = Norm::l1, int n_lambda = 100);
/// Garrote shrinkage-factor CV on the transformed design of a fixed initial estimate.
CVResult cv_nng(const Dataset& d, const InitialEstimate& init, const FoldAssignment& folds, int n_lambda = 100);

enum class TwoDMethod { alasso, rlasso };

inline const std::vector<double> kDefaultGammas{0.5, 1.0, 1.5, 2.0};
inline const std::vector<double> kDefaultPhis{0.0, 0.25, 0.5, 0.75, 1.0};

/// (lambda, gamma) grid for the adaptive lasso with a fixed initial estimate.
CVResult cv_alasso(const Dataset& d, const InitialEstimate& init, const FoldAssignment& folds,
                   const std::vector<double>& gammas = kDefaultGammas, int n_lambda = 100);
/// (lambda, phi) grid for the relaxed lasso.
CVResult cv_rlasso(const Dataset& d, const FoldAssignment& folds, const std::vector<double>& phis = kDefaultPhis,
                   int n_lambda = 100);
CVResult cv_tune_2d(const Dataset& d, TwoDMethod method, const FoldAssignment& folds,
                    const std::optional<InitialEstimate>& init = std::nullopt);

/// Subset size k = 0..max_k chosen by CV (best subset refit per training fold).
CVResult cv_subset(const Dataset& d, const FoldAssignment& folds, Index max_k);

// --- method pipelines ------------------------------------------------------

enum class Method { null_model, ols, ridge, lasso, nng, alasso, rlasso, subset_bic, subset_cv };

std::string_view to_string(Method m);
Method method_from_string(std::string_view s);

struct MethodSpec {
    Method method = Method::nng;
    InitKind init = InitKind::ols;
    Rule rule = Rule::opt;
    Rule init_rule = Rule::opt;
    int n_lambda = 100;
    std::vector<double> gammas = kDefaultGammas;
    std::vector<double> phis = kDefaultPhis;

    /// e.g. "NNG(R,opt)", "Lasso(1se)", "BS(BIC)".
    std::string label() const;
};

/// Memoized ridge/lasso CV curves and initial estimates for a single (dataset, folds)
/// pair, so several methods tuned on the same split share that work. Using one cache
/// with different data or folds gives wrong results.
class TuningCache {
public:
    const CVResult& cv(const Dataset& d, const FoldAssignment& folds, Norm norm, int n_lambda = 100);
    const InitialEstimate& initial(const Dataset& d, const FoldAssignment& folds, InitKind kind, Rule rule);

private:
    std::map<std::pair<int, int>, CVResult> cv_;
    std::map<std::pair<int, int>, InitialEstimate> init_;
};

/// Tunes the method on `d` with `folds` (initial estimate and main tuning share
/// the folds) and refits on all of `d`. The tuning map records every chosen value.
SelectorFit tuned_fit(const Dataset& d, const MethodSpec& spec, const FoldAssignment& folds,
                      TuningCache* cache = nullptr);

/// Refit at fixed tuning values (as recorded by tuned_fit).
SelectorFit fit_with_tuning(const Dataset& d, const MethodSpec& spec, const TuningMap& tuning);

struct FoldPrediction {
    int fold = 0;
    Index n_test = 0;
    double loss = 0.0;  // MSE (gaussian) or fold AUC (binomial; NaN for a single-class fold)
    Index n_selected = 0;
};

struct PredictionReport {
    std::string method;
    std::string metric;  // "mse" or "auc"
    double value = 0.0;
    double se = 0.0;
    double avg_vars = 0.0;
    double se_vars = 0.0;
    std::vector<FoldPrediction> per_fold;
    Vector held_out;  // linear predictor for every observation, from the fold that held it out
};

struct PredictionOptions {
    int outer_folds = 10;
    int inner_folds = 10;
    std::uint64_t seed = 1;
    int threads = 1;
    /// false: tune once on all data and keep the tuning fixed in every outer fold.
    bool nested = true;
};

/// Outer K-fold prediction error with tuning nested inside each training split.
/// Gaussian reports the mean of fold MSEs; binomial reports AUC over the pooled held-out predictions.
PredictionReport cv_prediction_error(const Dataset& d, const MethodSpec& spec, const PredictionOptions& options);
/// Same reports as calling cv_prediction_error per spec, with inner tuning shared across specs.
std::vector<PredictionReport> cv_prediction_errors(const Dataset& d, const std::vector<MethodSpec>& specs,
                                                   const PredictionOptions& options);

/// Concordance probability: P(score_pos > score_neg) + 0.5 P(tie).
double auc(const Vector& y, const Vector& scores);

}  // namespace garrote
