#include "garrote/tuning.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "garrote/glm.hpp"

namespace garrote {

namespace {

double fold_loss(const Vector& y, const Vector& eta, Family family) {
    const double n = static_cast<double>(y.size());
    if (family == Family::gaussian) return (y - eta).squaredNorm() / n;
    double dev = 0.0;
    for (Index i = 0; i < y.size(); ++i) {
        const double mu = std::clamp(sigmoid(eta[i]), 1e-10, 1.0 - 1e-10);
        dev -= 2.0 * (y[i] * std::log(mu) + (1.0 - y[i]) * std::log(1.0 - mu));
    }
    return dev / n;
}

double sample_sd(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double m = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

void check_folds(const Dataset& d, const FoldAssignment& folds) {
    if (static_cast<Index>(folds.fold_of.size()) != d.n())
        throw UsageError("fold assignment length does not match the number of observations");
    if (folds.k < 2) throw UsageError("cross-validation needs at least 2 folds");
}

void summarize(CVResult& r) {
    const Index k = r.fold_loss.rows();
    const Index m = r.fold_loss.cols();
    r.mean_loss.assign(static_cast<std::size_t>(m), 0.0);
    r.se_loss.assign(static_cast<std::size_t>(m), 0.0);
    for (Index j = 0; j < m; ++j) {
        std::vector<double> col(r.fold_loss.col(j).data(), r.fold_loss.col(j).data() + k);
        r.mean_loss[static_cast<std::size_t>(j)] = r.fold_loss.col(j).mean();
        r.se_loss[static_cast<std::size_t>(j)] = sample_sd(col) / std::sqrt(static_cast<double>(k));
    }
}

Matrix predict_path(const Matrix& x, const PathFit& f) {
    Matrix eta = x * f.coefficients;
    eta.rowwise() += f.intercepts.transpose();
    return eta;
}

std::vector<TuningPoint> lambda_grid(const LambdaPath& lp) {
    std::vector<TuningPoint> g;
    g.reserve(lp.values.size());
    for (double v : lp.values) g.push_back({{"lambda", v}});
    return g;
}

CVResult cv_penalized(const Dataset& d, const PenaltySpec& spec, const LambdaPath& lp, const FoldAssignment& folds,
                      std::vector<TuningPoint> grid) {
    const GridFitter fitter = [&](const Dataset& train, const Matrix& x_test) {
        return predict_path(x_test, solve_path(train, spec, lp.values));
    };
    return cv_tune(d, fitter, std::move(grid), folds);
}

// Concatenates per-block CV results (same folds) into one grid.
CVResult merge_blocks(std::vector<CVResult> blocks, std::vector<std::size_t>& starts) {
    CVResult out;
    out.loss_kind = blocks.front().loss_kind;
    Index cols = 0;
    for (const auto& b : blocks) cols += b.fold_loss.cols();
    out.fold_loss.resize(blocks.front().fold_loss.rows(), cols);
    Index at = 0;
    starts.clear();
    for (auto& b : blocks) {
        starts.push_back(static_cast<std::size_t>(at));
        out.fold_loss.middleCols(at, b.fold_loss.cols()) = b.fold_loss;
        at += b.fold_loss.cols();
        for (auto& g : b.grid) out.grid.push_back(std::move(g));
    }
    summarize(out);
    return out;
}

double null_intercept(const Dataset& d) {
    if (d.family() == Family::gaussian) return d.y().mean();
    const double ybar = std::clamp(d.y().mean(), 1e-6, 1.0 - 1e-6);
    return std::log(ybar / (1.0 - ybar));
}

SelectorFit null_selector(const Dataset& d, const std::string& method) {
    SelectorFit f;
    f.method = method;
    f.coefficients = Vector::Zero(d.p());
    f.intercept = null_intercept(d);
    finalize_fit(f, d);
    return f;
}

std::optional<double> lookup(const TuningMap& t, const std::string& key) {
    const auto it = t.find(key);
    if (it == t.end()) return std::nullopt;
    return it->second;
}

double require(const TuningMap& t, const std::string& key) {
    const auto v = lookup(t, key);
    if (!v) throw UsageError("missing tuning value '" + key + "'");
    return *v;
}

void record_init(SelectorFit& f, const InitialEstimate& init) {
    if (init.lambda) f.tuning["init_lambda"] = *init.lambda;
}

const char* init_letter(InitKind k) {
    switch (k) {
        case InitKind::ols: return "O";
        case InitKind::ridge: return "R";
        case InitKind::lasso: return "L";
    }
    return "?";
}

SelectorFit subset_of_size(const Dataset& d, Index k) {
    auto fits = best_subset(d, k);
    if (static_cast<Index>(fits.size()) <= k) throw NumericalError("no nonsingular subset of the requested size");
    return fits[static_cast<std::size_t>(k)];
}

}  // namespace

CVResult cv_tune(const Dataset& d, const GridFitter& fitter, std::vector<TuningPoint> grid,
                 const FoldAssignment& folds) {
    if (grid.empty()) throw UsageError("tuning grid is empty");
    check_folds(d, folds);
    CVResult r;
    r.grid = std::move(grid);
    r.loss_kind = d.family() == Family::gaussian ? LossKind::mse : LossKind::deviance;
    const auto m = static_cast<Index>(r.grid.size());
    r.fold_loss.resize(folds.k, m);
    for (int k = 1; k <= folds.k; ++k) {
        const auto train_idx = folds.train_rows(k);
        const auto test_idx = folds.test_rows(k);
        const Dataset train = d.rows(train_idx);
        // held-out rows are sliced directly so single-row folds (leave-one-out) work
        const auto nt = static_cast<Index>(test_idx.size());
        Matrix x_test(nt, d.p());
        Vector y_test(nt);
        for (Index i = 0; i < nt; ++i) {
            x_test.row(i) = d.x().row(test_idx[static_cast<std::size_t>(i)]);
            y_test[i] = d.y()[test_idx[static_cast<std::size_t>(i)]];
        }
        const Matrix eta = fitter(train, x_test);
        if (eta.rows() != nt || eta.cols() != m)
            throw std::logic_error("grid fitter returned a prediction matrix of the wrong shape");
        for (Index j = 0; j < m; ++j) r.fold_loss(k - 1, j) = fold_loss(y_test, eta.col(j), d.family());
    }
    summarize(r);
    choose_indices(r);
    return r;
}

void choose_indices(CVResult& r, const std::vector<std::size_t>& block_starts) {
    const std::size_t m = r.mean_loss.size();
    if (m == 0) throw UsageError("empty CV result");
    std::size_t opt = 0;
    for (std::size_t i = 1; i < m; ++i)
        if (r.mean_loss[i] < r.mean_loss[opt]) opt = i;
    std::size_t lo = 0, hi = m;
    for (std::size_t b = 0; b < block_starts.size(); ++b) {
        const std::size_t s = block_starts[b];
        const std::size_t e = b + 1 < block_starts.size() ? block_starts[b + 1] : m;
        if (opt >= s && opt < e) {
            lo = s;
            hi = e;
        }
    }
    const double threshold = r.mean_loss[opt] + r.se_loss[opt];
    std::size_t one_se = opt;
    for (std::size_t i = lo; i < hi; ++i) {
        if (r.mean_loss[i] <= threshold) {
            one_se = i;
            break;
        }
    }
    r.idx_opt = opt;
    r.idx_1se = one_se;
}

CVResult cv_lasso(const Dataset& d, const FoldAssignment& folds, Norm norm, int n_lambda) {
    const PenaltySpec spec = norm == Norm::l1 ? PenaltySpec::lasso(d.p()) : PenaltySpec::ridge(d.p());
    const LambdaPath lp = lambda_path(d, spec, n_lambda);
    return cv_penalized(d, spec, lp, folds, lambda_grid(lp));
}

CVResult cv_nng(const Dataset& d, const InitialEstimate& init, const FoldAssignment& folds, int n_lambda) {
    const Dataset g = garrote_design(d, init);
    const PenaltySpec spec = PenaltySpec::nonnegative_lasso(g.p());
    const LambdaPath lp = lambda_path(g, spec, n_lambda);
    return cv_penalized(g, spec, lp, folds, lambda_grid(lp));
}

CVResult cv_alasso(const Dataset& d, const InitialEstimate& init, const FoldAssignment& folds,
                   const std::vector<double>& gammas, int n_lambda) {
    if (gammas.empty()) throw UsageError("gamma grid is empty");
    if (init.nonzero_set.empty()) throw UsageError("all initial estimates are zero");
    const Dataset sub = d.columns(init.nonzero_set);
    std::vector<CVResult> blocks;
    for (double gamma : gammas) {
        const PenaltySpec spec = adaptive_weights(init, gamma);
        const LambdaPath lp = lambda_path(sub, spec, n_lambda);
        auto grid = lambda_grid(lp);
        for (auto& g : grid) g["gamma"] = gamma;
        blocks.push_back(cv_penalized(sub, spec, lp, folds, std::move(grid)));
    }
    std::vector<std::size_t> starts;
    CVResult r = merge_blocks(std::move(blocks), starts);
    choose_indices(r, starts);
    return r;
}

CVResult cv_rlasso(const Dataset& d, const FoldAssignment& folds, const std::vector<double>& phis, int n_lambda) {
    if (phis.empty()) throw UsageError("phi grid is empty");
    const PenaltySpec spec = PenaltySpec::lasso(d.p());
    const LambdaPath lp = lambda_path(d, spec, n_lambda);
    const auto m = static_cast<Index>(lp.values.size());
    std::vector<TuningPoint> grid;
    std::vector<std::size_t> starts;
    for (double phi : phis) {
        starts.push_back(grid.size());
        for (double v : lp.values) grid.push_back({{"lambda", v}, {"phi", phi}});
    }
    const GridFitter fitter = [&](const Dataset& train, const Matrix& x_test) {
        const PathFit lasso = solve_path(train, spec, lp.values);
        const auto relaxed = relax_path(train, lasso, phis);
        Matrix eta(x_test.rows(), m * static_cast<Index>(phis.size()));
        for (std::size_t b = 0; b < relaxed.size(); ++b)
            eta.middleCols(static_cast<Index>(b) * m, m) = predict_path(x_test, relaxed[b]);
        return eta;
    };
    CVResult r = cv_tune(d, fitter, std::move(grid), folds);
    choose_indices(r, starts);
    return r;
}

CVResult cv_tune_2d(const Dataset& d, TwoDMethod method, const FoldAssignment& folds,
                    const std::optional<InitialEstimate>& init) {
    if (method == TwoDMethod::rlasso) return cv_rlasso(d, folds);
    if (!init) throw UsageError("adaptive lasso tuning needs an initial estimate");
    return cv_alasso(d, *init, folds);
}

CVResult cv_subset(const Dataset& d, const FoldAssignment& folds, Index max_k) {
    std::vector<TuningPoint> grid;
    for (Index k = 0; k <= max_k; ++k) grid.push_back({{"k", static_cast<double>(k)}});
    const GridFitter fitter = [&](const Dataset& train, const Matrix& x_test) {
        const auto fits = best_subset(train, max_k);
        Matrix eta(x_test.rows(), max_k + 1);
        for (Index k = 0; k <= max_k; ++k) {
            // sizes beyond what the split supports reuse the largest fit
            const auto& f = fits[std::min(static_cast<std::size_t>(k), fits.size() - 1)];
            eta.col(k) = linear_predictor(x_test, f.coefficients, f.intercept);
        }
        return eta;
    };
    return cv_tune(d, fitter, std::move(grid), folds);
}

std::string_view to_string(Method m) {
    switch (m) {
        case Method::null_model: return "null";
        case Method::ols: return "ols";
        case Method::ridge: return "ridge";
        case Method::lasso: return "lasso";
        case Method::nng: return "nng";
        case Method::alasso: return "alasso";
        case Method::rlasso: return "rlasso";
        case Method::subset_bic: return "subset_bic";
        case Method::subset_cv: return "subset_cv";
    }
    return "?";
}

Method method_from_string(std::string_view s) {
    if (s == "null") return Method::null_model;
    if (s == "ols") return Method::ols;
    if (s == "ridge") return Method::ridge;
    if (s == "lasso") return Method::lasso;
    if (s == "nng") return Method::nng;
    if (s == "alasso") return Method::alasso;
    if (s == "rlasso") return Method::rlasso;
    if (s == "subset" || s == "subset_bic") return Method::subset_bic;
    if (s == "subset_cv") return Method::subset_cv;
    throw UsageError("unknown method '" + std::string(s) + "'");
}

std::string MethodSpec::label() const {
    const std::string r(to_string(rule));
    switch (method) {
        case Method::null_model: return "Null";
        case Method::ols: return "OLS";
        case Method::ridge: return "Ridge(" + r + ")";
        case Method::lasso: return "Lasso(" + r + ")";
        case Method::nng: return std::string("NNG(") + init_letter(init) + "," + r + ")";
        case Method::alasso: return std::string("Alasso(") + init_letter(init) + "," + r + ")";
        case Method::rlasso: return "Rlasso(" + r + ")";
        case Method::subset_bic: return "BS(BIC)";
        case Method::subset_cv: return "BS(CV)";
    }
    return "?";
}

const CVResult& TuningCache::cv(const Dataset& d, const FoldAssignment& folds, Norm norm, int n_lambda) {
    const std::pair<int, int> key{static_cast<int>(norm), n_lambda};
    auto it = cv_.find(key);
    if (it == cv_.end()) it = cv_.emplace(key, cv_lasso(d, folds, norm, n_lambda)).first;
    return it->second;
}

const InitialEstimate& TuningCache::initial(const Dataset& d, const FoldAssignment& folds, InitKind kind, Rule rule) {
    const std::pair<int, int> key{static_cast<int>(kind), static_cast<int>(rule)};
    auto it = init_.find(key);
    if (it != init_.end()) return it->second;
    InitialEstimate e;
    if (kind == InitKind::ols) {
        e = compute_initial(d, kind, folds, rule);
    } else {
        const CVResult& r = cv(d, folds, kind == InitKind::ridge ? Norm::l2 : Norm::l1);
        e = initial_at(d, kind, r.grid[r.index(rule)].at("lambda"));
        e.rule = rule;
    }
    return init_.emplace(key, std::move(e)).first->second;
}

SelectorFit tuned_fit(const Dataset& d, const MethodSpec& spec, const FoldAssignment& folds, TuningCache* cache) {
    const std::string label = spec.label();
    const auto cv_of = [&](Norm norm) { return cache ? cache->cv(d, folds, norm, spec.n_lambda) : cv_lasso(d, folds, norm, spec.n_lambda); };
    const auto initial = [&] {
        return cache ? cache->initial(d, folds, spec.init, spec.init_rule)
                     : compute_initial(d, spec.init, folds, spec.init_rule);
    };
    switch (spec.method) {
        case Method::null_model: return null_selector(d, "null");
        case Method::ols: {
            const FitResult f = fit_full(d);
            SelectorFit s;
            s.method = "ols";
            s.coefficients = f.coefficients;
            s.intercept = f.intercept;
            finalize_fit(s, d);
            return s;
        }
        case Method::ridge: {
            const CVResult cv = cv_of(Norm::l2);
            return ridge_selector(d, cv.grid[cv.index(spec.rule)].at("lambda"));
        }
        case Method::lasso: {
            if (cache && spec.n_lambda == 100) {
                // the cached lasso initial estimate is this fit
                const InitialEstimate& e = cache->initial(d, folds, InitKind::lasso, spec.rule);
                SelectorFit f;
                f.method = "lasso";
                f.coefficients = e.values;
                f.intercept = e.intercept;
                f.tuning["lambda"] = *e.lambda;
                finalize_fit(f, d);
                return f;
            }
            const CVResult cv = cv_of(Norm::l1);
            return lasso_fit(d, cv.grid[cv.index(spec.rule)].at("lambda"));
        }
        case Method::nng: {
            const InitialEstimate init = initial();
            if (init.nonzero_set.empty()) {
                warn(label + ": initial estimate selected no variables; using the null model");
                SelectorFit f = null_selector(d, "nng");
                record_init(f, init);
                return f;
            }
            const CVResult cv = cv_nng(d, init, folds, spec.n_lambda);
            return nng_fit(d, init, cv.grid[cv.index(spec.rule)].at("lambda"));
        }
        case Method::alasso: {
            const InitialEstimate init = initial();
            if (init.nonzero_set.empty()) {
                warn(label + ": initial estimate selected no variables; using the null model");
                SelectorFit f = null_selector(d, "alasso");
                record_init(f, init);
                return f;
            }
            const CVResult cv = cv_alasso(d, init, folds, spec.gammas, spec.n_lambda);
            const TuningPoint& t = cv.grid[cv.index(spec.rule)];
            return alasso_fit(d, init, t.at("gamma"), t.at("lambda"));
        }
        case Method::rlasso: {
            const CVResult cv = cv_rlasso(d, folds, spec.phis, spec.n_lambda);
            const TuningPoint& t = cv.grid[cv.index(spec.rule)];
            return rlasso_fit(d, t.at("lambda"), t.at("phi"));
        }
        case Method::subset_bic: {
            SelectorFit f = select_subset_bic(best_subset(d, d.p()), d);
            return f;
        }
        case Method::subset_cv: {
            const CVResult cv = cv_subset(d, folds, d.p());
            SelectorFit f = subset_of_size(d, static_cast<Index>(cv.grid[cv.index(spec.rule)].at("k")));
            f.method = "subset_cv";
            return f;
        }
    }
    throw std::logic_error("unhandled method");
}

SelectorFit fit_with_tuning(const Dataset& d, const MethodSpec& spec, const TuningMap& tuning) {
    switch (spec.method) {
        case Method::null_model:
        case Method::ols: return tuned_fit(d, spec, FoldAssignment{});
        case Method::ridge: return ridge_selector(d, require(tuning, "lambda"));
        case Method::lasso: return lasso_fit(d, require(tuning, "lambda"));
        case Method::nng:
        case Method::alasso: {
            const InitialEstimate init = initial_at(d, spec.init, lookup(tuning, "init_lambda"));
            const std::string name(to_string(spec.method));
            if (init.nonzero_set.empty() || !lookup(tuning, "lambda")) {
                SelectorFit f = null_selector(d, name);
                record_init(f, init);
                return f;
            }
            if (spec.method == Method::nng) return nng_fit(d, init, require(tuning, "lambda"));
            return alasso_fit(d, init, require(tuning, "gamma"), require(tuning, "lambda"));
        }
        case Method::rlasso: return rlasso_fit(d, require(tuning, "lambda"), require(tuning, "phi"));
        case Method::subset_bic:
        case Method::subset_cv: {
            SelectorFit f = subset_of_size(d, static_cast<Index>(require(tuning, "k")));
            f.method = std::string(to_string(spec.method));
            return f;
        }
    }
    throw std::logic_error("unhandled method");
}

PredictionReport cv_prediction_error(const Dataset& d, const MethodSpec& spec, const PredictionOptions& options) {
    return cv_prediction_errors(d, {spec}, options).front();
}

std::vector<PredictionReport> cv_prediction_errors(const Dataset& d, const std::vector<MethodSpec>& specs,
                                                   const PredictionOptions& options) {
    const FoldAssignment outer = assign_folds(d.n(), options.outer_folds, options.seed);
    const std::size_t n_specs = specs.size();
    std::vector<TuningMap> fixed;
    if (!options.nested) {
        const FoldAssignment inner = assign_folds(d.n(), options.inner_folds, mix_seed(options.seed, 0xF1F1F1F1ULL));
        TuningCache cache;
        for (const auto& spec : specs) fixed.push_back(tuned_fit(d, spec, inner, &cache).tuning);
    }

    const auto k_outer = static_cast<std::size_t>(outer.k);
    // [fold][spec]
    std::vector<std::vector<FoldPrediction>> per_fold(k_outer, std::vector<FoldPrediction>(n_specs));
    std::vector<std::vector<Vector>> eta_fold(k_outer, std::vector<Vector>(n_specs));
    parallel_for(k_outer, options.threads, [&](std::size_t i) {
        const int fold = static_cast<int>(i) + 1;
        const Dataset train = d.rows(outer.train_rows(fold));
        const Dataset test = d.rows(outer.test_rows(fold));
        const FoldAssignment inner = options.nested
                                         ? assign_folds(train.n(), options.inner_folds, mix_seed(options.seed, i + 1))
                                         : FoldAssignment{};
        TuningCache cache;
        for (std::size_t s = 0; s < n_specs; ++s) {
            const SelectorFit fit = options.nested ? tuned_fit(train, specs[s], inner, &cache)
                                                   : fit_with_tuning(train, specs[s], fixed[s]);
            const Vector eta = linear_predictor(test.x(), fit.coefficients, fit.intercept);
            FoldPrediction fp;
            fp.fold = fold;
            fp.n_test = test.n();
            fp.n_selected = static_cast<Index>(fit.selected.size());
            if (d.family() == Family::gaussian) {
                fp.loss = (test.y() - eta).squaredNorm() / static_cast<double>(test.n());
            } else {
                const double pos = test.y().sum();
                fp.loss = (pos > 0.0 && pos < static_cast<double>(test.n()))
                              ? auc(test.y(), eta)
                              : std::numeric_limits<double>::quiet_NaN();
            }
            per_fold[i][s] = fp;
            eta_fold[i][s] = eta;
        }
    });

    const auto mean = [](const std::vector<double>& v) {
        return v.empty() ? std::numeric_limits<double>::quiet_NaN()
                         : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    };
    std::vector<PredictionReport> reports;
    for (std::size_t s = 0; s < n_specs; ++s) {
        PredictionReport rep;
        rep.method = specs[s].label();
        rep.held_out = Vector::Zero(d.n());
        std::vector<double> losses, vars;
        for (std::size_t i = 0; i < k_outer; ++i) {
            const FoldPrediction& fp = per_fold[i][s];
            rep.per_fold.push_back(fp);
            const auto rows = outer.test_rows(static_cast<int>(i) + 1);
            for (std::size_t r = 0; r < rows.size(); ++r)
                rep.held_out[rows[r]] = eta_fold[i][s][static_cast<Index>(r)];
            if (!std::isnan(fp.loss)) losses.push_back(fp.loss);
            vars.push_back(static_cast<double>(fp.n_selected));
        }
        if (d.family() == Family::gaussian) {
            rep.metric = "mse";
            rep.value = mean(losses);
        } else {
            rep.metric = "auc";
            rep.value = auc(d.y(), rep.held_out);
        }
        rep.se = losses.empty() ? 0.0 : sample_sd(losses) / std::sqrt(static_cast<double>(losses.size()));
        rep.avg_vars = mean(vars);
        rep.se_vars = sample_sd(vars) / std::sqrt(static_cast<double>(vars.size()));
        reports.push_back(std::move(rep));
    }
    return reports;
}

double auc(const Vector& y, const Vector& scores) {
    if (y.size() != scores.size()) throw UsageError("auc: length mismatch");
    const Index n = y.size();
    std::vector<Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Index{0});
    std::sort(order.begin(), order.end(), [&](Index a, Index b) { return scores[a] < scores[b]; });
    // midranks over tied scores
    double rank_sum_pos = 0.0;
    double n_pos = 0.0;
    for (Index i = 0; i < n;) {
        Index j = i;
        while (j + 1 < n && scores[order[static_cast<std::size_t>(j + 1)]] == scores[order[static_cast<std::size_t>(i)]]) ++j;
        const double midrank = 0.5 * static_cast<double>(i + j) + 1.0;
        for (Index t = i; t <= j; ++t) {
            const double yt = y[order[static_cast<std::size_t>(t)]];
            if (yt != 0.0 && yt != 1.0) throw UsageError("auc: response must be 0/1");
            if (yt == 1.0) {
                rank_sum_pos += midrank;
                n_pos += 1.0;
            }
        }
        i = j + 1;
    }
    const double n_neg = static_cast<double>(n) - n_pos;
    if (n_pos == 0.0 || n_neg == 0.0) throw UsageError("auc needs both classes");
    return (rank_sum_pos - n_pos * (n_pos + 1.0) / 2.0) / (n_pos * n_neg);
}

}  // namespace garrote
