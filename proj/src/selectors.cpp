#include "garrote/selectors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "garrote/glm.hpp"
#include "garrote/tuning.hpp"

namespace garrote {

std::string_view to_string(InitKind k) {
    switch (k) {
        case InitKind::ols: return "ols";
        case InitKind::ridge: return "ridge";
        case InitKind::lasso: return "lasso";
    }
    return "?";
}

std::string_view to_string(Rule r) { return r == Rule::opt ? "opt" : "1se"; }

InitKind init_kind_from_string(std::string_view s) {
    if (s == "ols" || s == "O") return InitKind::ols;
    if (s == "ridge" || s == "R") return InitKind::ridge;
    if (s == "lasso" || s == "L") return InitKind::lasso;
    throw UsageError("unknown initial estimator '" + std::string(s) + "' (expected ols, ridge or lasso)");
}

Rule rule_from_string(std::string_view s) {
    if (s == "opt") return Rule::opt;
    if (s == "1se") return Rule::one_se;
    throw UsageError("unknown tuning rule '" + std::string(s) + "' (expected opt or 1se)");
}

InitialEstimate make_initial(InitKind kind, Vector values, double intercept, std::optional<double> lambda,
                             std::optional<Rule> rule) {
    if (!values.allFinite()) throw NumericalError("initial estimate is not finite");
    InitialEstimate e;
    e.kind = kind;
    e.lambda = lambda;
    e.rule = rule;
    e.values = std::move(values);
    e.intercept = intercept;
    for (Index j = 0; j < e.values.size(); ++j)
        if (e.values[j] != 0.0) e.nonzero_set.push_back(j);
    return e;
}

void finalize_fit(SelectorFit& fit, const Dataset& d) {
    fit.selected.clear();
    for (Index j = 0; j < fit.coefficients.size(); ++j)
        if (fit.coefficients[j] != 0.0) fit.selected.push_back(j);
    fit.fit_stats.clear();
    fit.fit_stats["n_selected"] = static_cast<double>(fit.selected.size());
    const Vector eta = linear_predictor(d.x(), fit.coefficients, fit.intercept);
    if (d.family() == Family::gaussian) {
        const double tss = (d.y().array() - d.y().mean()).matrix().squaredNorm();
        fit.fit_stats["rss"] = (d.y() - eta).squaredNorm();
        if (tss > 0.0) {
            const RSquared r = r_squared(d, fit.coefficients, fit.intercept);
            fit.fit_stats["r2"] = r.r2;
            fit.fit_stats["adj_r2"] = r.adj_r2;
        }
    } else {
        const Vector mu = eta.unaryExpr([](double e) { return sigmoid(e); });
        fit.fit_stats["deviance"] = deviance(d.y(), mu, Family::binomial);
    }
}

namespace {

double null_intercept(const Dataset& d) {
    if (d.family() == Family::gaussian) return d.y().mean();
    const double ybar = std::clamp(d.y().mean(), 1e-6, 1.0 - 1e-6);
    return std::log(ybar / (1.0 - ybar));
}

PenaltySpec spec_for(InitKind kind, Index p) {
    return kind == InitKind::ridge ? PenaltySpec::ridge(p) : PenaltySpec::lasso(p);
}

// Unpenalized refit on `support`; nullopt when it does not exist (p >= n, singular, separation).
std::optional<LinearFit> refit_support(const Dataset& d, const std::vector<Index>& support) {
    if (support.empty()) return LinearFit{Vector::Zero(d.p()), null_intercept(d)};
    if (static_cast<Index>(support.size()) + 1 >= d.n()) return std::nullopt;
    try {
        const FitResult f = fit_subset(d, support);
        return LinearFit{f.coefficients, f.intercept};
    } catch (const NumericalError&) {
        return std::nullopt;
    } catch (const UsageError&) {
        return std::nullopt;
    }
}

std::vector<Index> support_of(const Vector& beta) {
    std::vector<Index> s;
    for (Index j = 0; j < beta.size(); ++j)
        if (beta[j] != 0.0) s.push_back(j);
    return s;
}

}  // namespace

LinearFit solve_at(const Dataset& d, const PenaltySpec& spec, double lambda) {
    if (!(lambda >= 0.0)) throw UsageError("lambda must be nonnegative");
    const LambdaPath lp = lambda_path(d, spec);
    std::vector<double> values;
    for (double v : lp.values)
        if (v > lambda) values.push_back(v);
    values.push_back(lambda);
    const PathFit fit = solve_path(d, spec, values);
    const Index last = fit.size() - 1;
    return LinearFit{fit.coefficients.col(last), fit.intercepts[last]};
}

InitialEstimate compute_initial(const Dataset& d, InitKind kind, const FoldAssignment& folds, Rule rule) {
    if (kind == InitKind::ols) {
        if (d.n() <= d.p()) throw UsageError("OLS initial estimates need n > p");
        return initial_at(d, kind, std::nullopt);
    }
    const CVResult cv = cv_lasso(d, folds, kind == InitKind::ridge ? Norm::l2 : Norm::l1);
    const double lambda = cv.grid[cv.index(rule)].at("lambda");
    InitialEstimate e = initial_at(d, kind, lambda);
    e.rule = rule;
    return e;
}

InitialEstimate initial_at(const Dataset& d, InitKind kind, std::optional<double> lambda) {
    if (kind == InitKind::ols) {
        const FitResult f = fit_full(d);
        return make_initial(kind, f.coefficients, f.intercept);
    }
    if (!lambda) throw UsageError("ridge/lasso initial estimates need a tuning value");
    if (kind == InitKind::ridge) {
        const LinearFit f = ridge_fit(d, *lambda);
        return make_initial(kind, f.coefficients, f.intercept, lambda);
    }
    const LinearFit f = solve_at(d, spec_for(kind, d.p()), *lambda);
    return make_initial(kind, f.coefficients, f.intercept, lambda);
}

Dataset garrote_design(const Dataset& d, const InitialEstimate& init) {
    if (init.values.size() != d.p()) throw UsageError("initial estimate length does not match the design");
    if (init.nonzero_set.empty()) throw UsageError("all initial estimates are zero");
    Matrix xs(d.n(), static_cast<Index>(init.nonzero_set.size()));
    std::vector<std::string> names;
    for (std::size_t a = 0; a < init.nonzero_set.size(); ++a) {
        const Index j = init.nonzero_set[a];
        xs.col(static_cast<Index>(a)) = init.values[j] * d.x().col(j);
        names.push_back(d.names()[static_cast<std::size_t>(j)]);
    }
    return d.with_x(std::move(xs), std::move(names));
}

LambdaPath nng_lambda_path(const Dataset& d, const InitialEstimate& init, int n_lambda) {
    const Dataset g = garrote_design(d, init);
    return lambda_path(g, PenaltySpec::nonnegative_lasso(g.p()), n_lambda);
}

PathFit nng_path(const Dataset& d, const InitialEstimate& init, std::span<const double> lambdas) {
    const Dataset g = garrote_design(d, init);
    return solve_path(g, PenaltySpec::nonnegative_lasso(g.p()), lambdas);
}

SelectorFit nng_from_factors(const Dataset& d, const InitialEstimate& init, const Vector& factors_on_set,
                             double intercept, double lambda) {
    SelectorFit f;
    f.method = "nng";
    f.coefficients = Vector::Zero(d.p());
    Vector c = Vector::Zero(d.p());
    for (std::size_t a = 0; a < init.nonzero_set.size(); ++a) {
        const Index j = init.nonzero_set[a];
        c[j] = factors_on_set[static_cast<Index>(a)];
        if (c[j] != 0.0) f.coefficients[j] = c[j] * init.values[j];
    }
    f.shrinkage_factors = std::move(c);
    f.intercept = intercept;
    f.tuning["lambda"] = lambda;
    if (init.lambda) f.tuning["init_lambda"] = *init.lambda;
    finalize_fit(f, d);
    return f;
}

SelectorFit nng_fit(const Dataset& d, const InitialEstimate& init, double lambda) {
    const Dataset g = garrote_design(d, init);
    const LinearFit c = solve_at(g, PenaltySpec::nonnegative_lasso(g.p()), lambda);
    return nng_from_factors(d, init, c.coefficients, c.intercept, lambda);
}

Vector nng_orthogonal(const Vector& init_values, double lambda) {
    Vector c(init_values.size());
    for (Index j = 0; j < c.size(); ++j) {
        const double b2 = init_values[j] * init_values[j];
        c[j] = b2 > 0.0 ? std::max(1.0 - lambda / b2, 0.0) : 0.0;
    }
    return c;
}

Vector nng_orthogonal(const Dataset& d, const InitialEstimate& init, double lambda) {
    const Matrix xc = d.x().rowwise() - d.x().colwise().mean();
    const Matrix gram = xc.transpose() * xc / static_cast<double>(d.n());
    if ((gram - Matrix::Identity(d.p(), d.p())).cwiseAbs().maxCoeff() > 1e-8)
        throw UsageError("closed-form garrote factors need X'X = n I");
    return nng_orthogonal(init.values, lambda);
}

SelectorFit lasso_fit(const Dataset& d, double lambda) {
    const LinearFit l = solve_at(d, PenaltySpec::lasso(d.p()), lambda);
    SelectorFit f;
    f.method = "lasso";
    f.coefficients = l.coefficients;
    f.intercept = l.intercept;
    f.tuning["lambda"] = lambda;
    finalize_fit(f, d);
    return f;
}

PenaltySpec adaptive_weights(const InitialEstimate& init, double gamma) {
    if (!(gamma > 0.0)) throw UsageError("gamma must be positive");
    const auto m = static_cast<Index>(init.nonzero_set.size());
    PenaltySpec spec = PenaltySpec::lasso(m);
    for (Index a = 0; a < m; ++a)
        spec.weights[a] = 1.0 / std::pow(std::abs(init.values[init.nonzero_set[static_cast<std::size_t>(a)]]), gamma);
    return spec;
}

SelectorFit alasso_fit(const Dataset& d, const InitialEstimate& init, double gamma, double lambda) {
    if (init.nonzero_set.empty()) throw UsageError("all initial estimates are zero");
    const Dataset sub = d.columns(init.nonzero_set);
    const LinearFit l = solve_at(sub, adaptive_weights(init, gamma), lambda);
    SelectorFit f;
    f.method = "alasso";
    f.coefficients = Vector::Zero(d.p());
    for (std::size_t a = 0; a < init.nonzero_set.size(); ++a)
        f.coefficients[init.nonzero_set[a]] = l.coefficients[static_cast<Index>(a)];
    f.intercept = l.intercept;
    f.tuning["lambda"] = lambda;
    f.tuning["gamma"] = gamma;
    if (init.lambda) f.tuning["init_lambda"] = *init.lambda;
    finalize_fit(f, d);
    return f;
}

SelectorFit rlasso_fit(const Dataset& d, double lambda, double phi) {
    if (!(phi >= 0.0 && phi <= 1.0)) throw UsageError("phi must lie in [0, 1]");
    const LinearFit lasso = solve_at(d, PenaltySpec::lasso(d.p()), lambda);
    const auto support = support_of(lasso.coefficients);
    SelectorFit f;
    f.method = "rlasso";
    f.tuning["lambda"] = lambda;
    f.tuning["phi"] = phi;
    if (phi == 1.0) {
        f.coefficients = lasso.coefficients;
        f.intercept = lasso.intercept;
    } else {
        if (support.empty()) warn("rlasso: empty lasso support, returning the null model");
        const auto refit = refit_support(d, support);
        if (!refit) {
            warn("rlasso: unpenalized refit on the lasso support failed; falling back to phi=1");
            f.coefficients = lasso.coefficients;
            f.intercept = lasso.intercept;
            f.tuning["phi"] = 1.0;
        } else {
            f.coefficients = phi * lasso.coefficients + (1.0 - phi) * refit->coefficients;
            f.intercept = phi * lasso.intercept + (1.0 - phi) * refit->intercept;
        }
    }
    finalize_fit(f, d);
    return f;
}

std::vector<PathFit> relax_path(const Dataset& d, const PathFit& lasso, std::span<const double> phis) {
    std::vector<PathFit> out(phis.size(), lasso);
    std::vector<Index> last_support;
    std::optional<LinearFit> refit;
    bool have = false;
    for (Index k = 0; k < lasso.size(); ++k) {
        const auto support = support_of(lasso.coefficients.col(k));
        if (!have || support != last_support) {
            refit = refit_support(d, support);
            last_support = support;
            have = true;
        }
        if (!refit) continue;  // phi = 1 fallback keeps the lasso column
        for (std::size_t m = 0; m < phis.size(); ++m) {
            const double phi = phis[m];
            out[m].coefficients.col(k) = phi * lasso.coefficients.col(k) + (1.0 - phi) * refit->coefficients;
            out[m].intercepts[k] = phi * lasso.intercepts[k] + (1.0 - phi) * refit->intercept;
            out[m].df[static_cast<std::size_t>(k)] = static_cast<int>((out[m].coefficients.col(k).array() != 0.0).count());
        }
    }
    return out;
}

SelectorFit ridge_selector(const Dataset& d, double lambda) {
    const LinearFit r = ridge_fit(d, lambda);
    SelectorFit f;
    f.method = "ridge";
    f.coefficients = r.coefficients;
    f.intercept = r.intercept;
    f.tuning["lambda"] = lambda;
    finalize_fit(f, d);
    return f;
}

std::vector<SelectorFit> best_subset(const Dataset& d, Index max_k) {
    if (d.family() != Family::gaussian) throw UsageError("subset selection supports the gaussian family only");
    if (d.p() > 16) throw UsageError("subset requires p <= 16");
    const Index p = d.p();
    max_k = std::clamp<Index>(max_k, 0, std::min<Index>(p, d.n() - 2));

    const Matrix xc = d.x().rowwise() - d.x().colwise().mean();
    const Vector yc = d.y().array() - d.y().mean();
    const Matrix gram = xc.transpose() * xc;
    const Vector xty = xc.transpose() * yc;
    const double tss = yc.squaredNorm();

    std::vector<SelectorFit> out;
    for (Index k = 0; k <= max_k; ++k) {
        std::vector<Index> best;
        double best_rss = std::numeric_limits<double>::infinity();
        // combinations in lexicographic order; strict improvement keeps the first on ties
        std::vector<Index> comb(static_cast<std::size_t>(k));
        std::iota(comb.begin(), comb.end(), Index{0});
        for (;;) {
            double rss = tss;
            bool ok = true;
            if (k > 0) {
                Matrix g(k, k);
                Vector c(k);
                for (Index a = 0; a < k; ++a) {
                    c[a] = xty[comb[static_cast<std::size_t>(a)]];
                    for (Index b = 0; b < k; ++b)
                        g(a, b) = gram(comb[static_cast<std::size_t>(a)], comb[static_cast<std::size_t>(b)]);
                }
                Eigen::LLT<Matrix> llt(g);
                ok = llt.info() == Eigen::Success;
                if (ok) rss = tss - c.dot(llt.solve(c));
            }
            if (ok && rss < best_rss) {
                best_rss = rss;
                best = comb;
            }
            // next combination
            Index i = k - 1;
            while (i >= 0 && comb[static_cast<std::size_t>(i)] == p - k + i) --i;
            if (i < 0) break;
            ++comb[static_cast<std::size_t>(i)];
            for (Index j = i + 1; j < k; ++j) comb[static_cast<std::size_t>(j)] = comb[static_cast<std::size_t>(j - 1)] + 1;
        }
        if (best.size() != static_cast<std::size_t>(k)) break;
        const FitResult fr = fit_subset(d, best);
        SelectorFit f;
        f.method = "subset";
        f.coefficients = fr.coefficients;
        f.intercept = fr.intercept;
        f.tuning["k"] = static_cast<double>(k);
        finalize_fit(f, d);
        out.push_back(std::move(f));
    }
    return out;
}

SelectorFit select_subset_bic(const std::vector<SelectorFit>& fits, const Dataset& d) {
    if (fits.empty()) throw UsageError("no subset fits to choose from");
    const double n = static_cast<double>(d.n());
    std::size_t best = 0;
    double best_bic = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < fits.size(); ++i) {
        const Vector eta = linear_predictor(d.x(), fits[i].coefficients, fits[i].intercept);
        const double rss = (d.y() - eta).squaredNorm();
        const double k = static_cast<double>(fits[i].selected.size());
        const double bic = n * std::log(rss / n) + (k + 1.0) * std::log(n);
        if (bic < best_bic) {
            best_bic = bic;
            best = i;
        }
    }
    SelectorFit f = fits[best];
    f.method = "subset_bic";
    f.fit_stats["bic"] = best_bic;
    return f;
}

}  // namespace garrote
