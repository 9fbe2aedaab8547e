#include "garrote/inference.hpp"

#include <cmath>
#include <limits>
#include <random>

#include "garrote/glm.hpp"

namespace garrote {

SandwichSE sandwich_se(const SelectorFit& fit, const InitialEstimate& init, const Dataset& d, double lambda,
                       SandwichKind kind) {
    if (d.family() != Family::gaussian) throw UsageError("sandwich standard errors are implemented for gaussian fits");
    if (!fit.shrinkage_factors) throw UsageError("sandwich standard errors need a garrote fit");
    if (!(lambda >= 0.0)) throw UsageError("lambda must be nonnegative");
    const Vector& c = *fit.shrinkage_factors;

    SandwichSE out;
    out.se = Vector::Zero(d.p());
    for (Index j = 0; j < c.size(); ++j)
        if (c[j] > 0.0) out.active.push_back(j);
    if (out.active.empty()) throw UsageError("sandwich standard errors need a nonempty active set");

    const auto a = static_cast<Index>(out.active.size());
    const double n = static_cast<double>(d.n());
    if (d.n() - a - 1 <= 0) throw NumericalError("no residual degrees of freedom for the sandwich variance");

    const Matrix xc = d.x().rowwise() - d.x().colwise().mean();
    Matrix xs(d.n(), a);
    for (Index k = 0; k < a; ++k) {
        const Index j = out.active[static_cast<std::size_t>(k)];
        xs.col(k) = init.values[j] * xc.col(j);
    }
    const Matrix g = xs.transpose() * xs;
    Matrix m = g;
    if (kind == SandwichKind::lqa)
        for (Index k = 0; k < a; ++k) m(k, k) += n * lambda / c[out.active[static_cast<std::size_t>(k)]];

    const Eigen::FullPivLU<Matrix> lu(m);
    if (!lu.isInvertible()) throw NumericalError("sandwich inner matrix is singular");
    const Matrix minv = lu.inverse();

    const Vector resid = d.y() - linear_predictor(d.x(), fit.coefficients, fit.intercept);
    out.sigma2 = resid.squaredNorm() / (n - static_cast<double>(a) - 1.0);
    const Matrix cov = kind == SandwichKind::lqa ? Matrix(out.sigma2 * minv * g * minv) : Matrix(out.sigma2 * minv);
    for (Index k = 0; k < a; ++k) {
        const Index j = out.active[static_cast<std::size_t>(k)];
        out.se[j] = std::abs(init.values[j]) * std::sqrt(std::max(cov(k, k), 0.0));
    }
    return out;
}

std::string_view to_string(BootstrapMode m) {
    switch (m) {
        case BootstrapMode::fixed_opt: return "fixed_opt";
        case BootstrapMode::fixed_1se: return "fixed_1se";
        case BootstrapMode::reestimated_opt: return "reestimated_opt";
        case BootstrapMode::reestimated_1se: return "reestimated_1se";
    }
    return "?";
}

BootstrapMode bootstrap_mode_from_string(std::string_view s) {
    if (s == "fixed_opt") return BootstrapMode::fixed_opt;
    if (s == "fixed_1se") return BootstrapMode::fixed_1se;
    if (s == "reestimated_opt") return BootstrapMode::reestimated_opt;
    if (s == "reestimated_1se") return BootstrapMode::reestimated_1se;
    throw UsageError("unknown bootstrap mode '" + std::string(s) +
                     "' (expected fixed_opt, fixed_1se, reestimated_opt or reestimated_1se)");
}

namespace {

bool is_fixed(BootstrapMode m) { return m == BootstrapMode::fixed_opt || m == BootstrapMode::fixed_1se; }

constexpr int kMaxRetries = 10;

}  // namespace

BootstrapSummary bootstrap_se(const Dataset& d, const MethodSpec& spec_in, const BootstrapOptions& options) {
    if (options.B < 2) throw UsageError("bootstrap needs B >= 2");
    MethodSpec spec = spec_in;
    spec.rule = (options.mode == BootstrapMode::fixed_opt || options.mode == BootstrapMode::reestimated_opt)
                    ? Rule::opt
                    : Rule::one_se;

    BootstrapSummary out;
    out.B = options.B;
    out.mode = options.mode;
    out.seed = options.seed;
    out.method = spec.label();

    std::optional<InitialEstimate> original_init;
    if (is_fixed(options.mode)) {
        const FoldAssignment folds = assign_folds(d.n(), options.folds, options.seed);
        const SelectorFit base = tuned_fit(d, spec, folds);
        out.fixed_tuning = base.tuning;
        if (!options.recompute_init && (spec.method == Method::nng || spec.method == Method::alasso)) {
            const auto it = base.tuning.find("init_lambda");
            original_init = initial_at(d, spec.init,
                                       it == base.tuning.end() ? std::nullopt : std::optional<double>(it->second));
        }
    }

    const auto b_count = static_cast<std::size_t>(options.B);
    const Index p = d.p();
    Matrix draws = Matrix::Constant(options.B, p, std::numeric_limits<double>::quiet_NaN());
    std::vector<int> attempts(b_count, 0);
    std::vector<char> ok(b_count, 0);

    parallel_for(b_count, options.threads, [&](std::size_t b) {
        const std::uint64_t stream = mix_seed(options.seed, b + 1);
        for (int attempt = 0; attempt <= kMaxRetries; ++attempt) {
            std::mt19937_64 rng(mix_seed(stream, static_cast<std::uint64_t>(attempt)));
            std::uniform_int_distribution<Index> pick(0, d.n() - 1);
            std::vector<Index> rows(static_cast<std::size_t>(d.n()));
            for (auto& r : rows) r = pick(rng);
            attempts[b] = attempt;
            try {
                const Dataset res = d.rows(rows);
                SelectorFit fit;
                if (!is_fixed(options.mode)) {
                    fit = tuned_fit(res, spec, assign_folds(res.n(), options.folds, rng()));
                } else if (original_init) {
                    const double lambda = out.fixed_tuning.at("lambda");
                    fit = spec.method == Method::nng
                              ? nng_fit(res, *original_init, lambda)
                              : alasso_fit(res, *original_init, out.fixed_tuning.at("gamma"), lambda);
                } else {
                    fit = fit_with_tuning(res, spec, out.fixed_tuning);
                }
                if (!fit.coefficients.allFinite()) throw NumericalError("non-finite bootstrap estimate");
                draws.row(static_cast<Index>(b)) = fit.coefficients.transpose();
                ok[b] = 1;
                return;
            } catch (const NumericalError&) {
            } catch (const UsageError&) {
            }
        }
    });

    out.mean_est = Vector::Zero(p);
    out.se = Vector::Zero(p);
    out.nonzero_prop = Vector::Zero(p);
    int good = 0;
    for (std::size_t b = 0; b < b_count; ++b) {
        out.retries += attempts[b];
        if (!ok[b]) {
            ++out.failed;
            continue;
        }
        ++good;
    }
    if (good < 2) throw NumericalError("fewer than two bootstrap replicates succeeded");
    for (Index j = 0; j < p; ++j) {
        double sum = 0.0, nz = 0.0;
        for (std::size_t b = 0; b < b_count; ++b) {
            if (!ok[b]) continue;
            const double v = draws(static_cast<Index>(b), j);
            sum += v;
            nz += v != 0.0 ? 1.0 : 0.0;
        }
        const double mean = sum / good;
        double ss = 0.0;
        for (std::size_t b = 0; b < b_count; ++b)
            if (ok[b]) ss += (draws(static_cast<Index>(b), j) - mean) * (draws(static_cast<Index>(b), j) - mean);
        out.mean_est[j] = mean;
        out.se[j] = std::sqrt(ss / (good - 1));
        out.nonzero_prop[j] = nz / good;
    }
    if (out.failed > 0) warn("bootstrap: " + std::to_string(out.failed) + " replicate(s) failed after retries");
    if (options.keep_draws) out.draws = std::move(draws);
    return out;
}

}  // namespace garrote
