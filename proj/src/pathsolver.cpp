#include "garrote/pathsolver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "garrote/glm.hpp"

namespace garrote {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kMinWeight = 1e-5;
constexpr double kIrlsTolerance = 1e-8;
constexpr double kLambdaFloor = 1e-6;
constexpr int kPolishAfter = 5;
constexpr int kMaxPolish = 3;

double soft_threshold(double u, double t) {
    if (u > t) return u - t;
    if (u < -t) return u + t;
    return 0.0;
}

double binomial_nll(const Vector& y, const Vector& eta) {
    double s = 0.0;
    for (Index i = 0; i < y.size(); ++i) {
        const double e = eta[i];
        const double log1pexp = e > 0 ? e + std::log1p(std::exp(-e)) : std::log1p(std::exp(e));
        s += log1pexp - y[i] * e;
    }
    return s;
}

double penalty_value(const PenaltySpec& spec, double lambda, const Vector& beta) {
    double pen = 0.0;
    for (Index j = 0; j < beta.size(); ++j) {
        if (spec.weights[j] == 0.0) continue;
        pen += spec.weights[j] * (spec.norm == Norm::l1 ? std::abs(beta[j]) : 0.5 * beta[j] * beta[j]);
    }
    return lambda * pen;
}

// Coordinate descent on a column-centered copy of the design. The intercept is
// an unpenalized coordinate; for the binomial family each lambda runs IRLS with
// the weighted least-squares subproblem solved here.
class CoordinateSolver {
public:
    CoordinateSolver(const Dataset& d, const PenaltySpec& spec, const SolverOptions& opt)
        : spec_(spec), opt_(opt), family_(d.family()), y_(d.y()), n_(d.n()), p_(d.p()) {
        xmean_ = d.x().colwise().mean().transpose();
        xc_ = d.x().rowwise() - xmean_.transpose();
        beta_ = Vector::Zero(p_);
        in_set_.assign(static_cast<std::size_t>(p_), 0);
        xv_ = Vector::Zero(p_);
        xv_fresh_.assign(static_cast<std::size_t>(p_), 0);
        w_ = Vector::Ones(n_);
        if (family_ == Family::gaussian) {
            b0_ = y_.mean();
            r_ = y_.array() - b0_;
        } else {
            const double ybar = std::clamp(y_.mean(), 1e-6, 1.0 - 1e-6);
            b0_ = std::log(ybar / (1.0 - ybar));
            r_ = Vector::Zero(n_);
        }
        sumw_ = static_cast<double>(n_);
    }

    // Solves at `lambda`, warm-started from the current state; `prev` is the
    // previous lambda on the path (for strong-rule screening).
    bool solve(double lambda, double prev) {
        sweeps_ = 0;
        return family_ == Family::gaussian ? solve_quadratic(lambda, prev) : solve_irls(lambda, prev);
    }

    // (1/n) X_c' (y - mu): the negative loss gradient on the current state.
    Vector score() const {
        if (family_ == Family::gaussian) return xc_.transpose() * r_ / static_cast<double>(n_);
        const Vector mu = (eta()).unaryExpr([](double e) { return sigmoid(e); });
        return xc_.transpose() * (y_ - mu) / static_cast<double>(n_);
    }

    Vector eta() const { return xbeta(beta_).array() + b0_; }
    const Vector& beta() const { return beta_; }
    double raw_intercept() const { return b0_ - xmean_.dot(beta_); }
    int sweeps() const { return sweeps_; }

private:
    // X_c beta over the nonzero coefficients only.
    Vector xbeta(const Vector& beta) const {
        Vector e = Vector::Zero(n_);
        for (Index j = 0; j < p_; ++j)
            if (beta[j] != 0.0) e.noalias() += beta[j] * xc_.col(j);
        return e;
    }

    double threshold(Index j, double lambda) const {
        return spec_.weights[j] == 0.0 ? 0.0 : lambda * spec_.weights[j];
    }

    double column_moment(Index j) {
        if (!xv_fresh_[static_cast<std::size_t>(j)]) {
            xv_[j] = (w_.array() * xc_.col(j).array().square()).sum() / static_cast<double>(n_);
            xv_fresh_[static_cast<std::size_t>(j)] = 1;
        }
        return xv_[j];
    }

    double update_coordinate(Index j, double lambda) {
        const double v = column_moment(j);
        if (v <= 1e-14) return 0.0;
        const double old = beta_[j];
        const double g = (w_.array() * xc_.col(j).array() * r_.array()).sum() / static_cast<double>(n_);
        const double u = g + v * old;
        const double t = threshold(j, lambda);
        double b = spec_.norm == Norm::l1 ? soft_threshold(u, t) / v : u / (v + t);
        if (!std::isfinite(b)) b = 0.0;
        b = std::max(b, spec_.lower_bounds[j]);
        if (b == old) return 0.0;
        r_ -= (b - old) * xc_.col(j);
        beta_[j] = b;
        return std::sqrt(v) * std::abs(b - old);
    }

    double update_intercept() {
        const double delta = w_.dot(r_) / sumw_;
        if (delta == 0.0) return 0.0;
        b0_ += delta;
        r_.array() -= delta;
        return std::sqrt(sumw_ / static_cast<double>(n_)) * std::abs(delta);
    }

    double sweep(const std::vector<Index>& set, double lambda) {
        double change = 0.0;
        for (Index j : set) change = std::max(change, update_coordinate(j, lambda));
        change = std::max(change, update_intercept());
        ++sweeps_;
        return change;
    }

    // Direct solve of the weighted least-squares subproblem on `active` with the
    // current signs held fixed. Accepted only if every sign and bound survives.
    bool polish(const std::vector<Index>& active, double lambda) {
        const auto a = static_cast<Index>(active.size());
        if (a == 0 || a + 1 >= n_) return false;
        Matrix m(n_, a + 1);
        m.col(0).setOnes();
        for (Index k = 0; k < a; ++k) m.col(k + 1) = xc_.col(active[static_cast<std::size_t>(k)]);
        const Vector z = eta() + r_;
        const Matrix mw = m.transpose() * w_.asDiagonal();
        Matrix lhs = mw * m / static_cast<double>(n_);
        Vector rhs = mw * z / static_cast<double>(n_);
        for (Index k = 0; k < a; ++k) {
            const Index j = active[static_cast<std::size_t>(k)];
            const double t = threshold(j, lambda);
            if (spec_.norm == Norm::l1)
                rhs[k + 1] -= t * (beta_[j] > 0.0 ? 1.0 : -1.0);
            else
                lhs(k + 1, k + 1) += t;
        }
        const Eigen::LLT<Matrix> llt(lhs);
        if (llt.info() != Eigen::Success) return false;
        const Vector theta = llt.solve(rhs);
        if (!theta.allFinite()) return false;
        for (Index k = 0; k < a; ++k) {
            const Index j = active[static_cast<std::size_t>(k)];
            const double b = theta[k + 1];
            if (spec_.norm == Norm::l1 && spec_.weights[j] != 0.0 && (b > 0.0) != (beta_[j] > 0.0)) return false;
            if (b == 0.0 || b < spec_.lower_bounds[j]) return false;
        }
        b0_ = theta[0];
        for (Index k = 0; k < a; ++k) beta_[active[static_cast<std::size_t>(k)]] = theta[k + 1];
        r_ = z - eta();
        return true;
    }

    // Coordinate descent restricted to `set`; active-set cycling between full
    // passes, with a few direct polish attempts when the cycling stalls.
    bool descend(const std::vector<Index>& set, double lambda, double tolerance) {
        int polishes = 0;
        while (sweeps_ < opt_.max_sweeps) {
            if (sweep(set, lambda) < tolerance) return true;
            if (!opt_.active_set) continue;
            std::vector<Index> active;
            for (Index j : set)
                if (beta_[j] != 0.0) active.push_back(j);
            int local = 0;
            while (sweeps_ < opt_.max_sweeps) {
                if (sweep(active, lambda) < tolerance) break;
                if (++local % kPolishAfter == 0 && polishes < kMaxPolish) {
                    ++polishes;
                    polish(active, lambda);
                }
            }
        }
        return false;
    }
    bool descend(const std::vector<Index>& set, double lambda) { return descend(set, lambda, opt_.tolerance); }

    // Working-gradient KKT screen for coordinates outside the current set.
    bool violates(Index j, double g, double lambda) const {
        const double t = threshold(j, lambda);
        if (spec_.lower_bounds[j] == 0.0) return g > t;
        return std::abs(g) > t;
    }

    std::vector<Index> initial_set(double lambda, double prev) {
        std::vector<Index> set;
        if (!opt_.active_set || spec_.norm == Norm::l2) {
            for (Index j = 0; j < p_; ++j) set.push_back(j);
            std::fill(in_set_.begin(), in_set_.end(), 1);
            return set;
        }
        std::fill(in_set_.begin(), in_set_.end(), 0);
        const Vector g = working_gradient();
        const double cut = std::isfinite(prev) ? 2.0 * lambda - prev : lambda;
        for (Index j = 0; j < p_; ++j) {
            const bool keep = beta_[j] != 0.0 || spec_.weights[j] == 0.0 || violates(j, g[j], std::max(cut, 0.0));
            if (keep) {
                set.push_back(j);
                in_set_[static_cast<std::size_t>(j)] = 1;
            }
        }
        return set;
    }

    Vector working_gradient() const {
        return xc_.transpose() * (w_.array() * r_.array()).matrix() / static_cast<double>(n_);
    }

    // Adds coordinates outside the current set that violate the optimality
    // conditions at the current state; returns false when there are none.
    bool add_violators(std::vector<Index>& set, double lambda) {
        if (static_cast<Index>(set.size()) == p_) return false;
        const Vector g = working_gradient();
        bool added = false;
        for (Index j = 0; j < p_; ++j) {
            if (in_set_[static_cast<std::size_t>(j)]) continue;
            if (violates(j, g[j], lambda)) {
                in_set_[static_cast<std::size_t>(j)] = 1;
                added = true;
            }
        }
        if (!added) return false;
        set.clear();
        for (Index j = 0; j < p_; ++j)
            if (in_set_[static_cast<std::size_t>(j)]) set.push_back(j);
        return true;
    }

    bool solve_weighted(double lambda, double prev) {
        std::vector<Index> set = initial_set(lambda, prev);
        for (;;) {
            if (!descend(set, lambda)) return false;
            if (!add_violators(set, lambda)) return true;
        }
    }

    bool solve_quadratic(double lambda, double prev) {
        for (Index j = 0; j < p_; ++j) column_moment(j);
        return solve_weighted(lambda, prev);
    }

    double objective(double lambda, const Vector& beta, double b0) const {
        const Vector e = xbeta(beta).array() + b0;
        return binomial_nll(y_, e) / static_cast<double>(n_) + penalty_value(spec_, lambda, beta);
    }

    void set_working_response() {
        const Vector e = eta();
        for (Index i = 0; i < n_; ++i) {
            const double mu = sigmoid(e[i]);
            const double w = std::max(mu * (1.0 - mu), kMinWeight);
            w_[i] = w;
            r_[i] = (y_[i] - mu) / w;
        }
        if (!w_.allFinite() || !r_.allFinite()) throw NumericalError("non-finite IRLS working weights");
        sumw_ = w_.sum();
        std::fill(xv_fresh_.begin(), xv_fresh_.end(), 0);
    }

    // IRLS on a fixed coordinate set; leaves the working response at the final iterate.
    bool irls_on(const std::vector<Index>& set, double lambda) {
        double obj = objective(lambda, beta_, b0_);
        // inexact Newton: inner solves tighten with the outer step size
        double inner_tol = 1e-3;
        for (int it = 0; it < opt_.max_irls; ++it) {
            const Vector old_beta = beta_;
            const double old_b0 = b0_;
            if (it > 0) set_working_response();
            const bool inner_ok = descend(set, lambda, inner_tol);
            double new_obj = objective(lambda, beta_, b0_);
            for (int h = 0; h < 20 && new_obj > obj + 1e-12 * std::abs(obj); ++h) {
                beta_ = 0.5 * (beta_ + old_beta);
                b0_ = 0.5 * (b0_ + old_b0);
                new_obj = objective(lambda, beta_, b0_);
            }
            obj = new_obj;
            double change = std::abs(b0_ - old_b0) * std::sqrt(sumw_ / static_cast<double>(n_));
            for (Index j : set) {
                if (beta_[j] != old_beta[j])
                    change = std::max(change, std::sqrt(column_moment(j)) * std::abs(beta_[j] - old_beta[j]));
            }
            if (!inner_ok) {
                set_working_response();
                return false;
            }
            if (change < kIrlsTolerance && inner_tol <= opt_.tolerance) {
                set_working_response();
                return true;
            }
            inner_tol = std::max(opt_.tolerance, std::min(inner_tol, 1e-2 * change));
        }
        set_working_response();
        return false;
    }

    // Strong-rule screening once per lambda, IRLS on the screened set, then a
    // KKT check on the full score.
    bool solve_irls(double lambda, double prev) {
        set_working_response();
        std::vector<Index> set = initial_set(lambda, prev);
        for (;;) {
            if (!irls_on(set, lambda)) return false;
            if (!add_violators(set, lambda)) return true;
        }
    }

    const PenaltySpec& spec_;
    SolverOptions opt_;
    Family family_;
    Vector y_;
    Index n_;
    Index p_;
    Matrix xc_;
    Vector xmean_;
    Vector beta_;
    double b0_ = 0.0;
    Vector r_;
    Vector w_;
    double sumw_ = 0.0;
    Vector xv_;
    std::vector<char> xv_fresh_;
    std::vector<char> in_set_;
    int sweeps_ = 0;
};

}  // namespace

PenaltySpec PenaltySpec::lasso(Index p) {
    return {Vector::Ones(p), Vector::Constant(p, -kInf), Norm::l1};
}

PenaltySpec PenaltySpec::nonnegative_lasso(Index p) {
    return {Vector::Ones(p), Vector::Zero(p), Norm::l1};
}

PenaltySpec PenaltySpec::ridge(Index p) {
    return {Vector::Ones(p), Vector::Constant(p, -kInf), Norm::l2};
}

void PenaltySpec::validate(Index p) const {
    if (weights.size() != p || lower_bounds.size() != p)
        throw UsageError("penalty spec length does not match the number of covariates");
    for (Index j = 0; j < p; ++j) {
        if (!std::isfinite(weights[j]) || weights[j] < 0.0)
            throw UsageError("penalty weights must be finite and nonnegative");
        if (!(lower_bounds[j] == 0.0 || lower_bounds[j] == -kInf))
            throw UsageError("lower bounds must be 0 or -infinity");
        if (norm == Norm::l2 && lower_bounds[j] == 0.0)
            throw UsageError("the L2 penalty does not support lower bounds");
    }
}

double default_lambda_ratio(const Dataset& d) { return d.n() > d.p() ? 1e-4 : 1e-2; }

LambdaPath lambda_path(const Dataset& d, const PenaltySpec& spec, int n_lambda, std::optional<double> ratio) {
    spec.validate(d.p());
    if (n_lambda < 1) throw UsageError("n_lambda must be positive");
    if (!(spec.weights.array() > 0.0).any()) throw UsageError("lambda path needs at least one penalized coefficient");
    const double r = ratio.value_or(default_lambda_ratio(d));
    if (!(r > 0.0 && r <= 1.0)) throw UsageError("lambda ratio must lie in (0, 1]");

    SolverOptions opt;
    CoordinateSolver solver(d, spec, opt);
    solver.solve(kInf, kInf);
    const Vector g = solver.score();

    double lmax = 0.0;
    for (Index j = 0; j < d.p(); ++j) {
        if (spec.weights[j] == 0.0) continue;
        const double s = spec.lower_bounds[j] == 0.0 ? std::max(g[j], 0.0) : std::abs(g[j]);
        lmax = std::max(lmax, s / spec.weights[j]);
    }
    if (spec.norm == Norm::l2) {
        // ridge shrinkage does not scale with the response, so the anchor is taken on a unit-variance y
        if (d.family() == Family::gaussian) {
            const double sd_y = std::sqrt((d.y().array() - d.y().mean()).square().mean());
            lmax = sd_y > 0.0 ? lmax / sd_y : 0.0;
        }
        lmax *= 1000.0;
    }
    if (!(lmax > 0.0)) lmax = kLambdaFloor;

    LambdaPath path;
    path.lambda_max = lmax;
    path.ratio = r;
    path.values.resize(static_cast<std::size_t>(n_lambda));
    for (int k = 0; k < n_lambda; ++k) {
        const double frac = n_lambda == 1 ? 0.0 : static_cast<double>(k) / (n_lambda - 1);
        path.values[static_cast<std::size_t>(k)] = lmax * std::exp(frac * std::log(r));
    }
    path.values.front() = lmax;
    return path;
}

PathFit solve_path(const Dataset& d, const PenaltySpec& spec, std::span<const double> lambdas,
                   const SolverOptions& options) {
    spec.validate(d.p());
    for (std::size_t k = 0; k < lambdas.size(); ++k) {
        if (!(lambdas[k] >= 0.0)) throw UsageError("lambda values must be nonnegative");
        if (k > 0 && lambdas[k] > lambdas[k - 1]) throw UsageError("lambda sequence must be non-increasing");
    }
    CoordinateSolver solver(d, spec, options);
    PathFit fit;
    const auto m = static_cast<Index>(lambdas.size());
    fit.lambdas.assign(lambdas.begin(), lambdas.end());
    fit.coefficients = Matrix::Zero(d.p(), m);
    fit.intercepts = Vector::Zero(m);
    fit.df.assign(static_cast<std::size_t>(m), 0);
    fit.converged.assign(static_cast<std::size_t>(m), false);

    double prev = kInf;
    for (Index k = 0; k < m; ++k) {
        const double lambda = lambdas[static_cast<std::size_t>(k)];
        const bool ok = solver.solve(lambda, prev);
        prev = lambda;
        fit.coefficients.col(k) = solver.beta();
        fit.intercepts[k] = solver.raw_intercept();
        fit.df[static_cast<std::size_t>(k)] = static_cast<int>((solver.beta().array() != 0.0).count());
        fit.converged[static_cast<std::size_t>(k)] = ok;
        if (!ok) warn("solve_path: no convergence at lambda=" + std::to_string(lambda));
    }
    return fit;
}

PathFit solve_path(const Dataset& d, const PenaltySpec& spec, const LambdaPath& path, const SolverOptions& options) {
    return solve_path(d, spec, std::span<const double>(path.values), options);
}

namespace {

// Weighted ridge step: minimizes (1/2n) sum w (z - b0 - x'b)^2 + (lambda/2)|b|^2.
LinearFit weighted_ridge(const Matrix& x, const Vector& z, const Vector& w, double lambda) {
    const Index n = x.rows();
    const Index p = x.cols();
    const double sw = w.sum();
    const Vector xbar = (x.transpose() * w) / sw;
    const double zbar = w.dot(z) / sw;
    const Matrix a = x.rowwise() - xbar.transpose();
    const Vector zc = z.array() - zbar;
    const double c = static_cast<double>(n) * lambda;
    LinearFit f;
    if (p < n) {
        Matrix gram = a.transpose() * w.asDiagonal() * a;
        gram.diagonal().array() += c;
        Eigen::LDLT<Matrix> ldlt(gram);
        if (ldlt.info() != Eigen::Success || !(ldlt.vectorD().array() > 1e-12 * std::max(1.0, gram.diagonal().maxCoeff())).all())
            throw NumericalError("ridge system is singular");
        f.coefficients = ldlt.solve(a.transpose() * (w.array() * zc.array()).matrix());
    } else {
        if (!(c > 0.0)) throw NumericalError("ridge with lambda=0 is singular when p >= n");
        Matrix k = w.asDiagonal() * (a * a.transpose());
        k.diagonal().array() += c;
        f.coefficients = a.transpose() * k.partialPivLu().solve((w.array() * zc.array()).matrix());
    }
    f.intercept = zbar - xbar.dot(f.coefficients);
    return f;
}

}  // namespace

LinearFit ridge_fit(const Dataset& d, double lambda) {
    if (!(lambda >= 0.0)) throw UsageError("ridge lambda must be nonnegative");
    if (d.family() == Family::gaussian) return weighted_ridge(d.x(), d.y(), Vector::Ones(d.n()), lambda);

    const PenaltySpec spec = PenaltySpec::ridge(d.p());
    const double ybar = std::clamp(d.y().mean(), 1e-6, 1.0 - 1e-6);
    LinearFit f{Vector::Zero(d.p()), std::log(ybar / (1.0 - ybar))};
    double obj = penalized_objective(d, spec, lambda, f.coefficients, f.intercept);
    for (int it = 0; it < 100; ++it) {
        const Vector eta = linear_predictor(d.x(), f.coefficients, f.intercept);
        Vector w(d.n()), z(d.n());
        for (Index i = 0; i < d.n(); ++i) {
            const double mu = sigmoid(eta[i]);
            w[i] = std::max(mu * (1.0 - mu), kMinWeight);
            z[i] = eta[i] + (d.y()[i] - mu) / w[i];
        }
        LinearFit next = weighted_ridge(d.x(), z, w, lambda);
        double next_obj = penalized_objective(d, spec, lambda, next.coefficients, next.intercept);
        for (int h = 0; h < 30 && next_obj > obj; ++h) {
            next.coefficients = 0.5 * (next.coefficients + f.coefficients);
            next.intercept = 0.5 * (next.intercept + f.intercept);
            next_obj = penalized_objective(d, spec, lambda, next.coefficients, next.intercept);
        }
        const double change = std::max((next.coefficients - f.coefficients).cwiseAbs().maxCoeff(),
                                       std::abs(next.intercept - f.intercept));
        f = std::move(next);
        obj = next_obj;
        if (change < 1e-12) return f;
    }
    warn("ridge_fit: IRLS reached the iteration cap");
    return f;
}

Vector linear_predictor(const Matrix& x, const Vector& beta, double intercept) {
    return (x * beta).array() + intercept;
}

double penalized_objective(const Dataset& d, const PenaltySpec& spec, double lambda, const Vector& beta,
                           double intercept) {
    const Vector eta = linear_predictor(d.x(), beta, intercept);
    const double n = static_cast<double>(d.n());
    const double loss = d.family() == Family::gaussian ? 0.5 * (d.y() - eta).squaredNorm() / n
                                                       : binomial_nll(d.y(), eta) / n;
    return loss + penalty_value(spec, lambda, beta);
}

double kkt_violation(const Dataset& d, const PenaltySpec& spec, double lambda, const Vector& beta,
                     double intercept) {
    const Vector eta = linear_predictor(d.x(), beta, intercept);
    Vector resid = d.y() - eta;
    if (d.family() == Family::binomial) resid = d.y() - eta.unaryExpr([](double e) { return sigmoid(e); });
    const double n = static_cast<double>(d.n());
    const Vector g = d.x().transpose() * resid / n;
    double worst = std::abs(resid.sum()) / n;
    for (Index j = 0; j < d.p(); ++j) {
        const double t = spec.weights[j] == 0.0 ? 0.0 : lambda * spec.weights[j];
        double v = 0.0;
        if (spec.norm == Norm::l2) {
            v = std::abs(g[j] - t * beta[j]);
        } else if (beta[j] != 0.0 && beta[j] > spec.lower_bounds[j]) {
            v = std::abs(g[j] - t * (beta[j] > 0 ? 1.0 : -1.0));
        } else if (spec.lower_bounds[j] == 0.0) {
            v = std::max(0.0, g[j] - t);
        } else {
            v = std::max(0.0, std::abs(g[j]) - t);
        }
        worst = std::max(worst, v);
    }
    return worst;
}

}  // namespace garrote
