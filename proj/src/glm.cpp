#include "garrote/glm.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

namespace garrote {

double sigmoid(double eta) {
    if (eta >= 0) return 1.0 / (1.0 + std::exp(-eta));
    const double e = std::exp(eta);
    return e / (1.0 + e);
}

namespace {

constexpr int kMaxNewtonIterations = 100;
constexpr double kScoreTolerance = 1e-8;

Matrix with_intercept(const Matrix& x) {
    Matrix a(x.rows(), x.cols() + 1);
    a.col(0).setOnes();
    a.rightCols(x.cols()) = x;
    return a;
}

double binomial_loglik(const Vector& y, const Vector& eta) {
    double ll = 0.0;
    for (Index i = 0; i < y.size(); ++i) {
        // log(1 + exp(eta)) computed stably
        const double e = eta[i];
        const double log1pexp = e > 0 ? e + std::log1p(std::exp(-e)) : std::log1p(std::exp(e));
        ll += y[i] * e - log1pexp;
    }
    return ll;
}

FitResult fit_gaussian(const Matrix& x, const Vector& y) {
    const Index n = x.rows();
    const Index p = x.cols();
    if (n <= p) throw UsageError("least squares needs n > p (n=" + std::to_string(n) + ", p=" + std::to_string(p) + ")");
    FitResult f;
    const Vector xbar = x.colwise().mean().transpose();
    const double ybar = y.mean();
    const Matrix xc = x.rowwise() - xbar.transpose();
    const Vector yc = y.array() - ybar;

    if (p > 0) {
        Eigen::ColPivHouseholderQR<Matrix> qr(xc);
        qr.setThreshold(1e-10);
        if (qr.rank() < p) throw NumericalError("singular design in least-squares fit");
        f.coefficients = qr.solve(yc);
    } else {
        f.coefficients = Vector::Zero(0);
    }
    f.intercept = ybar - xbar.dot(f.coefficients);
    f.fitted = (xc * f.coefficients).array() + ybar;
    const double rss = (y - f.fitted).squaredNorm();
    f.df_used = p + 1;
    const double dof = static_cast<double>(n - p - 1);
    f.sigma2_hat = dof > 0 ? rss / dof : 0.0;

    f.p_values = Vector::Ones(p);
    f.cov = Matrix::Zero(p, p);
    if (p > 0) {
        const Matrix gram = xc.transpose() * xc;
        Eigen::LDLT<Matrix> ldlt(gram);
        f.cov = f.sigma2_hat * ldlt.solve(Matrix::Identity(p, p));
        f.cov = 0.5 * (f.cov + f.cov.transpose()).eval();
        if (dof > 0) {
            boost::math::students_t tdist(dof);
            for (Index j = 0; j < p; ++j) {
                const double se = std::sqrt(std::max(f.cov(j, j), 0.0));
                if (se > 0) {
                    const double t = std::abs(f.coefficients[j]) / se;
                    f.p_values[j] = std::clamp(2.0 * boost::math::cdf(boost::math::complement(tdist, t)), 0.0, 1.0);
                } else {
                    f.p_values[j] = f.coefficients[j] == 0.0 ? 1.0 : 0.0;
                }
            }
        }
    }
    return f;
}

FitResult fit_logistic(const Matrix& x, const Vector& y) {
    const Index n = x.rows();
    const Index p = x.cols();
    if (n <= p) throw UsageError("logistic maximum likelihood needs n > p");
    const Matrix a = with_intercept(x);
    Vector theta = Vector::Zero(p + 1);
    const double ybar = y.mean();
    if (ybar <= 0.0 || ybar >= 1.0) throw NumericalError("binomial response has a single class");
    theta[0] = std::log(ybar / (1.0 - ybar));

    Vector eta = a * theta;
    double ll = binomial_loglik(y, eta);
    FitResult f;
    bool converged = false;
    Matrix info;
    for (int it = 0; it < kMaxNewtonIterations; ++it) {
        Vector mu = eta.unaryExpr([](double e) { return sigmoid(e); });
        const Vector score = a.transpose() * (y - mu);
        f.iterations = it;
        if (score.cwiseAbs().maxCoeff() < kScoreTolerance) {
            converged = true;
            break;
        }
        const Vector w = mu.array() * (1.0 - mu.array());
        info = a.transpose() * w.asDiagonal() * a;
        Eigen::LDLT<Matrix> ldlt(info);
        if (ldlt.info() != Eigen::Success || !(ldlt.vectorD().array() > 1e-12).all())
            throw NumericalError("singular information matrix in logistic fit");
        Vector step = ldlt.solve(score);
        // step-halving on log-likelihood decrease
        double t = 1.0;
        for (int h = 0; h < 30; ++h) {
            const Vector cand = theta + t * step;
            const Vector cand_eta = a * cand;
            const double cand_ll = binomial_loglik(y, cand_eta);
            if (cand_ll >= ll - 1e-12 * std::abs(ll)) {
                theta = cand;
                eta = cand_eta;
                ll = cand_ll;
                break;
            }
            t *= 0.5;
        }
        if (-2.0 * ll < 1e-6 || theta.tail(p).cwiseAbs().maxCoeff() > 1e4)
            throw NumericalError("logistic fit diverges (separation)");
    }
    if (!converged) throw NumericalError("logistic fit did not converge in 100 iterations");

    const Vector mu = eta.unaryExpr([](double e) { return sigmoid(e); });
    const Vector w = mu.array() * (1.0 - mu.array());
    info = a.transpose() * w.asDiagonal() * a;
    const Matrix full_cov = info.ldlt().solve(Matrix::Identity(p + 1, p + 1));
    f.intercept = theta[0];
    f.coefficients = theta.tail(p);
    f.fitted = mu;
    f.cov = full_cov.bottomRightCorner(p, p);
    f.cov = 0.5 * (f.cov + f.cov.transpose()).eval();
    f.df_used = p + 1;
    f.p_values = Vector::Ones(p);
    boost::math::normal_distribution<double> z;
    for (Index j = 0; j < p; ++j) {
        const double se = std::sqrt(std::max(f.cov(j, j), 0.0));
        if (se > 0)
            f.p_values[j] = std::clamp(2.0 * boost::math::cdf(boost::math::complement(z, std::abs(f.coefficients[j]) / se)), 0.0, 1.0);
    }
    return f;
}

FitResult fit_matrix(const Matrix& x, const Vector& y, Family family) {
    return family == Family::gaussian ? fit_gaussian(x, y) : fit_logistic(x, y);
}

}  // namespace

FitResult fit_full(const Dataset& d) { return fit_matrix(d.x(), d.y(), d.family()); }

FitResult fit_subset(const Dataset& d, const std::vector<Index>& cols) {
    Matrix xs(d.n(), static_cast<Index>(cols.size()));
    for (std::size_t c = 0; c < cols.size(); ++c) xs.col(static_cast<Index>(c)) = d.x().col(cols[c]);
    FitResult sub = fit_matrix(xs, d.y(), d.family());
    FitResult f = sub;
    f.coefficients = Vector::Zero(d.p());
    f.p_values = Vector::Ones(d.p());
    f.cov = Matrix::Zero(d.p(), d.p());
    for (std::size_t a = 0; a < cols.size(); ++a) {
        const auto ia = static_cast<Index>(a);
        f.coefficients[cols[a]] = sub.coefficients[ia];
        f.p_values[cols[a]] = sub.p_values[ia];
        for (std::size_t b = 0; b < cols.size(); ++b) f.cov(cols[a], cols[b]) = sub.cov(ia, static_cast<Index>(b));
    }
    return f;
}

RSquared r_squared(const Dataset& d, const Vector& coefficients, double intercept) {
    if (d.family() != Family::gaussian) throw UsageError("R^2 is defined for the gaussian family only");
    const Vector fitted = (d.x() * coefficients).array() + intercept;
    const double tss = (d.y().array() - d.y().mean()).matrix().squaredNorm();
    if (tss == 0.0) throw NumericalError("total sum of squares is zero");
    const double rss = (d.y() - fitted).squaredNorm();
    const double n = static_cast<double>(d.n());
    const double k = static_cast<double>((coefficients.array() != 0.0).count());
    RSquared r;
    r.r2 = 1.0 - rss / tss;
    r.adj_r2 = n - k - 1.0 > 0 ? 1.0 - (1.0 - r.r2) * (n - 1.0) / (n - k - 1.0) : r.r2;
    return r;
}

RSquared r_squared(const FitResult& f, const Dataset& d) { return r_squared(d, f.coefficients, f.intercept); }

double deviance(const Vector& y, const Vector& mu, Family family) {
    if (y.size() != mu.size()) throw UsageError("deviance: length mismatch");
    if (family == Family::gaussian) return (y - mu).squaredNorm();
    constexpr double lo = 1e-10;
    double dev = 0.0;
    bool clamped = false;
    for (Index i = 0; i < y.size(); ++i) {
        double m = mu[i];
        if (!(m >= lo && m <= 1.0 - lo)) {
            m = std::clamp(std::isnan(m) ? 0.5 : m, lo, 1.0 - lo);
            clamped = true;
        }
        dev += y[i] * std::log(m) + (1.0 - y[i]) * std::log(1.0 - m);
    }
    if (clamped) warn("deviance: fitted probabilities clamped to [1e-10, 1-1e-10]");
    return -2.0 * dev;
}

CollinearityReport collinearity(const Dataset& d) {
    const Index n = d.n();
    const Index p = d.p();
    if (n <= p) throw UsageError("collinearity diagnostics need n > p");
    const Vector mean = d.x().colwise().mean().transpose();
    Matrix z = d.x().rowwise() - mean.transpose();
    const Vector sd = (z.colwise().squaredNorm().array() / static_cast<double>(n - 1)).sqrt().transpose();
    if (!(sd.array() > 0).all()) throw UsageError("collinearity: constant column");
    z.array().rowwise() /= sd.transpose().array();

    CollinearityReport r;
    r.vif = Vector::Ones(p);
    for (Index j = 0; j < p && p > 1; ++j) {
        Matrix others(n, p - 1);
        Index c = 0;
        for (Index k = 0; k < p; ++k)
            if (k != j) others.col(c++) = z.col(k);
        Eigen::ColPivHouseholderQR<Matrix> qr(others);
        qr.setThreshold(1e-12);
        if (qr.rank() < p - 1) throw NumericalError("collinearity: singular submatrix");
        const Vector resid = z.col(j) - others * qr.solve(z.col(j));
        const double r2 = 1.0 - resid.squaredNorm() / z.col(j).squaredNorm();
        if (!(r2 < 1.0 - 1e-14)) throw NumericalError("collinearity: column '" + d.names()[static_cast<std::size_t>(j)] + "' is an exact linear combination");
        r.vif[j] = 1.0 / (1.0 - r2);
    }
    Eigen::JacobiSVD<Matrix> svd(z);
    const Vector& s = svd.singularValues();
    r.condition_number = s[0] / s[s.size() - 1];
    return r;
}

}  // namespace garrote
