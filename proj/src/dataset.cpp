#include "garrote/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <mutex>
#include <numeric>
#include <random>
#include <sstream>

namespace garrote {

std::string_view to_string(Family f) {
    return f == Family::gaussian ? "gaussian" : "binomial";
}

Family family_from_string(std::string_view s) {
    if (s == "gaussian") return Family::gaussian;
    if (s == "binomial") return Family::binomial;
    throw UsageError("unknown family '" + std::string(s) + "'");
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

namespace {
std::mutex warnings_mutex;
std::vector<std::string> warnings;
}  // namespace

void warn(std::string message) {
    std::lock_guard lock(warnings_mutex);
    warnings.push_back(std::move(message));
}

std::vector<std::string> take_warnings() {
    std::lock_guard lock(warnings_mutex);
    return std::exchange(warnings, {});
}

Dataset::Dataset(Matrix x, Vector y, std::vector<std::string> names, Family family)
    : x_(std::move(x)), y_(std::move(y)), names_(std::move(names)), family_(family) {
    if (x_.rows() != y_.size())
        throw UsageError("design has " + std::to_string(x_.rows()) + " rows but response has " +
                         std::to_string(y_.size()));
    if (x_.rows() < 2) throw UsageError("dataset needs at least 2 observations");
    if (x_.cols() < 1) throw UsageError("dataset needs at least 1 covariate");
    if (names_.empty()) {
        for (Index j = 0; j < x_.cols(); ++j) names_.push_back("x" + std::to_string(j + 1));
    }
    if (static_cast<Index>(names_.size()) != x_.cols())
        throw UsageError("column name count does not match design width");
    if (!x_.allFinite() || !y_.allFinite()) throw UsageError("dataset contains missing or non-finite values");
    if (family_ == Family::binomial) {
        for (Index i = 0; i < y_.size(); ++i)
            if (y_[i] != 0.0 && y_[i] != 1.0)
                throw UsageError("binomial response must be 0 or 1 (row " + std::to_string(i + 1) + ")");
    }
}

Dataset Dataset::rows(const std::vector<Index>& idx) const {
    Matrix xs(static_cast<Index>(idx.size()), p());
    Vector ys(static_cast<Index>(idx.size()));
    for (std::size_t r = 0; r < idx.size(); ++r) {
        xs.row(static_cast<Index>(r)) = x_.row(idx[r]);
        ys[static_cast<Index>(r)] = y_[idx[r]];
    }
    return Dataset(std::move(xs), std::move(ys), names_, family_);
}

Dataset Dataset::columns(const std::vector<Index>& idx) const {
    Matrix xs(n(), static_cast<Index>(idx.size()));
    std::vector<std::string> nm;
    nm.reserve(idx.size());
    for (std::size_t c = 0; c < idx.size(); ++c) {
        xs.col(static_cast<Index>(c)) = x_.col(idx[c]);
        nm.push_back(names_[static_cast<std::size_t>(idx[c])]);
    }
    return Dataset(std::move(xs), y_, std::move(nm), family_);
}

Dataset Dataset::with_x(Matrix x, std::vector<std::string> names) const {
    return Dataset(std::move(x), y_, std::move(names), family_);
}

std::pair<Dataset, StandardizationRecord> standardize(const Dataset& d, SdDenominator denominator) {
    const double n = static_cast<double>(d.n());
    const double dof = denominator == SdDenominator::sample ? n - 1.0 : n;
    StandardizationRecord rec;
    rec.center_x = d.x().colwise().mean().transpose();
    Matrix xs = d.x().rowwise() - rec.center_x.transpose();
    rec.scale = (xs.colwise().squaredNorm().array() / dof).sqrt().transpose();
    for (Index j = 0; j < d.p(); ++j) {
        if (!(rec.scale[j] > 0.0))
            throw UsageError("column '" + d.names()[static_cast<std::size_t>(j)] + "' has zero variance");
    }
    xs.array().rowwise() /= rec.scale.transpose().array();
    Vector ys = d.y();
    if (d.family() == Family::gaussian) {
        rec.center_y = ys.mean();
        rec.y_centered = true;
        ys.array() -= rec.center_y;
    }
    return {Dataset(std::move(xs), std::move(ys), d.names(), d.family()), rec};
}

Dataset StandardizationRecord::invert(const Dataset& s) const {
    Matrix x = s.x();
    x.array().rowwise() *= scale.transpose().array();
    x.rowwise() += center_x.transpose();
    Vector y = s.y();
    if (y_centered) y.array() += center_y;
    return Dataset(std::move(x), std::move(y), s.names(), s.family());
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    bool quoted = false;
    for (char c : line) {
        if (c == '"') {
            quoted = !quoted;
        } else if (c == ',' && !quoted) {
            out.push_back(cell);
            cell.clear();
        } else if (c != '\r') {
            cell.push_back(c);
        }
    }
    out.push_back(cell);
    for (auto& s : out) {
        const auto b = s.find_first_not_of(" \t");
        const auto e = s.find_last_not_of(" \t");
        s = b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    }
    return out;
}

double parse_number(const std::string& cell, std::size_t line_no, const std::string& column) {
    double v = 0.0;
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    if (!cell.empty() && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (cell.empty() || ec != std::errc() || ptr != last)
        throw UsageError("non-numeric cell '" + cell + "' at line " + std::to_string(line_no) +
                         ", column '" + column + "'");
    return v;
}

}  // namespace

Dataset load_csv(const std::filesystem::path& path, const std::string& response, Family family) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open data file '" + path.string() + "'");

    std::string line;
    if (!std::getline(in, line)) throw UsageError("data file '" + path.string() + "' is empty");
    if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
    const auto header = split_csv_line(line);
    const auto it = response.empty() ? header.end() - 1 : std::find(header.begin(), header.end(), response);
    if (it == header.end())
        throw UsageError("response column '" + response + "' not found in '" + path.string() + "'");
    const auto resp_col = static_cast<std::size_t>(it - header.begin());

    std::vector<std::vector<double>> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto cells = split_csv_line(line);
        if (cells.size() != header.size())
            throw UsageError("line " + std::to_string(line_no) + " has " + std::to_string(cells.size()) +
                             " cells, expected " + std::to_string(header.size()));
        std::vector<double> r(cells.size());
        for (std::size_t c = 0; c < cells.size(); ++c) r[c] = parse_number(cells[c], line_no, header[c]);
        rows.push_back(std::move(r));
    }

    const auto n = static_cast<Index>(rows.size());
    const auto p = static_cast<Index>(header.size()) - 1;
    Matrix x(n, p);
    Vector y(n);
    std::vector<std::string> names;
    for (std::size_t c = 0; c < header.size(); ++c)
        if (c != resp_col) names.push_back(header[c]);
    for (Index i = 0; i < n; ++i) {
        const auto& r = rows[static_cast<std::size_t>(i)];
        Index j = 0;
        for (std::size_t c = 0; c < r.size(); ++c) {
            if (c == resp_col)
                y[i] = r[c];
            else
                x(i, j++) = r[c];
        }
    }
    return Dataset(std::move(x), std::move(y), std::move(names), family);
}

Dataset prepare_bodyfat(const Dataset& d) {
    if (d.n() != 252)
        throw UsageError("body-fat preparation expects the 252-row file, got " + std::to_string(d.n()) + " rows");
    std::vector<Index> keep;
    for (Index i = 0; i < d.n(); ++i)
        if (i != 38 && i != 215) keep.push_back(i);
    return d.rows(keep);
}

Dataset load_prostate(const std::filesystem::path& data_dir) {
    const Dataset raw = load_csv(data_dir / "prostate.csv", "lpsa", Family::gaussian);
    std::vector<std::string> names;
    for (Index j = 0; j < raw.p(); ++j) names.push_back("x" + std::to_string(j + 1));
    return standardize(raw.with_x(raw.x(), std::move(names)), SdDenominator::population).first;
}

Dataset load_bodyfat(const std::filesystem::path& data_dir) {
    const Dataset raw = load_csv(data_dir / "bodyfat.csv", "siri", Family::gaussian);
    return standardize(prepare_bodyfat(raw), SdDenominator::population).first;
}

namespace {

Vector unscaled_truth(const SyntheticSpec& s) {
    Vector beta = Vector::Zero(s.p);
    for (Index j = 0; j < s.k_true; ++j) beta[j] = (j % 2 == 0) ? 1.0 : -1.0;
    return beta;
}

// beta' Sigma beta for the AR(1) correlation Sigma_ij = rho^|i-j|.
double ar1_quadratic_form(const Vector& beta, Index k, double rho) {
    double q = 0.0;
    for (Index i = 0; i < k; ++i)
        for (Index j = 0; j < k; ++j) q += beta[i] * beta[j] * std::pow(rho, std::abs(static_cast<double>(i - j)));
    return q;
}

}  // namespace

Vector synthetic_truth(const SyntheticSpec& s) {
    Vector beta = unscaled_truth(s);
    if (s.k_true == 0) return beta;
    const double q = ar1_quadratic_form(beta, s.k_true, s.rho);
    return beta * std::sqrt(s.snr / q);
}

Dataset make_synthetic_highdim(const SyntheticSpec& s) {
    if (s.n < 10) throw UsageError("synthetic data needs n >= 10");
    if (s.p < 1) throw UsageError("synthetic data needs p >= 1");
    if (s.k_true < 0 || s.k_true > s.p) throw UsageError("k_true must lie in [0, p]");
    if (!(s.rho >= 0.0 && s.rho < 1.0)) throw UsageError("rho must lie in [0, 1)");
    if (!(s.snr > 0.0)) throw UsageError("snr must be positive");

    std::mt19937_64 rng(s.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    const double innov = std::sqrt(1.0 - s.rho * s.rho);
    Matrix x(s.n, s.p);
    for (Index i = 0; i < s.n; ++i) {
        x(i, 0) = normal(rng);
        for (Index j = 1; j < s.p; ++j) x(i, j) = s.rho * x(i, j - 1) + innov * normal(rng);
    }
    const Vector beta = synthetic_truth(s);
    const Vector eta = x.leftCols(s.k_true) * beta.head(s.k_true);
    Vector y(s.n);
    if (s.family == Family::gaussian) {
        for (Index i = 0; i < s.n; ++i) y[i] = eta[i] + normal(rng);
    } else {
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        for (Index i = 0; i < s.n; ++i) y[i] = unif(rng) < 1.0 / (1.0 + std::exp(-eta[i])) ? 1.0 : 0.0;
    }
    std::vector<std::string> names;
    names.reserve(static_cast<std::size_t>(s.p));
    for (Index j = 0; j < s.p; ++j) names.push_back("g" + std::to_string(j + 1));
    return Dataset(std::move(x), std::move(y), std::move(names), s.family);
}

FoldAssignment assign_folds(Index n, int k, std::uint64_t seed) {
    if (k < 2) throw UsageError("fold count must be at least 2");
    if (k > n) throw UsageError("fold count " + std::to_string(k) + " exceeds sample size " + std::to_string(n));
    std::vector<Index> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), Index{0});
    std::mt19937_64 rng(seed);
    std::shuffle(perm.begin(), perm.end(), rng);
    FoldAssignment f;
    f.k = k;
    f.seed = seed;
    f.fold_of.assign(static_cast<std::size_t>(n), 0);
    for (std::size_t i = 0; i < perm.size(); ++i)
        f.fold_of[static_cast<std::size_t>(perm[i])] = static_cast<int>(i % static_cast<std::size_t>(k)) + 1;
    return f;
}

std::vector<Index> FoldAssignment::train_rows(int fold) const {
    std::vector<Index> r;
    for (std::size_t i = 0; i < fold_of.size(); ++i)
        if (fold_of[i] != fold) r.push_back(static_cast<Index>(i));
    return r;
}

std::vector<Index> FoldAssignment::test_rows(int fold) const {
    std::vector<Index> r;
    for (std::size_t i = 0; i < fold_of.size(); ++i)
        if (fold_of[i] == fold) r.push_back(static_cast<Index>(i));
    return r;
}

}  // namespace garrote
