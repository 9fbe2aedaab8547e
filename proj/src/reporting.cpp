#include "garrote/reporting.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "json.hpp"

#include "garrote/glm.hpp"
#include "garrote/serialize.hpp"

namespace garrote {

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

BlandAltman bland_altman(const Vector& a, const Vector& b) {
    if (a.size() != b.size()) throw UsageError("bland_altman: vectors differ in length");
    if (a.size() < 2) throw UsageError("bland_altman: need at least two pairs");
    const double n = static_cast<double>(a.size());
    const Vector diff = a - b;
    BlandAltman out;
    out.mean_diff = diff.mean();
    out.sd_diff = std::sqrt((diff.array() - out.mean_diff).square().sum() / (n - 1.0));
    out.loa = {out.mean_diff - 2.0 * out.sd_diff, out.mean_diff + 2.0 * out.sd_diff};
    const double half = 1.96 * out.sd_diff / std::sqrt(n);
    out.ci_mean = {out.mean_diff - half, out.mean_diff + half};
    out.points.reserve(static_cast<std::size_t>(a.size()));
    for (Index i = 0; i < a.size(); ++i) out.points.emplace_back(0.5 * (a[i] + b[i]), diff[i]);
    return out;
}

Vector drop_one_r2(const Dataset& d) {
    if (d.family() != Family::gaussian) throw UsageError("drop_one_r2 needs a gaussian dataset");
    const FitResult full = fit_full(d);
    const double r2_full = r_squared(full, d).r2;
    const double tss = (d.y().array() - d.y().mean()).square().sum();
    Vector out(d.p());
    for (Index j = 0; j < d.p(); ++j) {
        std::vector<Index> keep;
        for (Index k = 0; k < d.p(); ++k)
            if (k != j) keep.push_back(k);
        const FitResult f = fit_subset(d, keep);
        const double rss = (d.y() - linear_predictor(d.x(), f.coefficients, f.intercept)).squaredNorm();
        out[j] = 100.0 * (r2_full - (1.0 - rss / tss)) / r2_full;
    }
    return out;
}

ComparisonTable build_comparison(const std::vector<SelectorFit>& fits, const Dataset& d,
                                 const std::vector<std::string>& labels) {
    if (!labels.empty() && labels.size() != fits.size()) throw UsageError("one label per fit is required");
    ComparisonTable t;
    t.variables = d.names();
    t.coefficients = Matrix::Zero(d.p(), static_cast<Index>(fits.size()));
    const double tss = (d.y().array() - d.y().mean()).square().sum();
    for (std::size_t m = 0; m < fits.size(); ++m) {
        const SelectorFit& f = fits[m];
        if (f.coefficients.size() != d.p()) throw UsageError("fit does not match the dataset");
        t.methods.push_back(labels.empty() ? f.method : labels[m]);
        t.coefficients.col(static_cast<Index>(m)) = f.coefficients;
        const int k = static_cast<int>((f.coefficients.array() != 0.0).count());
        t.n_vars.push_back(k);
        if (d.family() == Family::gaussian && tss > 0.0) {
            const RSquared r = r_squared(d, f.coefficients, f.intercept);
            t.r2.push_back(r.r2);
            t.adj_r2.push_back(r.adj_r2);
        } else {
            t.r2.push_back(std::nan(""));
            t.adj_r2.push_back(std::nan(""));
        }
    }
    return t;
}

namespace {

std::string cell(double v, bool markers) {
    if (markers) return v != 0.0 ? "x" : "-";
    std::ostringstream os;
    os << std::fixed << std::setprecision(3) << v;
    return os.str();
}

std::string fixed3(double v) {
    if (std::isnan(v)) return "NA";
    std::ostringstream os;
    os << std::fixed << std::setprecision(3) << v;
    return os.str();
}

std::ofstream open_out(const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream os(path);
    if (!os) throw UsageError("cannot write " + path.string());
    return os;
}

void write_json(const nlohmann::json& j, const std::filesystem::path& path) {
    auto os = open_out(path);
    os << j.dump(2) << '\n';
}

}  // namespace

std::string ComparisonTable::render_text(bool markers) const {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> header{"variable"};
    header.insert(header.end(), methods.begin(), methods.end());
    rows.push_back(header);
    for (std::size_t v = 0; v < variables.size(); ++v) {
        std::vector<std::string> r{variables[v]};
        for (std::size_t m = 0; m < methods.size(); ++m)
            r.push_back(cell(coefficients(static_cast<Index>(v), static_cast<Index>(m)), markers));
        rows.push_back(r);
    }
    std::vector<std::string> nv{"# variables"}, r2r{"R2"}, ar2{"adj R2"};
    for (std::size_t m = 0; m < methods.size(); ++m) {
        nv.push_back(std::to_string(n_vars[m]));
        r2r.push_back(fixed3(r2[m]));
        ar2.push_back(fixed3(adj_r2[m]));
    }
    rows.push_back(nv);
    rows.push_back(r2r);
    rows.push_back(ar2);

    std::vector<std::size_t> width(header.size(), 0);
    for (const auto& r : rows)
        for (std::size_t c = 0; c < r.size(); ++c) width[c] = std::max(width[c], r[c].size());
    std::ostringstream os;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (i == rows.size() - 3) {
            for (std::size_t c = 0; c < width.size(); ++c) os << std::string(width[c], '-') << (c + 1 < width.size() ? "  " : "");
            os << '\n';
        }
        for (std::size_t c = 0; c < rows[i].size(); ++c) {
            if (c == 0)
                os << std::left << std::setw(static_cast<int>(width[c])) << rows[i][c];
            else
                os << "  " << std::right << std::setw(static_cast<int>(width[c])) << rows[i][c];
        }
        os << '\n';
    }
    return os.str();
}

std::string ComparisonTable::to_csv(bool markers) const {
    std::ostringstream os;
    os << "variable";
    for (const auto& m : methods) os << ',' << m;
    os << '\n';
    for (std::size_t v = 0; v < variables.size(); ++v) {
        os << variables[v];
        for (std::size_t m = 0; m < methods.size(); ++m) {
            const double c = coefficients(static_cast<Index>(v), static_cast<Index>(m));
            os << ',' << (markers ? cell(c, true) : format_double(c));
        }
        os << '\n';
    }
    os << "n_vars";
    for (int k : n_vars) os << ',' << k;
    os << "\nr2";
    for (double r : r2) os << ',' << format_double(r);
    os << "\nadj_r2";
    for (double r : adj_r2) os << ',' << format_double(r);
    os << '\n';
    return os.str();
}

Format format_from_string(std::string_view s) {
    if (s == "csv") return Format::csv;
    if (s == "json") return Format::json;
    throw UsageError("unknown format '" + std::string(s) + "' (expected csv or json)");
}

void emit_plot_data(const BlandAltman& ba, const std::filesystem::path& path, Format format) {
    if (format == Format::json) return write_json(ba, path);
    auto os = open_out(path);
    os << "# mean_diff," << format_double(ba.mean_diff) << '\n'
       << "# sd_diff," << format_double(ba.sd_diff) << '\n'
       << "# loa," << format_double(ba.loa.first) << ',' << format_double(ba.loa.second) << '\n'
       << "# ci_mean," << format_double(ba.ci_mean.first) << ',' << format_double(ba.ci_mean.second) << '\n'
       << "mean,diff\n";
    for (const auto& [m, dlt] : ba.points) os << format_double(m) << ',' << format_double(dlt) << '\n';
}

void emit_plot_data(const CVResult& cv, const std::filesystem::path& path, Format format) {
    if (format == Format::json) return write_json(cv, path);
    auto os = open_out(path);
    std::vector<std::string> keys;
    if (!cv.grid.empty())
        for (const auto& [k, v] : cv.grid.front()) keys.push_back(k);
    for (const auto& k : keys) os << k << ',';
    os << "mean_loss,se_loss,is_opt,is_1se\n";
    for (std::size_t i = 0; i < cv.grid.size(); ++i) {
        for (const auto& k : keys) os << format_double(cv.grid[i].at(k)) << ',';
        os << format_double(cv.mean_loss[i]) << ',' << format_double(cv.se_loss[i]) << ','
           << (i == cv.idx_opt ? 1 : 0) << ',' << (i == cv.idx_1se ? 1 : 0) << '\n';
    }
}

void emit_plot_data(const PathFit& path_fit, const std::vector<std::string>& names, const std::filesystem::path& path,
                    Format format) {
    if (format == Format::json) {
        nlohmann::json j = path_fit;
        j["names"] = names;
        return write_json(j, path);
    }
    auto os = open_out(path);
    os << "lambda,intercept,df";
    for (const auto& n : names) os << ',' << n;
    os << '\n';
    for (Index k = 0; k < path_fit.size(); ++k) {
        os << format_double(path_fit.lambdas[static_cast<std::size_t>(k)]) << ','
           << format_double(path_fit.intercepts[k]) << ',' << path_fit.df[static_cast<std::size_t>(k)];
        for (Index j = 0; j < path_fit.coefficients.rows(); ++j) os << ',' << format_double(path_fit.coefficients(j, k));
        os << '\n';
    }
}

void emit_plot_data(const BootstrapSummary& bs, const std::vector<std::string>& names,
                    const std::filesystem::path& path, Format format) {
    if (format == Format::json) {
        nlohmann::json j = bs;
        j["names"] = names;
        return write_json(j, path);
    }
    auto os = open_out(path);
    if (bs.draws.size() == 0) {
        os << "variable,mean_est,se,nonzero_prop\n";
        for (std::size_t j = 0; j < names.size(); ++j) {
            const auto jj = static_cast<Index>(j);
            os << names[j] << ',' << format_double(bs.mean_est[jj]) << ',' << format_double(bs.se[jj]) << ','
               << format_double(bs.nonzero_prop[jj]) << '\n';
        }
        return;
    }
    os << "replicate";
    for (const auto& n : names) os << ',' << n;
    os << '\n';
    for (Index b = 0; b < bs.draws.rows(); ++b) {
        os << b + 1;
        for (Index j = 0; j < bs.draws.cols(); ++j) os << ',' << format_double(bs.draws(b, j));
        os << '\n';
    }
}

}  // namespace garrote
