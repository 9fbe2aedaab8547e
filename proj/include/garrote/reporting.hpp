#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "garrote/inference.hpp"
#include "garrote/selectors.hpp"
#include "garrote/tuning.hpp"

namespace garrote {

struct BlandAltman {
    double mean_diff = 0.0;
    double sd_diff = 0.0;
    std::pair<double, double> loa;      // mean_diff -/+ 2 SD
    std::pair<double, double> ci_mean;  // mean_diff -/+ 1.96 SD / sqrt(n)
    std::vector<std::pair<double, double>> points;  // (mean, difference)
};

/// Differences a - b against pair means; SD uses denominator n - 1.
BlandAltman bland_altman(const Vector& a, const Vector& b);

/// Relative R2 loss 100 (R2_full - R2_without_j) / R2_full for every column, from OLS refits.
Vector drop_one_r2(const Dataset& d);

struct ComparisonTable {
    std::vector<std::string> methods;
    std::vector<std::string> variables;
    Matrix coefficients;  // variables x methods
    std::vector<int> n_vars;
    std::vector<double> r2;
    std::vector<double> adj_r2;

    /// Aligned text with x / - markers (or coefficients when markers is false).
    std::string render_text(bool markers = true) const;
    std::string to_csv(bool markers = true) const;
};

/// One column per fit. R2 is computed from each method's own fitted values.
/// `labels` overrides the column headers (defaults to each fit's method tag).
ComparisonTable build_comparison(const std::vector<SelectorFit>& fits, const Dataset& d,
                                 const std::vector<std::string>& labels = {});

enum class Format { csv, json };

Format format_from_string(std::string_view s);

/// Writes plot-ready data at full double precision.
void emit_plot_data(const BlandAltman& ba, const std::filesystem::path& path, Format format);
void emit_plot_data(const CVResult& cv, const std::filesystem::path& path, Format format);
void emit_plot_data(const PathFit& path_fit, const std::vector<std::string>& names, const std::filesystem::path& path,
                    Format format);
void emit_plot_data(const BootstrapSummary& bs, const std::vector<std::string>& names,
                    const std::filesystem::path& path, Format format);

/// Shortest round-trip decimal representation.
std::string format_double(double v);

}  // namespace garrote
