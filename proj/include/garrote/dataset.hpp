#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "garrote/common.hpp"

namespace garrote {

/// Response vector, covariate matrix and column labels for one analysis.
///
/// Construction validates the invariants (n >= 2, p >= 1, finite values,
/// binary response for the binomial family); a Dataset is immutable afterwards.
class Dataset {
public:
    Dataset(Matrix x, Vector y, std::vector<std::string> names, Family family);

    const Matrix& x() const { return x_; }
    const Vector& y() const { return y_; }
    const std::vector<std::string>& names() const { return names_; }
    Family family() const { return family_; }
    Index n() const { return x_.rows(); }
    Index p() const { return x_.cols(); }

    /// Row subset (with repetition allowed, for bootstrap resamples).
    Dataset rows(const std::vector<Index>& idx) const;
    /// Column subset, keeping names.
    Dataset columns(const std::vector<Index>& idx) const;
    /// Same response/family with a replaced design.
    Dataset with_x(Matrix x, std::vector<std::string> names) const;

private:
    Matrix x_;
    Vector y_;
    std::vector<std::string> names_;
    Family family_;
};

enum class SdDenominator { sample, population };

struct StandardizationRecord {
    Vector scale;
    Vector center_x;
    double center_y = 0.0;
    bool y_centered = false;

    /// Maps a standardized dataset back to the original units.
    Dataset invert(const Dataset& standardized) const;
};

/// Mean-centers and SD-scales every column (and centers y for gaussian).
/// Throws UsageError naming the first zero-variance column.
std::pair<Dataset, StandardizationRecord> standardize(
    const Dataset& d, SdDenominator denominator = SdDenominator::sample);

/// Comma-delimited file with a header row; an empty `response` takes the last column.
Dataset load_csv(const std::filesystem::path& path, const std::string& response, Family family);

/// Drops the two influential observations (rows 39 and 216, 1-based) from the 252-row body-fat file.
Dataset prepare_bodyfat(const Dataset& d);

/// Bundled analysis datasets, standardized with the population SD. Prostate
/// covariates are renamed x1..x8 in file order; the response is lpsa.
Dataset load_prostate(const std::filesystem::path& data_dir);
/// Body fat (siri response) with the two influential rows removed.
Dataset load_bodyfat(const std::filesystem::path& data_dir);

struct SyntheticSpec {
    Index n = 200;
    Index p = 2000;
    Index k_true = 10;
    double rho = 0.0;
    double snr = 2.0;
    std::uint64_t seed = 1;
    Family family = Family::gaussian;
};

/// AR(1)-correlated Gaussian design with the first k_true coefficients active
/// (alternating signs, equal magnitude) scaled so that Var(x'beta) = snr.
/// Gaussian noise has unit variance; binomial responses use the logistic link.
Dataset make_synthetic_highdim(const SyntheticSpec& spec);

/// True coefficient vector used by make_synthetic_highdim for the given spec.
Vector synthetic_truth(const SyntheticSpec& spec);

struct FoldAssignment {
    std::vector<int> fold_of;  // values in 1..k
    int k = 0;
    std::uint64_t seed = 0;

    std::vector<Index> train_rows(int fold) const;
    std::vector<Index> test_rows(int fold) const;
};

FoldAssignment assign_folds(Index n, int k, std::uint64_t seed);

}  // namespace garrote
