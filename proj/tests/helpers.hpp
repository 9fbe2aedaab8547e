#pragma once

#include <cmath>
#include <filesystem>
#include <random>
#include <vector>

#include "garrote/dataset.hpp"

namespace testing {

using garrote::Dataset;
using garrote::Family;
using garrote::Index;
using garrote::Matrix;
using garrote::Vector;

inline std::filesystem::path data_dir() { return GARROTE_TEST_DATA_DIR; }

inline Matrix random_matrix(Index n, Index p, std::mt19937_64& rng) {
    std::normal_distribution<double> z(0.0, 1.0);
    Matrix x(n, p);
    for (Index j = 0; j < p; ++j)
        for (Index i = 0; i < n; ++i) x(i, j) = z(rng);
    return x;
}

inline std::vector<std::string> names(Index p) {
    std::vector<std::string> v;
    for (Index j = 0; j < p; ++j) v.push_back("v" + std::to_string(j + 1));
    return v;
}

/// y = X beta + sigma * noise, with beta = (3, -2, 1.5, 0, ..., 0).
inline Dataset gaussian_data(Index n, Index p, std::uint64_t seed, double sigma = 1.0) {
    std::mt19937_64 rng(seed);
    const Matrix x = random_matrix(n, p, rng);
    Vector beta = Vector::Zero(p);
    const double head[] = {3.0, -2.0, 1.5};
    for (Index j = 0; j < std::min<Index>(3, p); ++j) beta[j] = head[j];
    std::normal_distribution<double> z(0.0, 1.0);
    Vector y = x * beta;
    for (Index i = 0; i < n; ++i) y[i] += sigma * z(rng);
    return Dataset(x, y, names(p), Family::gaussian);
}

inline Dataset binomial_data(Index n, Index p, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    const Matrix x = random_matrix(n, p, rng);
    Vector beta = Vector::Zero(p);
    const double head[] = {1.5, -1.0, 0.8};
    for (Index j = 0; j < std::min<Index>(3, p); ++j) beta[j] = head[j];
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Vector y(n);
    for (Index i = 0; i < n; ++i) y[i] = u(rng) < 1.0 / (1.0 + std::exp(-x.row(i).dot(beta))) ? 1.0 : 0.0;
    return Dataset(x, y, names(p), Family::binomial);
}

/// Centered design with X'X = n I (Gram-Schmidt of random columns) and y = X beta + noise.
inline Dataset orthogonal_data(Index n, Index p, std::mt19937_64& rng) {
    Matrix x = random_matrix(n, p, rng);
    x.rowwise() -= x.colwise().mean();
    Eigen::HouseholderQR<Matrix> qr(x);
    Matrix q = qr.householderQ() * Matrix::Identity(n, p);
    q *= std::sqrt(static_cast<double>(n));
    std::normal_distribution<double> z(0.0, 1.0);
    Vector y(n);
    for (Index i = 0; i < n; ++i) y[i] = 2.0 * q(i, 0) - 1.0 * q(i, 1) + 0.5 * q(i, 2) + z(rng);
    return Dataset(q, y, names(p), Family::gaussian);
}

}  // namespace testing
