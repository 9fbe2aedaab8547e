#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace garrote {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

enum class Family { gaussian, binomial };

std::string_view to_string(Family f);
Family family_from_string(std::string_view s);

/// Bad input or an unsupported configuration. The CLI maps this to exit code 2.
class UsageError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A computation that could not be carried out (singular system, no convergence).
/// The CLI maps this to exit code 1.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// SplitMix64 finalizer; used to derive independent RNG substreams from a master seed.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

/// Runs body(i) for i in [0, count) on up to `threads` workers. Each index is
/// visited exactly once; callers write results into slot i so the outcome does
/// not depend on scheduling. threads <= 0 means hardware concurrency.
template <class Body>
void parallel_for(std::size_t count, int threads, Body&& body);

/// Warnings raised by numerical routines (clamped probabilities, fallbacks).
/// Collected per thread; the CLI prints them to stderr.
void warn(std::string message);
std::vector<std::string> take_warnings();

}  // namespace garrote

#include "garrote/detail/parallel.hpp"
