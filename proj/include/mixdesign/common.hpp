#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace mixdesign {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// A link counts as activated when its weight exceeds this in magnitude.
// Shared by the solver, the cost model and the sparsifier.
inline constexpr double kActivationThreshold = 1e-9;

inline bool is_active_weight(double w) { return std::abs(w) > kActivationThreshold; }

// Thrown for malformed inputs: bad files, bad configs, dimension mismatches.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Thrown when a numerical routine cannot produce a result (eigensolver
// breakdown, attempts exhausted, diverging simulation).
class ComputeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Derives an independent 64-bit seed from a parent seed and a stream path.
/// Streams are split hierarchically so that e.g. the seed of node 7 in
/// iteration 12 never depends on how many other nodes exist.
std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t a, std::uint64_t b = 0);

/// Shortest decimal text that parses back to exactly `value`.
std::string format_double(double value);

}  // namespace mixdesign
