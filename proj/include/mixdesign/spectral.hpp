#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "mixdesign/common.hpp"
#include "mixdesign/topology.hpp"

namespace mixdesign {

struct EigenDecomposition {
  Vector values;   // ascending
  Matrix vectors;  // column i pairs with values[i]; empty unless requested
};

/// Full spectrum of a symmetric matrix. Throws InputError when `a` is not
/// square or not symmetric within 1e-10, ComputeError on solver failure.
EigenDecomposition eig_symmetric(const Matrix& a, bool with_vectors = false);

/// Weighted Laplacian L = B diag(alpha) B^T, assembled entry-wise so that
/// every row sums to exactly zero.
Matrix laplacian(const Topology& t, const Vector& alpha);

/// J = (1/m) 1 1^T.
Matrix averaging_matrix(int m);

/// ||I - L(alpha) - J||, the spectral score minimized by the weight solver.
double rho_tilde(const Topology& t, const Vector& alpha);

/// Link weights over a base topology, and everything derived from them.
struct MixingDesign {
  Topology topology;
  Vector alpha;

  MixingDesign(Topology t, Vector weights);

  Matrix laplacian() const;
  /// W = I - L.
  Matrix mixing_matrix() const;
  /// ||I - L - J||.
  double rho_tilde() const;
  /// Largest |row sum of W - 1|.
  double row_sum_max_error() const;
  ActiveSet active() const { return LinkMask::from_weights(alpha); }
  int node_count() const { return topology.node_count(); }
};

/// W = J as a design: uniform weight 1/m on the complete graph.
MixingDesign averaging_design(int m);
/// W = I as a design: the complete graph with all weights zero.
MixingDesign identity_design(int m);

/// Finite distribution over deterministic designs. The designs all share
/// the node count; probabilities are nonnegative and sum to one (1e-9).
class MixingDistribution {
 public:
  explicit MixingDistribution(std::vector<std::pair<MixingDesign, double>> entries);
  static MixingDistribution deterministic(MixingDesign design);

  const std::vector<std::pair<MixingDesign, double>>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  int node_count() const { return entries_.front().first.node_count(); }
  bool is_deterministic() const { return entries_.size() == 1; }

  /// Index of the design used in one draw.
  std::size_t sample(std::mt19937_64& rng) const;

 private:
  std::vector<std::pair<MixingDesign, double>> entries_;
  std::vector<double> cumulative_;
};

/// rho = max((1 - lambda_2(L))^2, (1 - lambda_m(L))^2) for a fixed W.
double rho_deterministic(const MixingDesign& design);

/// E[W^T W] by probability-weighted sum.
Matrix expected_gram(const MixingDistribution& dist);

/// rho = ||E[W^T W] - J||.
double rho_randomized(const MixingDistribution& dist);

/// E ||I - L - J||^2, the relaxed upper bound on rho.
double expected_squared_score(const MixingDistribution& dist);

/// Outcome of the numerical checks on the contraction parameter.
struct RhoBoundsReport {
  double rho = 0.0;
  double expected_squared_score = 0.0;
  bool jensen_ok = false;

  int trials = 0;
  double max_sampled_ratio = 0.0;
  bool samples_ok = false;

  double aligned_ratio = 0.0;
  bool aligned_ok = false;

  /// Contraction constant p = 1 - rho of the consensus step.
  double p = 0.0;

  bool all_ok() const { return jensen_ok && samples_ok && aligned_ok; }
};

/// Ratio E||X(W - J)||_F^2 / ||X(I - J)||_F^2 for a fixed X, via the
/// identity (W - J)(W - J)^T = W^T W - J:
/// trace(X (E[W^T W] - J) X^T) / trace(X (I - J) X^T).
double contraction_ratio(const Matrix& gram_minus_j, const Matrix& x);

/// Checks rho <= E||I-L-J||^2, samples `trials` Gaussian 4 x m matrices X
/// and checks each contraction ratio stays below rho, and checks that X
/// aligned with the top eigenvector of E[W^T W] - J attains rho.
RhoBoundsReport validate_rho_bounds(const MixingDistribution& dist, int trials, std::uint64_t seed);

}  // namespace mixdesign
