#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "mixdesign/cost.hpp"
#include "mixdesign/spectral.hpp"

namespace mixdesign {

/// Decentralized least squares: node i holds (A_i, b_i) and
/// F_i(x) = ||A_i x - b_i||^2 / (2 n_i); F is the mean of the F_i.
class QuadraticTask {
 public:
  QuadraticTask(std::vector<Matrix> a, std::vector<Vector> b);

  int nodes() const { return static_cast<int>(a_.size()); }
  int dim() const { return static_cast<int>(a_.front().cols()); }
  int samples(int node) const { return static_cast<int>(a_[node].rows()); }
  const Matrix& data(int node) const { return a_[node]; }
  const Vector& targets(int node) const { return b_[node]; }

  double local_loss(int node, const Vector& x) const;
  Vector local_gradient(int node, const Vector& x) const;
  /// Gradient of the loss restricted to `rows`: A_S^T (A_S x - b_S) / |S|.
  Vector minibatch_gradient(int node, const Vector& x, const std::vector<int>& rows) const;

  double loss(const Vector& x) const;
  Vector gradient(const Vector& x) const;

  /// Minimizer of F from the normal equations sum_i A_i^T A_i / n_i.
  const Vector& optimum() const { return optimum_; }
  double optimal_loss() const { return loss(optimum_); }
  /// max_i lambda_max(A_i^T A_i / n_i): every F_i is this smooth.
  double smoothness() const { return smoothness_; }

 private:
  std::vector<Matrix> a_;
  std::vector<Vector> b_;
  Vector optimum_;
  double smoothness_ = 0.0;
};

/// A_i has i.i.d. standard normal entries; b_i = A_i (x0 + heterogeneity *
/// delta_i) + noise * N(0, 1), with x0 and the per-node shifts delta_i
/// standard normal. Reproducible from `seed`.
QuadraticTask make_quadratic_task(int nodes, int dim, int samples_per_node, double heterogeneity,
                                  std::uint64_t seed, double noise = 0.01);

struct SimConfig {
  double learning_rate = 0.05;
  int iterations = 100;
  /// Minibatch size; >= the node's sample count means full batch.
  int batch = 8;
  std::uint64_t seed = 0;
  int record_every = 1;
  /// Starting parameters (dim x m, column i is node i); zeros when empty.
  Matrix initial;

  void validate() const;
};

struct TraceRecord {
  int iteration = 0;  // k, 1-based: the state after k - 1 updates
  double loss = 0.0;  // F(x_bar^(k))
  double grad_sq = 0.0;
  double running_avg_grad_sq = 0.0;  // mean of grad_sq over 1..k
  double consensus = 0.0;            // (1/m) sum_i ||x_i - x_bar||^2
  std::vector<double> cumulative_energy;  // per node, after the k-th update
};

struct TrainingTrace {
  std::vector<TraceRecord> records;  // every record_every-th iteration and the last
  /// Running average of ||grad F(x_bar^(k))||^2 for every k = 1..K.
  std::vector<double> running_avg_grad_sq;
  /// Consensus distance for every k = 1..K + 1.
  std::vector<double> consensus;
  /// Index into the mixing distribution used in each update.
  std::vector<std::size_t> activation_log;
  std::vector<double> cumulative_energy;  // per node, after the last update
  Matrix final_params;                    // dim x m
};

/// Everything an update consumed and produced, for test instrumentation.
struct IterationView {
  int iteration;
  const Matrix& params_before;  // dim x m
  const Matrix& gradients;      // dim x m, local stochastic gradients
  const Matrix& params_after;
  std::size_t mixing_index;
};

using IterationObserver = std::function<void(const IterationView&)>;

/// Bulk-synchronous D-PSGD:
///   x_i <- sum_j W_ij (x_j - eta g_j)
/// with W drawn i.i.d. from `mixing` each iteration. Node energy is charged
/// per iteration from the drawn design's activated links.
///
/// Randomness is split per (node, iteration) for minibatches and per
/// iteration for the mixing draw, all derived from cfg.seed.
///
/// Throws ComputeError if the loss exceeds 1e12.
TrainingTrace run_dpsgd(const QuadraticTask& task, const MixingDistribution& mixing, const CostModel& cost,
                        const SimConfig& cfg, const IterationObserver& observer = {});

/// First k whose running-average squared gradient norm is below epsilon.
std::optional<int> iterations_to_target(const TrainingTrace& trace, double epsilon);

}  // namespace mixdesign
