#include "mixdesign/dpsgd_sim.hpp"

#include <algorithm>
#include <numeric>
#include <random>

namespace mixdesign {

QuadraticTask::QuadraticTask(std::vector<Matrix> a, std::vector<Vector> b) : a_(std::move(a)), b_(std::move(b)) {
  if (a_.empty() || a_.size() != b_.size()) throw InputError("quadratic task: need one (A, b) pair per node");
  const auto dim = a_.front().cols();
  if (dim < 1) throw InputError("quadratic task: dimension must be positive");
  Matrix normal = Matrix::Zero(dim, dim);
  Vector rhs = Vector::Zero(dim);
  for (std::size_t i = 0; i < a_.size(); ++i) {
    if (a_[i].cols() != dim || a_[i].rows() < 1 || a_[i].rows() != b_[i].size())
      throw InputError("quadratic task: inconsistent shapes at node " + std::to_string(i));
    const double n = static_cast<double>(a_[i].rows());
    Matrix local = a_[i].transpose() * a_[i] / n;
    normal += local;
    rhs += a_[i].transpose() * b_[i] / n;
    Eigen::SelfAdjointEigenSolver<Matrix> es(local, Eigen::EigenvaluesOnly);
    smoothness_ = std::max(smoothness_, es.eigenvalues()[dim - 1]);
  }
  Eigen::LDLT<Matrix> ldlt(normal);
  if (ldlt.info() != Eigen::Success || ldlt.rcond() < 1e-14)
    throw InputError("quadratic task: global objective has no unique minimizer");
  optimum_ = ldlt.solve(rhs);
}

double QuadraticTask::local_loss(int node, const Vector& x) const {
  return (a_[node] * x - b_[node]).squaredNorm() / (2.0 * samples(node));
}

Vector QuadraticTask::local_gradient(int node, const Vector& x) const {
  return a_[node].transpose() * (a_[node] * x - b_[node]) / static_cast<double>(samples(node));
}

Vector QuadraticTask::minibatch_gradient(int node, const Vector& x, const std::vector<int>& rows) const {
  if (rows.empty()) throw InputError("minibatch_gradient: empty batch");
  Vector g = Vector::Zero(dim());
  for (int r : rows) {
    const double residual = a_[node].row(r).dot(x) - b_[node][r];
    g += residual * a_[node].row(r).transpose();
  }
  return g / static_cast<double>(rows.size());
}

double QuadraticTask::loss(const Vector& x) const {
  double s = 0.0;
  for (int i = 0; i < nodes(); ++i) s += local_loss(i, x);
  return s / nodes();
}

Vector QuadraticTask::gradient(const Vector& x) const {
  Vector g = Vector::Zero(dim());
  for (int i = 0; i < nodes(); ++i) g += local_gradient(i, x);
  return g / nodes();
}

QuadraticTask make_quadratic_task(int nodes, int dim, int samples_per_node, double heterogeneity,
                                  std::uint64_t seed, double noise) {
  if (nodes < 1 || dim < 1 || samples_per_node < 1) throw InputError("make_quadratic_task: sizes must be positive");
  if (!(heterogeneity >= 0.0) || !(noise >= 0.0))
    throw InputError("make_quadratic_task: heterogeneity and noise must be nonnegative");
  std::normal_distribution<double> normal(0.0, 1.0);
  std::mt19937_64 shared(derive_seed(seed, 0xba5e));
  Vector x0(dim);
  for (int j = 0; j < dim; ++j) x0[j] = normal(shared);

  std::vector<Matrix> a(nodes);
  std::vector<Vector> b(nodes);
  for (int i = 0; i < nodes; ++i) {
    std::mt19937_64 rng(derive_seed(seed, 0xda7a, static_cast<std::uint64_t>(i)));
    Vector delta(dim);
    for (int j = 0; j < dim; ++j) delta[j] = normal(rng);
    a[i].resize(samples_per_node, dim);
    for (Eigen::Index k = 0; k < a[i].size(); ++k) a[i].data()[k] = normal(rng);
    Vector noise_vec(samples_per_node);
    for (int k = 0; k < samples_per_node; ++k) noise_vec[k] = noise * normal(rng);
    b[i] = a[i] * (x0 + heterogeneity * delta) + noise_vec;
  }
  return QuadraticTask(std::move(a), std::move(b));
}

void SimConfig::validate() const {
  if (!(learning_rate >= 0.0)) throw InputError("simulation: learning rate must be nonnegative");
  if (iterations < 1) throw InputError("simulation: iterations must be >= 1");
  if (batch < 1) throw InputError("simulation: batch must be >= 1");
  if (record_every < 1) throw InputError("simulation: record_every must be >= 1");
}

namespace {

double consensus_distance(const Matrix& x) {
  const Vector mean = x.rowwise().mean();
  return (x.colwise() - mean).colwise().squaredNorm().mean();
}

}  // namespace

TrainingTrace run_dpsgd(const QuadraticTask& task, const MixingDistribution& mixing, const CostModel& cost,
                        const SimConfig& cfg, const IterationObserver& observer) {
  cfg.validate();
  const int m = task.nodes();
  const int dim = task.dim();
  if (mixing.node_count() != m) throw InputError("simulation: mixing matrices do not match the task's node count");
  if (static_cast<int>(cost.comp.size()) != m) throw InputError("simulation: cost model does not match node count");

  // Per-design mixing matrix and per-iteration energy.
  std::vector<Matrix> w;
  std::vector<std::vector<double>> energy;
  for (const auto& [design, p] : mixing.entries()) {
    w.push_back(design.mixing_matrix());
    energy.push_back(node_costs(design.topology, cost, design.alpha));
  }

  Matrix x = cfg.initial.size() == 0 ? Matrix::Zero(dim, m) : cfg.initial;
  if (x.rows() != dim || x.cols() != m) throw InputError("simulation: initial parameters have the wrong shape");

  TrainingTrace trace;
  trace.cumulative_energy.assign(m, 0.0);
  trace.running_avg_grad_sq.reserve(cfg.iterations);
  trace.consensus.reserve(cfg.iterations + 1);
  trace.activation_log.reserve(cfg.iterations);

  std::mt19937_64 mixing_rng(derive_seed(cfg.seed, 0x313));
  Matrix grads(dim, m);
  Matrix next(dim, m);
  std::vector<int> rows;
  double grad_sq_sum = 0.0;

  for (int k = 1; k <= cfg.iterations; ++k) {
    const Vector mean = x.rowwise().mean();
    const double loss = task.loss(mean);
    if (!std::isfinite(loss) || loss > 1e12)
      throw ComputeError("simulation diverged at iteration " + std::to_string(k) + " (loss " + format_double(loss) +
                         ")");
    const double grad_sq = task.gradient(mean).squaredNorm();
    grad_sq_sum += grad_sq;
    trace.running_avg_grad_sq.push_back(grad_sq_sum / k);
    trace.consensus.push_back(consensus_distance(x));

    for (int i = 0; i < m; ++i) {
      const int n = task.samples(i);
      if (cfg.batch >= n) {
        grads.col(i) = task.local_gradient(i, x.col(i));
        continue;
      }
      // Partial Fisher-Yates: the first `batch` slots are a sample without
      // replacement.
      std::mt19937_64 rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(i) + 1, static_cast<std::uint64_t>(k)));
      rows.resize(n);
      std::iota(rows.begin(), rows.end(), 0);
      for (int s = 0; s < cfg.batch; ++s) {
        std::uniform_int_distribution<int> pick(s, n - 1);
        std::swap(rows[s], rows[pick(rng)]);
      }
      grads.col(i) = task.minibatch_gradient(i, x.col(i), std::vector<int>(rows.begin(), rows.begin() + cfg.batch));
    }

    const std::size_t idx = mixing.sample(mixing_rng);
    trace.activation_log.push_back(idx);
    // x_i <- sum_j W_ij y_j, i.e. X <- Y W^T with nodes as columns.
    next.noalias() = (x - cfg.learning_rate * grads) * w[idx].transpose();
    for (int i = 0; i < m; ++i) trace.cumulative_energy[i] += energy[idx][i];

    if (observer) observer(IterationView{k, x, grads, next, idx});

    if (k % cfg.record_every == 0 || k == cfg.iterations) {
      trace.records.push_back(TraceRecord{k, loss, grad_sq, trace.running_avg_grad_sq.back(), trace.consensus.back(),
                                          trace.cumulative_energy});
    }
    x.swap(next);
  }
  trace.consensus.push_back(consensus_distance(x));
  trace.final_params = x;
  return trace;
}

std::optional<int> iterations_to_target(const TrainingTrace& trace, double epsilon) {
  for (std::size_t k = 0; k < trace.running_avg_grad_sq.size(); ++k) {
    if (trace.running_avg_grad_sq[k] < epsilon) return static_cast<int>(k) + 1;
  }
  return std::nullopt;
}

}  // namespace mixdesign
