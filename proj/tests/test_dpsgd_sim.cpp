#include "doctest.h"

#include <random>

#include "mixdesign/dpsgd_sim.hpp"
#include "mixdesign/weight_solver.hpp"
#include "oracles.hpp"

using namespace mixdesign;

namespace {

// Centralized gradient descent on the mean of the local least-squares losses.
std::vector<double> gd_oracle(const QuadraticTask& task, double eta, int steps) {
  const int dim = task.dim();
  std::vector<double> x(dim, 0.0);
  for (int k = 0; k < steps; ++k) {
    std::vector<double> g(dim, 0.0);
    for (int i = 0; i < task.nodes(); ++i) {
      const auto& a = task.data(i);
      const int n = static_cast<int>(a.rows());
      for (int r = 0; r < n; ++r) {
        double res = -task.targets(i)[r];
        for (int j = 0; j < dim; ++j) res += a(r, j) * x[j];
        for (int j = 0; j < dim; ++j) g[j] += a(r, j) * res / n / task.nodes();
      }
    }
    for (int j = 0; j < dim; ++j) x[j] -= eta * g[j];
  }
  return x;
}

MixingDesign solved(const Topology& t) { return MixingDesign(t, solve_min_rho(t, LinkMask::none(t), {}).alpha); }

}  // namespace

TEST_CASE("full-batch run with W = J is centralized gradient descent") {
  const auto task = make_quadratic_task(6, 5, 12, 1.0, 3);
  const auto d = averaging_design(6);
  SimConfig cfg{.learning_rate = 0.1, .iterations = 40, .batch = 100};
  const auto trace = run_dpsgd(task, MixingDistribution::deterministic(d), CostModel::from_topology(d.topology), cfg);
  const auto ref = gd_oracle(task, 0.1, 40);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 5; ++j) CHECK(std::abs(trace.final_params(j, i) - ref[j]) <= 1e-8);
}

TEST_CASE("node average follows the averaged gradient step") {
  const auto task = make_quadratic_task(8, 4, 20, 2.0, 5);
  const auto t = random_geometric_graph(8, 0.6, 2);
  const auto d = solved(t);
  const double eta = 0.05;
  double worst = 0.0;
  auto check_mass = [&](const IterationView& v) {
    const Vector expect = v.params_before.rowwise().mean() - eta * v.gradients.rowwise().mean();
    worst = std::max(worst, (v.params_after.rowwise().mean() - expect).cwiseAbs().maxCoeff());
  };
  MixingDistribution on_t({{d, 0.6}, {MixingDesign(t, d.alpha * 0.5), 0.4}});
  run_dpsgd(task, on_t, CostModel::from_topology(t), SimConfig{.learning_rate = eta, .iterations = 60, .seed = 9},
            check_mass);
  CHECK(worst <= 1e-10);
}

TEST_CASE("energy ledger replays from the activation log") {
  const auto t = random_geometric_graph(9, 0.6, 4, 0.5, 1.25);
  const auto cost = CostModel::from_topology(t);
  const auto d = solved(t);
  Vector sparse = d.alpha;
  for (Eigen::Index e = 0; e < sparse.size(); e += 2) sparse[e] = 0.0;
  MixingDistribution dist({{d, 0.3}, {MixingDesign(t, sparse), 0.7}});
  const auto task = make_quadratic_task(9, 3, 10, 1.0, 1);
  const auto trace = run_dpsgd(task, dist, cost, SimConfig{.learning_rate = 0.01, .iterations = 50, .seed = 2});
  REQUIRE(trace.activation_log.size() == 50);
  std::vector<double> expect(9, 0.0);
  for (std::size_t idx : trace.activation_log) {
    const auto& alpha = dist.entries()[idx].first.alpha;
    std::vector<bool> use(t.link_count());
    for (std::size_t e = 0; e < t.link_count(); ++e) use[e] = std::abs(alpha[e]) > 1e-9;
    const auto c = oracle::node_costs(t, use);
    for (int i = 0; i < 9; ++i) expect[i] += c[i];
  }
  for (int i = 0; i < 9; ++i) CHECK(trace.cumulative_energy[i] == doctest::Approx(expect[i]).epsilon(1e-12));
  CHECK(trace.records.back().cumulative_energy == trace.cumulative_energy);
}

TEST_CASE("analytic gradients match finite differences") {
  const auto task = make_quadratic_task(4, 6, 15, 1.0, 8);
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    Vector x(6);
    for (auto& v : x) v = n(rng);
    const int node = trial % 4;
    const std::vector<int> rows{0, 3, 7, 11};
    auto batch_loss = [&](const std::vector<double>& p) {
      double s = 0.0;
      for (int r : rows) {
        double res = -task.targets(node)[r];
        for (int j = 0; j < 6; ++j) res += task.data(node)(r, j) * p[j];
        s += res * res;
      }
      return s / (2.0 * rows.size());
    };
    const auto fd = oracle::finite_difference_gradient(batch_loss, oracle::to_std(x));
    const Vector g = task.minibatch_gradient(node, x, rows);
    const auto fd_full = oracle::finite_difference_gradient(
        [&](const std::vector<double>& p) { return task.loss(Eigen::Map<const Vector>(p.data(), 6)); },
        oracle::to_std(x));
    const Vector gf = task.gradient(x);
    for (int j = 0; j < 6; ++j) {
      CHECK(std::abs(g[j] - fd[j]) <= 1e-5 * std::max(1.0, std::abs(fd[j])));
      CHECK(std::abs(gf[j] - fd_full[j]) <= 1e-5 * std::max(1.0, std::abs(fd_full[j])));
    }
  }
}

TEST_CASE("identical seeds give bit-identical traces") {
  const auto t = random_geometric_graph(10, 0.5, 6);
  const auto d = solved(t);
  const auto task = make_quadratic_task(10, 4, 16, 1.0, 2);
  MixingDistribution dist({{d, 0.5}, {MixingDesign(t, d.alpha * 0.7), 0.5}});
  SimConfig cfg{.iterations = 30, .batch = 4, .seed = 77};
  const auto a = run_dpsgd(task, dist, CostModel::from_topology(t), cfg);
  const auto b = run_dpsgd(task, dist, CostModel::from_topology(t), cfg);
  CHECK(a.final_params == b.final_params);
  CHECK(a.running_avg_grad_sq == b.running_avg_grad_sq);
  CHECK(a.activation_log == b.activation_log);
  cfg.seed = 78;
  CHECK_FALSE(run_dpsgd(task, dist, CostModel::from_topology(t), cfg).final_params == a.final_params);
}

TEST_CASE("trace bookkeeping") {
  const auto d = averaging_design(4);
  const auto task = make_quadratic_task(4, 2, 8, 0.5, 0);
  const auto trace = run_dpsgd(task, MixingDistribution::deterministic(d), CostModel::from_topology(d.topology),
                               SimConfig{.iterations = 10, .record_every = 3});
  CHECK(trace.running_avg_grad_sq.size() == 10);
  CHECK(trace.consensus.size() == 11);
  REQUIRE(trace.records.size() == 4);  // 3, 6, 9, 10
  CHECK(trace.records.back().iteration == 10);
  CHECK(iterations_to_target(trace, 1e300) == 1);
  CHECK_FALSE(iterations_to_target(trace, 0.0).has_value());
  CHECK_THROWS_AS(run_dpsgd(task, MixingDistribution::deterministic(averaging_design(5)),
                            CostModel::from_topology(d.topology), SimConfig{}),
                  InputError);
}

TEST_CASE("divergence is reported") {
  const auto d = averaging_design(3);
  const auto task = make_quadratic_task(3, 3, 10, 1.0, 0);
  CHECK_THROWS_AS(run_dpsgd(task, MixingDistribution::deterministic(d), CostModel::from_topology(d.topology),
                            SimConfig{.learning_rate = 50.0, .iterations = 200, .batch = 100}),
                  ComputeError);
}

TEST_CASE("task optimum solves the normal equations") {
  const auto task = make_quadratic_task(5, 4, 9, 1.0, 12);
  CHECK(task.gradient(task.optimum()).norm() <= 1e-10);
  CHECK(task.optimal_loss() <= task.loss(task.optimum() + Vector::Constant(4, 1e-3)));
}
