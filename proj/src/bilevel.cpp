#include "mixdesign/bilevel.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "mixdesign/ramanujan.hpp"
#include "mixdesign/sparsifier.hpp"

namespace mixdesign {

void ConvergenceModel::validate() const {
  for (double x : {smoothness, sigma, zeta, epsilon, initial_gap, leading_constant}) {
    if (!(x > 0.0)) throw InputError("convergence model: constants must be positive");
  }
  if (!(m1 >= 0.0) || !(m2 >= 0.0)) throw InputError("convergence model: M1 and M2 must be nonnegative");
}

std::optional<double> iterations_to_epsilon(const ConvergenceModel& cm, double rho, int nodes) {
  cm.validate();
  if (nodes < 1) throw InputError("iterations_to_epsilon: node count must be positive");
  if (!(rho >= 0.0)) throw InputError("iterations_to_epsilon: rho must be nonnegative");
  if (rho >= 1.0) return std::nullopt;
  const double gap = 1.0 - rho;
  const double eps = cm.epsilon;
  const double noise = cm.sigma * cm.sigma / (nodes * eps * eps);
  const double transient = (cm.zeta * std::sqrt(cm.m1 + 1.0) + cm.sigma * std::sqrt(gap)) / (gap * std::pow(eps, 1.5));
  const double drift = std::sqrt((cm.m2 + 1.0) * (cm.m1 + 1.0)) / (gap * eps);
  return cm.leading_constant * cm.smoothness * cm.initial_gap * (noise + transient + drift);
}

std::string_view to_string(SweepMethod method) {
  return method == SweepMethod::Greedy ? "greedy" : "ramanujan";
}

SweepMethod sweep_method_from_string(std::string_view name) {
  if (name == "greedy") return SweepMethod::Greedy;
  if (name == "ramanujan") return SweepMethod::Ramanujan;
  throw InputError("unknown sweep method '" + std::string(name) + "'");
}

namespace {

void finish_row(SweepRow& row, const MixingDesign& design, const CostModel& cost, const ConvergenceModel& cm) {
  row.rho = rho_deterministic(design);
  row.node_costs = node_costs(design.topology, cost, design.alpha);
  row.max_node_cost = max_node_cost(row.node_costs);
  row.links_active = design.active().count();
  row.iterations = iterations_to_epsilon(cm, row.rho, design.node_count());
  row.feasible = mixdesign::feasible(row.node_costs, row.budget) && row.iterations.has_value();
  if (row.iterations) row.product = row.budget * *row.iterations;
  if (!row.iterations && row.diagnostic.empty()) row.diagnostic = "rho >= 1: no convergence guarantee";
  row.design = design;
}

SweepRow greedy_row(const Topology& t, const CostModel& cost, const ConvergenceModel& cm, double budget,
                    const SweepOptions& opt) {
  SweepRow row;
  row.budget = budget;
  GreedyOutcome g = greedy_sparsify(t, cost, budget, opt.solver);
  if (!g.success) {
    row.diagnostic = "greedy failed (" + std::string(to_string(g.failure)) + "): " + g.diagnostic;
    row.rho = rho_deterministic(g.design);
    row.node_costs = g.node_costs;
    row.max_node_cost = max_node_cost(row.node_costs);
    row.links_active = g.design.active().count();
    return row;
  }
  finish_row(row, g.design, cost, cm);
  return row;
}

SweepRow ramanujan_row(const Topology& t, const CostModel& cost, const ConvergenceModel& cm, double budget,
                       std::uint64_t seed, const SweepOptions& opt) {
  SweepRow row;
  row.budget = budget;
  const int m = t.node_count();
  int d = std::min(degree_budget(t, cost, budget), m - 1);
  if (d >= 2 && (static_cast<long long>(m) * d) % 2 != 0) {
    --d;
    row.diagnostic = "degree lowered by one for parity";
  }
  row.degree = d;
  if (d < 2) {
    row.diagnostic = "degree budget " + std::to_string(d) + " is below 2";
    return row;
  }
  RegularGraphSpec spec{.nodes = m, .degree = d, .seed = seed, .max_attempts = opt.ramanujan_attempts};
  auto r = ramanujan_mixing(spec, t);
  finish_row(row, r.design, cost, cm);
  return row;
}

}  // namespace

SweepResult sweep(const Topology& t, const CostModel& cost, const ConvergenceModel& cm, std::span<const double> grid,
                  const SweepOptions& options) {
  if (grid.empty()) throw InputError("sweep: empty budget grid");
  if (!std::is_sorted(grid.begin(), grid.end())) throw InputError("sweep: budget grid must be ascending");
  cm.validate();
  cost.validate(t);
  options.solver.validate();
  if (options.method == SweepMethod::Ramanujan && !t.is_complete())
    throw InputError("sweep: the ramanujan method needs a complete base topology");

  SweepResult result;
  result.rows.resize(grid.size());

  auto run_row = [&](std::size_t i) {
    try {
      result.rows[i] = options.method == SweepMethod::Greedy
                           ? greedy_row(t, cost, cm, grid[i], options)
                           : ramanujan_row(t, cost, cm, grid[i], derive_seed(options.seed, i), options);
    } catch (const std::exception& e) {
      SweepRow row;
      row.budget = grid[i];
      row.diagnostic = e.what();
      result.rows[i] = std::move(row);
    }
  };

  const int jobs = std::max(1, std::min<int>(options.jobs, static_cast<int>(grid.size())));
  if (jobs == 1) {
    for (std::size_t i = 0; i < grid.size(); ++i) run_row(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> workers;
    for (int w = 0; w < jobs; ++w) {
      workers.emplace_back([&] {
        for (std::size_t i = next++; i < grid.size(); i = next++) run_row(i);
      });
    }
  }

  for (std::size_t i = 0; i < result.rows.size(); ++i) {
    const auto& row = result.rows[i];
    if (!row.feasible || !row.product) continue;
    if (!result.argmin || *row.product < *result.rows[*result.argmin].product) result.argmin = i;
  }
  if (!result.argmin) result.diagnostic = "no budget in the grid yields a feasible design";
  return result;
}

std::vector<double> default_budget_grid(const Topology& t, const CostModel& cost, int points) {
  cost.validate(t);
  if (points < 1) throw InputError("default_budget_grid: points must be >= 1");
  if (t.link_count() == 0) throw InputError("default_budget_grid: topology has no links");
  const double min_comp = *std::min_element(cost.comp.begin(), cost.comp.end());
  double min_comm = std::numeric_limits<double>::infinity();
  for (std::size_t e = 0; e < t.link_count(); ++e) min_comm = std::min({min_comm, cost.comm_u[e], cost.comm_v[e]});
  const double lo = min_comp + min_comm;
  const double hi = max_node_cost(node_costs(t, cost, LinkMask::all(t)));
  if (points == 1 || !(hi > lo) || !(lo > 0.0)) return {hi};
  std::vector<double> grid(points);
  for (int i = 0; i < points; ++i) {
    grid[i] = std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * i / (points - 1));
  }
  grid.back() = hi;
  return grid;
}

}  // namespace mixdesign
