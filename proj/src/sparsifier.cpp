#include "mixdesign/sparsifier.hpp"

#include <algorithm>
#include <optional>

namespace mixdesign {

std::string_view to_string(GreedyFailure f) {
  switch (f) {
    case GreedyFailure::None:
      return "none";
    case GreedyFailure::Disconnection:
      return "disconnection";
    case GreedyFailure::BudgetUnreachable:
      return "budget-unreachable";
  }
  return "unknown";
}

std::vector<std::size_t> removal_candidates(const Topology& t, const CostModel& cost, double budget,
                                            const LinkMask& frozen, const Vector& alpha) {
  const auto costs = node_costs(t, cost, alpha);
  std::vector<std::size_t> out;
  for (std::size_t e = 0; e < t.link_count(); ++e) {
    if (frozen[e] || !is_active_weight(alpha[static_cast<Eigen::Index>(e)])) continue;
    const auto& l = t.link(e);
    if (costs[l.u] > budget + 1e-12 || costs[l.v] > budget + 1e-12) out.push_back(e);
  }
  std::stable_sort(out.begin(), out.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(alpha[static_cast<Eigen::Index>(a)]) < std::abs(alpha[static_cast<Eigen::Index>(b)]);
  });
  return out;
}

GreedyOutcome greedy_sparsify(const Topology& t, const CostModel& cost, double budget, const SolverConfig& cfg) {
  if (!(budget > 0.0)) throw InputError("greedy: budget must be positive");
  cost.validate(t);
  cfg.validate();

  // No set of links helps a node whose computation alone is over budget.
  std::optional<int> hopeless;
  for (int i = 0; i < t.node_count() && !hopeless; ++i)
    if (cost.comp[i] > budget + 1e-12) hopeless = i;

  LinkMask frozen = LinkMask::none(t);
  Vector warm;
  std::vector<RemovalStep> history;
  int solver_iterations = 0;

  while (true) {
    SolveResult sol = solve_min_rho(t, frozen, cfg, warm);
    solver_iterations += sol.iterations;
    warm = sol.alpha;
    auto costs = node_costs(t, cost, sol.alpha);

    GreedyOutcome out{.design = MixingDesign(t, sol.alpha),
                      .rho_tilde = sol.rho_tilde,
                      .node_costs = costs,
                      .frozen = frozen,
                      .total_solver_iterations = solver_iterations};

    if (feasible(costs, budget)) {
      out.history = std::move(history);
      if (is_connected(t, LinkMask::from_weights(sol.alpha)) && sol.rho_tilde < 1.0) {
        out.success = true;
      } else {
        out.failure = GreedyFailure::Disconnection;
        out.diagnostic = "budget met but the activated links do not connect the graph";
      }
      return out;
    }

    if (hopeless) {
      out.history = std::move(history);
      out.failure = GreedyFailure::BudgetUnreachable;
      out.diagnostic = "computation cost of node " + std::to_string(*hopeless) + " alone exceeds the budget";
      return out;
    }
    const auto candidates = removal_candidates(t, cost, budget, frozen, sol.alpha);
    if (candidates.empty()) {
      out.history = std::move(history);
      out.failure = GreedyFailure::BudgetUnreachable;
      out.diagnostic = "a node exceeds the budget with no activated link left to drop";
      return out;
    }

    LinkMask available = LinkMask::all(t);
    for (std::size_t e = 0; e < t.link_count(); ++e)
      if (frozen[e]) available.set(e, false);

    RemovalStep step;
    step.rho_tilde = sol.rho_tilde;
    step.alpha = sol.alpha;
    bool chosen = false;
    for (std::size_t c : candidates) {
      LinkMask trial = available;
      trial.set(c, false);
      if (is_connected(t, trial)) {
        step.link = c;
        step.abs_alpha = std::abs(sol.alpha[static_cast<Eigen::Index>(c)]);
        chosen = true;
        break;
      }
      step.skipped.push_back(c);
    }
    if (!chosen) {
      out.history = std::move(history);
      out.failure = GreedyFailure::Disconnection;
      out.diagnostic = "every over-budget link is needed to keep the graph connected (" +
                       std::to_string(candidates.size()) + " candidates)";
      return out;
    }
    frozen.set(step.link);
    history.push_back(std::move(step));
  }
}

}  // namespace mixdesign
