#include "doctest.h"

#include "greedy_checks.hpp"
#include "mixdesign/sparsifier.hpp"

using namespace mixdesign;

TEST_CASE("star S4 at budget 2 fails") {
  const auto t = star_graph(4);
  const auto g = greedy_sparsify(t, CostModel::from_topology(t), 2.0, SolverConfig{});
  CHECK_FALSE(g.success);
  CHECK(g.failure == GreedyFailure::Disconnection);
  CHECK_FALSE(g.diagnostic.empty());
  CHECK(greedy_checks::check(t, 2.0, g).empty());
}

TEST_CASE("K4 at budget 2 gives a connected degree-2 design") {
  const auto t = complete_graph(4);
  const auto g = greedy_sparsify(t, CostModel::from_topology(t), 2.0, SolverConfig{});
  REQUIRE(g.success);
  const auto deg = node_degrees(t, g.design.active());
  CHECK(*std::max_element(deg.begin(), deg.end()) <= 2);
  CHECK(is_connected(t, g.design.active()));
  CHECK(g.rho_tilde < 1.0);
  CHECK(g.history.size() == 2);
  CHECK(greedy_checks::check(t, 2.0, g).empty());
}

TEST_CASE("budget already met needs no removals") {
  const auto t = complete_graph(5);
  const auto g = greedy_sparsify(t, CostModel::from_topology(t), 10.0, SolverConfig{});
  CHECK(g.success);
  CHECK(g.history.empty());
  CHECK(g.rho_tilde < 1e-6);
}

TEST_CASE("budget below the computation cost is unreachable") {
  const auto t = complete_graph(4, 1.0, 1.0);
  const auto g = greedy_sparsify(t, CostModel::from_topology(t), 0.5, SolverConfig{});
  CHECK_FALSE(g.success);
  CHECK(g.failure == GreedyFailure::BudgetUnreachable);
  CHECK(to_string(g.failure) == "budget-unreachable");
}

TEST_CASE("histories replay on random geometric graphs") {
  for (std::uint64_t s = 0; s < 4; ++s) {
    const auto t = random_geometric_graph(14, 0.5, 700 + s);
    const auto cost = CostModel::from_topology(t);
    const double full = max_node_cost(node_costs(t, cost, LinkMask::all(t)));
    for (double frac : {0.4, 0.7}) {
      const double budget = frac * full;
      const auto g = greedy_sparsify(t, cost, budget, SolverConfig{.tolerance = 1e-10});
      INFO("seed " << s << " frac " << frac);
      CHECK(greedy_checks::check(t, budget, g, 1e-8) == "");
    }
  }
}

TEST_CASE("candidates are sorted by weight then index") {
  const auto t = complete_graph(4);
  Vector alpha(6);
  alpha << 0.3, -0.1, 0.1, 0.0, 0.2, 0.5;
  LinkMask frozen = LinkMask::none(t);
  frozen.set(5);
  const auto c = removal_candidates(t, CostModel::from_topology(t), 1.0, frozen, alpha);
  CHECK(c == std::vector<std::size_t>{1, 2, 4, 0});
}

TEST_CASE("rejects a nonpositive budget") {
  const auto t = complete_graph(3);
  CHECK_THROWS_AS(greedy_sparsify(t, CostModel::from_topology(t), 0.0, SolverConfig{}), InputError);
}
