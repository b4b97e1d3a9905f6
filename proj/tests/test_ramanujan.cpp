#include "doctest.h"

#include <set>

#include "mixdesign/ramanujan.hpp"
#include "oracles.hpp"

using namespace mixdesign;

TEST_CASE("random regular graphs are simple and exactly regular") {
  for (int m : {10, 33, 64}) {
    for (int d : {2, 3, 5, 8, m - 2}) {
      if (m * d % 2) continue;
      for (std::uint64_t s = 0; s < 5; ++s) {
        const auto g = random_regular(RegularGraphSpec{.nodes = m, .degree = d, .seed = s});
        std::set<std::pair<int, int>> seen;
        for (const auto& l : g.links()) {
          CHECK(l.u != l.v);
          CHECK(seen.insert({l.u, l.v}).second);
        }
        for (int deg : node_degrees(g, LinkMask::all(g))) CHECK(deg == d);
      }
    }
  }
}

TEST_CASE("regular graph parameters are validated") {
  CHECK_THROWS_AS((RegularGraphSpec{.nodes = 5, .degree = 3}.validate()), InputError);
  CHECK_THROWS_AS((RegularGraphSpec{.nodes = 5, .degree = 1}.validate()), InputError);
  CHECK_THROWS_AS((RegularGraphSpec{.nodes = 5, .degree = 5}.validate()), InputError);
  CHECK_NOTHROW(RegularGraphSpec{.nodes = 6, .degree = 3}.validate());
}

TEST_CASE("complete graphs are Ramanujan") {
  for (int m = 3; m <= 12; ++m) CHECK(is_ramanujan(complete_graph(m)));
}

TEST_CASE("Ramanujan test against Jacobi spectrum") {
  // Cycle C_n: eigenvalues 2 - 2cos(2 pi k / n) all lie in [0, 4] = [d - 2, d + 2].
  CHECK(is_ramanujan(cycle_graph(9)));
  // A path is not regular.
  CHECK_THROWS_AS(regular_degree(path_graph(4)), InputError);
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto g = random_regular(RegularGraphSpec{.nodes = 16, .degree = 3, .seed = s});
    const auto ev = oracle::eigenvalues(oracle::laplacian(g, std::vector<double>(g.link_count(), 1.0)));
    const double lo = 3 - 2 * std::sqrt(2.0), hi = 3 + 2 * std::sqrt(2.0);
    bool inside = true;
    for (std::size_t i = 1; i < ev.size(); ++i) inside = inside && ev[i] >= lo - 1e-9 && ev[i] <= hi + 1e-9;
    CHECK(is_ramanujan(g) == inside);
  }
}

TEST_CASE("Ramanujan designs meet the rho bound and carry base costs") {
  const auto base = complete_graph(20, 0.1, 0.5);
  for (int d : {3, 4, 5, 6}) {
    for (std::uint64_t s = 0; s < 5; ++s) {
      const auto r = ramanujan_mixing(RegularGraphSpec{.nodes = 20, .degree = d, .seed = s}, base);
      CHECK(rho_deterministic(r.design) <= ramanujan_rho_bound(d) + 1e-9);
      for (int deg : node_degrees(r.design.topology, r.design.active())) CHECK(deg == d);
      for (std::size_t e = 0; e < base.link_count(); ++e) {
        const double a = r.design.alpha[e];
        CHECK((a == 0.0 || a == doctest::Approx(1.0 / d)));
      }
      CHECK(r.design.topology == base);
    }
  }
  CHECK_THROWS_AS(ramanujan_mixing(RegularGraphSpec{.nodes = 6, .degree = 2}, path_graph(6)), InputError);
}

TEST_CASE("rho bound formula") {
  CHECK(ramanujan_rho_bound(2) == doctest::Approx(1.0));
  CHECK(ramanujan_rho_bound(3) == doctest::Approx(8.0 / 9.0));
  CHECK(ramanujan_rho_bound(6) == doctest::Approx(20.0 / 36.0));
}

TEST_CASE("degree budget") {
  const auto t = complete_graph(10, 0.5, 2.0);
  const auto cost = CostModel::from_topology(t);
  CHECK(degree_budget(t, cost, 0.5 + 3 * 2.0) == 3);
  CHECK(degree_budget(t, cost, 0.5 + 3 * 2.0 - 1e-6) == 2);
  CHECK(degree_budget(t, cost, 100.0) == 9);
  CHECK_THROWS_AS(degree_budget(t, cost, 0.1), InputError);
}
