#include "doctest.h"

#include <random>

#include "mixdesign/topology.hpp"
#include "oracles.hpp"

using namespace mixdesign;

TEST_CASE("parse: headers, per-link and per-direction costs") {
  const auto t = parse_topology(
      "# a comment\n"
      "#comp_cost 0.5\n"
      "#comm_cost 2\n"
      "#node 1 0.25\n"
      "0 1\n"
      "2 1 3.0\n"
      "0 2 1.0 4.0\n");
  CHECK(t.node_count() == 3);
  REQUIRE(t.link_count() == 3);
  CHECK(t.comp_cost() == std::vector<double>{0.5, 0.25, 0.5});
  // links are canonical (u < v) and sorted
  CHECK(t.link(0).u == 0);
  CHECK(t.link(0).v == 1);
  CHECK(t.link(0).cost_u == 2.0);
  CHECK(t.link(1).u == 0);
  CHECK(t.link(1).v == 2);
  CHECK(t.link(1).cost_u == 1.0);
  CHECK(t.link(1).cost_v == 4.0);
  CHECK(t.link(2).u == 1);
  CHECK(t.link(2).v == 2);
  CHECK(t.link(2).cost_u == 3.0);
}

TEST_CASE("parse: reversed per-direction link keeps costs with their nodes") {
  const auto t = parse_topology("2 0 1.0 4.0\n0 1\n1 2\n");
  const auto e = t.find_link(0, 2);
  REQUIRE(e);
  CHECK(t.link(*e).cost_at(2) == 1.0);
  CHECK(t.link(*e).cost_at(0) == 4.0);
}

TEST_CASE("parse: defaults come from the options") {
  const auto t = parse_topology("0 1\n", ParseOptions{.default_comm_cost = 0.7, .default_comp_cost = 0.1});
  CHECK(t.link(0).cost_u == 0.7);
  CHECK(t.comp_cost()[0] == 0.1);
}

TEST_CASE("parse: rejects malformed input") {
  CHECK_THROWS_AS(parse_topology("0 0\n"), InputError);
  CHECK_THROWS_AS(parse_topology("0 1\n1 0\n"), InputError);
  CHECK_THROWS_AS(parse_topology("0 1 -1\n"), InputError);
  CHECK_THROWS_AS(parse_topology("0 x\n"), InputError);
  CHECK_THROWS_AS(parse_topology("0 2\n"), InputError);  // node 1 missing
  CHECK_THROWS_AS(parse_topology(""), InputError);
  CHECK_NOTHROW(parse_topology("#nodes 3\n0 2\n"));
  CHECK_THROWS_AS(read_topology_file("/nonexistent/file.txt"), InputError);
}

TEST_CASE("round trip keeps links and costs") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    auto t = random_geometric_graph(12, 0.5, trial, 0.01 * trial, 0.5);
    std::vector<Link> links(t.links().begin(), t.links().end());
    std::uniform_real_distribution<double> c(0.0, 3.0);
    for (auto& l : links) {
      l.cost_u = c(rng);
      l.cost_v = c(rng);
    }
    std::vector<double> comp(12);
    for (auto& x : comp) x = c(rng);
    Topology orig(12, links, comp);
    CHECK(parse_topology(serialize_topology(orig)) == orig);
  }
}

TEST_CASE("degree sum is twice the active link count") {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 30; ++trial) {
    auto t = random_geometric_graph(15, 0.45, trial);
    LinkMask mask(t.link_count());
    for (std::size_t e = 0; e < t.link_count(); ++e) mask.set(e, rng() % 2);
    const auto deg = node_degrees(t, mask);
    long sum = 0;
    for (int d : deg) sum += d;
    CHECK(sum == 2 * static_cast<long>(mask.count()));
  }
}

TEST_CASE("connectivity agrees with BFS and is monotone") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 40; ++trial) {
    auto t = random_geometric_graph(10, 0.5, 100 + trial);
    LinkMask mask(t.link_count());
    std::vector<bool> use(t.link_count(), false);
    bool was = false;
    for (std::size_t e : std::vector<std::size_t>([&] {
           std::vector<std::size_t> order(t.link_count());
           for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
           std::shuffle(order.begin(), order.end(), rng);
           return order;
         }())) {
      mask.set(e);
      use[e] = true;
      const bool now = is_connected(t, mask);
      CHECK(now == oracle::connected(t, use));
      CHECK((!was || now));
      was = now;
    }
    CHECK(was);
  }
}

TEST_CASE("incidence matrix reproduces the Laplacian") {
  auto t = random_geometric_graph(8, 0.6, 3);
  Vector alpha = Vector::LinSpaced(t.link_count(), 0.1, 0.9);
  const Matrix b = incidence_matrix(t);
  const Matrix l = b * alpha.asDiagonal() * b.transpose();
  const auto ref = oracle::laplacian(t, oracle::to_std(alpha));
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j) CHECK(l(i, j) == doctest::Approx(ref[i][j]).epsilon(1e-14));
}

TEST_CASE("generators") {
  CHECK(complete_graph(6).link_count() == 15);
  CHECK(complete_graph(6).is_complete());
  CHECK_FALSE(path_graph(6).is_complete());
  CHECK(path_graph(6).link_count() == 5);
  CHECK(cycle_graph(6).link_count() == 6);
  const auto s = star_graph(5);
  CHECK(node_degrees(s, LinkMask::all(s))[0] == 4);
  const auto g = random_geometric_graph(33, 0.4, 7);
  CHECK(is_connected(g, LinkMask::all(g)));
  CHECK(random_geometric_graph(33, 0.4, 7) == g);
}
