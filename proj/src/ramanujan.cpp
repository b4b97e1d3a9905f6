#include "mixdesign/ramanujan.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <random>

namespace mixdesign {

void RegularGraphSpec::validate() const {
  if (degree < 2) throw InputError("regular graph: degree must be >= 2");
  if (degree >= nodes) throw InputError("regular graph: degree must be smaller than the node count");
  if ((static_cast<long long>(nodes) * degree) % 2 != 0)
    throw InputError("regular graph: nodes * degree must be even");
  if (max_attempts < 1 || max_pairing_restarts < 1) throw InputError("regular graph: attempt limits must be >= 1");
}

namespace {

using EdgeList = std::vector<std::pair<int, int>>;

// One stub-pairing pass; nullopt when the leftover stubs cannot be paired.
std::optional<EdgeList> try_pairing(int m, int d, std::mt19937_64& rng) {
  std::vector<std::uint8_t> adj(static_cast<std::size_t>(m) * m, 0);
  auto connected = [&](int a, int b) { return adj[static_cast<std::size_t>(a) * m + b] != 0; };
  EdgeList edges;
  edges.reserve(static_cast<std::size_t>(m) * d / 2);

  std::vector<int> stubs;
  stubs.reserve(static_cast<std::size_t>(m) * d);
  for (int i = 0; i < m; ++i)
    for (int k = 0; k < d; ++k) stubs.push_back(i);

  std::vector<int> leftover(m, 0);
  while (!stubs.empty()) {
    std::shuffle(stubs.begin(), stubs.end(), rng);
    std::fill(leftover.begin(), leftover.end(), 0);
    bool any_left = false;
    for (std::size_t i = 0; i + 1 < stubs.size(); i += 2) {
      int a = stubs[i], b = stubs[i + 1];
      if (a != b && !connected(a, b)) {
        adj[static_cast<std::size_t>(a) * m + b] = adj[static_cast<std::size_t>(b) * m + a] = 1;
        edges.emplace_back(std::min(a, b), std::max(a, b));
      } else {
        ++leftover[a];
        ++leftover[b];
        any_left = true;
      }
    }
    if (!any_left) break;

    // Give up unless some two distinct leftover nodes can still be joined.
    std::vector<int> pending;
    for (int i = 0; i < m; ++i)
      if (leftover[i] > 0) pending.push_back(i);
    bool suitable = false;
    for (std::size_t x = 0; x < pending.size() && !suitable; ++x)
      for (std::size_t y = x + 1; y < pending.size() && !suitable; ++y)
        suitable = !connected(pending[x], pending[y]);
    if (!suitable) return std::nullopt;

    stubs.clear();
    for (int i : pending)
      for (int k = 0; k < leftover[i]; ++k) stubs.push_back(i);
  }
  return edges;
}

EdgeList draw_regular(int m, int d, std::mt19937_64& rng, int max_restarts) {
  if (d == 0) return {};
  for (int restart = 0; restart < max_restarts; ++restart) {
    if (auto edges = try_pairing(m, d, rng)) return *edges;
  }
  throw ComputeError("random_regular: no simple " + std::to_string(d) + "-regular pairing on " + std::to_string(m) +
                     " nodes within " + std::to_string(max_restarts) + " restarts");
}

}  // namespace

Topology random_regular(const RegularGraphSpec& spec) {
  spec.validate();
  const int m = spec.nodes;
  const int d = spec.degree;
  std::mt19937_64 rng(derive_seed(spec.seed, 0x7e6));

  std::vector<Link> links;
  if (2 * d > m - 1) {
    EdgeList sparse = draw_regular(m, m - 1 - d, rng, spec.max_pairing_restarts);
    std::vector<std::uint8_t> adj(static_cast<std::size_t>(m) * m, 0);
    for (auto [a, b] : sparse) adj[static_cast<std::size_t>(a) * m + b] = 1;
    for (int a = 0; a < m; ++a)
      for (int b = a + 1; b < m; ++b)
        if (!adj[static_cast<std::size_t>(a) * m + b]) links.push_back({a, b, 1.0, 1.0});
  } else {
    for (auto [a, b] : draw_regular(m, d, rng, spec.max_pairing_restarts)) links.push_back({a, b, 1.0, 1.0});
  }
  return Topology(m, std::move(links), {});
}

int regular_degree(const Topology& t) {
  auto deg = node_degrees(t, LinkMask::all(t));
  if (std::adjacent_find(deg.begin(), deg.end(), std::not_equal_to<>()) != deg.end())
    throw InputError("graph is not regular");
  return deg.front();
}

bool is_ramanujan(const Topology& t) {
  const int d = regular_degree(t);
  if (d == 0) return false;
  const double spread = 2.0 * std::sqrt(static_cast<double>(d - 1));
  const double lo = d - spread - 1e-9;
  const double hi = d + spread + 1e-9;
  auto eig = eig_symmetric(laplacian(t, Vector::Ones(static_cast<Eigen::Index>(t.link_count()))));
  for (Eigen::Index i = 1; i < eig.values.size(); ++i) {
    if (eig.values[i] < lo || eig.values[i] > hi) return false;
  }
  return true;
}

double ramanujan_rho_bound(int d) { return 4.0 * (d - 1) / (static_cast<double>(d) * d); }

RamanujanDesign ramanujan_mixing(const RegularGraphSpec& spec, const Topology& base) {
  spec.validate();
  if (base.node_count() != spec.nodes || !base.is_complete())
    throw InputError("ramanujan_mixing: base topology must be the complete graph on " + std::to_string(spec.nodes) +
                     " nodes");
  for (int attempt = 0; attempt < spec.max_attempts; ++attempt) {
    RegularGraphSpec draw = spec;
    draw.seed = derive_seed(spec.seed, 0x4a11, attempt);
    Topology h = random_regular(draw);
    if (!is_ramanujan(h)) continue;

    Vector alpha = Vector::Zero(static_cast<Eigen::Index>(base.link_count()));
    std::vector<Link> links;
    for (const auto& l : h.links()) {
      const std::size_t e = *base.find_link(l.u, l.v);
      alpha[static_cast<Eigen::Index>(e)] = 1.0 / spec.degree;
      links.push_back(base.link(e));
    }
    return RamanujanDesign{MixingDesign(base, std::move(alpha)),
                           Topology(spec.nodes, std::move(links), base.comp_cost()), attempt + 1};
  }
  throw ComputeError("ramanujan_mixing: no Ramanujan " + std::to_string(spec.degree) + "-regular graph on " +
                     std::to_string(spec.nodes) + " nodes within " + std::to_string(spec.max_attempts) +
                     " draws");
}

RamanujanDesign ramanujan_mixing(const RegularGraphSpec& spec) {
  return ramanujan_mixing(spec, complete_graph(std::max(spec.nodes, 2)));
}

int degree_budget(const Topology& t, const CostModel& cost, double budget) {
  cost.validate(t);
  int d = std::numeric_limits<int>::max();
  for (int i = 0; i < t.node_count(); ++i) {
    const double spare = budget - cost.comp[i];
    if (spare < -1e-12)
      throw InputError("budget " + format_double(budget) + " is below the computation cost of node " +
                       std::to_string(i));
    const auto& inc = t.incident()[i];
    int di = static_cast<int>(inc.size());
    if (!inc.empty()) {
      auto at = [&](std::size_t e) { return t.link(e).u == i ? cost.comm_u[e] : cost.comm_v[e]; };
      const double cb = at(inc.front());
      for (std::size_t e : inc) {
        if (at(e) != cb)
          throw InputError("degree_budget: links at node " + std::to_string(i) + " have different costs");
      }
      if (cb > 0.0) di = std::min(di, static_cast<int>(std::floor(std::max(spare, 0.0) / cb + 1e-9)));
    }
    d = std::min(d, di);
  }
  return d;
}

}  // namespace mixdesign
