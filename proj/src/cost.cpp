#include "mixdesign/cost.hpp"

#include <algorithm>

namespace mixdesign {

CostModel CostModel::from_topology(const Topology& t) {
  CostModel c;
  c.comp = t.comp_cost();
  for (const auto& l : t.links()) {
    c.comm_u.push_back(l.cost_u);
    c.comm_v.push_back(l.cost_v);
  }
  return c;
}

CostModel CostModel::uniform(const Topology& t, double comp, double comm) {
  CostModel c;
  c.comp.assign(t.node_count(), comp);
  c.comm_u.assign(t.link_count(), comm);
  c.comm_v.assign(t.link_count(), comm);
  c.validate(t);
  return c;
}

void CostModel::validate(const Topology& t) const {
  if (static_cast<int>(comp.size()) != t.node_count())
    throw InputError("cost model: computation costs do not match node count");
  if (comm_u.size() != t.link_count() || comm_v.size() != t.link_count())
    throw InputError("cost model: communication costs do not match link count");
  auto negative = [](double x) { return !(x >= 0.0); };
  if (std::any_of(comp.begin(), comp.end(), negative) || std::any_of(comm_u.begin(), comm_u.end(), negative) ||
      std::any_of(comm_v.begin(), comm_v.end(), negative))
    throw InputError("cost model: negative cost");
}

std::vector<double> node_costs(const Topology& t, const CostModel& cost, const ActiveSet& active) {
  cost.validate(t);
  if (active.size() != t.link_count()) throw InputError("node_costs: mask size does not match link count");
  std::vector<double> c = cost.comp;
  for (std::size_t e = 0; e < t.link_count(); ++e) {
    if (!active[e]) continue;
    c[t.link(e).u] += cost.comm_u[e];
    c[t.link(e).v] += cost.comm_v[e];
  }
  return c;
}

std::vector<double> node_costs(const Topology& t, const CostModel& cost, const Vector& alpha) {
  if (static_cast<std::size_t>(alpha.size()) != t.link_count())
    throw InputError("node_costs: weight vector length does not match link count");
  return node_costs(t, cost, LinkMask::from_weights(alpha));
}

std::vector<double> expected_node_costs(const MixingDistribution& dist, const CostModel& cost) {
  std::vector<double> out(cost.comp.size(), 0.0);
  for (const auto& [design, p] : dist.entries()) {
    auto c = node_costs(design.topology, cost, design.alpha);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += p * c[i];
  }
  return out;
}

double max_node_cost(std::span<const double> costs) {
  if (costs.empty()) return 0.0;
  return *std::max_element(costs.begin(), costs.end());
}

bool feasible(std::span<const double> costs, double budget) {
  return std::all_of(costs.begin(), costs.end(), [budget](double c) { return c <= budget + 1e-12; });
}

}  // namespace mixdesign
