#pragma once

#include <span>
#include <vector>

#include "mixdesign/common.hpp"
#include "mixdesign/spectral.hpp"
#include "mixdesign/topology.hpp"

namespace mixdesign {

/// Per-iteration energy model: node i pays comp[i] for its local step and
/// comm_at(e, i) for every activated link e incident to it (Wh).
struct CostModel {
  std::vector<double> comp;
  std::vector<double> comm_u;  // charged to link(e).u
  std::vector<double> comm_v;  // charged to link(e).v

  /// Takes the costs recorded on the topology.
  static CostModel from_topology(const Topology& t);
  /// Same c^a at every node and c^b at every link endpoint.
  static CostModel uniform(const Topology& t, double comp, double comm);

  void validate(const Topology& t) const;
};

std::vector<double> node_costs(const Topology& t, const CostModel& cost, const ActiveSet& active);
/// c_i(alpha) = c^a_i + sum of c^b over incident links with |alpha_e| > 1e-9.
std::vector<double> node_costs(const Topology& t, const CostModel& cost, const Vector& alpha);
/// Probability-weighted per-node cost. Every design of `dist` must live on
/// the topology the cost model describes.
std::vector<double> expected_node_costs(const MixingDistribution& dist, const CostModel& cost);

double max_node_cost(std::span<const double> costs);
/// Every node within budget + 1e-12.
bool feasible(std::span<const double> costs, double budget);

}  // namespace mixdesign
