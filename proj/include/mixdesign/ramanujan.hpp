#pragma once

#include <cstdint>

#include "mixdesign/cost.hpp"
#include "mixdesign/spectral.hpp"
#include "mixdesign/topology.hpp"

namespace mixdesign {

struct RegularGraphSpec {
  int nodes = 0;
  int degree = 0;
  std::uint64_t seed = 0;
  /// Ramanujan draws before giving up.
  int max_attempts = 1000;
  /// Pairing restarts allowed per draw of a regular graph.
  int max_pairing_restarts = 10000;

  /// Requires 2 <= d < m and m * d even.
  void validate() const;
};

/// Uniform-ish simple d-regular graph from stub pairing. Stubs are paired
/// at random; pairs that would form a self-loop or a repeated edge go back
/// into the pool and are re-paired, and the whole pairing restarts when the
/// pool can no longer be completed. For d > (m - 1) / 2 the complement of an
/// (m - 1 - d)-regular draw is returned.
Topology random_regular(const RegularGraphSpec& spec);

/// Regular degree of `t`; throws InputError if `t` is not regular.
int regular_degree(const Topology& t);

/// Every nonzero-index Laplacian eigenvalue (lambda_2 ... lambda_m) lies in
/// [d - 2 sqrt(d - 1), d + 2 sqrt(d - 1)], closed, with 1e-9 slack.
bool is_ramanujan(const Topology& t);

/// 4 (d - 1) / d^2.
double ramanujan_rho_bound(int d);

struct RamanujanDesign {
  /// Weights over the complete base graph: 1/d on the links of `graph`.
  MixingDesign design;
  Topology graph;
  int attempts = 0;
};

/// Draws random d-regular graphs until one is Ramanujan and weights it 1/d.
/// `base` must be the complete graph on spec.nodes nodes; its costs carry
/// over into the design.
RamanujanDesign ramanujan_mixing(const RegularGraphSpec& spec, const Topology& base);
RamanujanDesign ramanujan_mixing(const RegularGraphSpec& spec);

/// d = min_i floor((budget - c^a_i) / c^b_i), capped at each node's degree
/// in `t`. Requires every link at node i to cost the same c^b_i at i.
int degree_budget(const Topology& t, const CostModel& cost, double budget);

}  // namespace mixdesign
