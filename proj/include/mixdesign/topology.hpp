#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mixdesign/common.hpp"

namespace mixdesign {

/// Undirected candidate link between nodes u < v.
///
/// Each endpoint pays its own communication cost when the link is activated:
/// `cost_u` is charged to u and `cost_v` to v. Both are equal unless a
/// per-direction override was given.
struct Link {
  int u = 0;
  int v = 0;
  double cost_u = 0.0;
  double cost_v = 0.0;

  double cost_at(int node) const { return node == u ? cost_u : cost_v; }
  int other(int node) const { return node == u ? v : u; }
  bool symmetric_cost() const { return cost_u == cost_v; }
};

/// Base topology G = (V, E) with per-link communication and per-node
/// computation costs (Wh per iteration).
///
/// Links are stored in canonical order: u < v, sorted lexicographically.
/// The position of a link in that order is its index everywhere else
/// (weight vectors, masks, incidence columns).
class Topology {
 public:
  /// Validates and canonicalizes. Throws InputError on self-loops,
  /// duplicate links, out-of-range ids, negative costs or m < 2.
  Topology(int node_count, std::vector<Link> links, std::vector<double> comp_cost);

  int node_count() const { return node_count_; }
  std::size_t link_count() const { return links_.size(); }
  std::span<const Link> links() const { return links_; }
  const Link& link(std::size_t index) const { return links_.at(index); }
  const std::vector<double>& comp_cost() const { return comp_cost_; }

  std::optional<std::size_t> find_link(int u, int v) const;

  /// Link indices incident to each node.
  const std::vector<std::vector<std::size_t>>& incident() const { return incident_; }

  bool is_complete() const;

  friend bool operator==(const Topology& a, const Topology& b);

 private:
  int node_count_;
  std::vector<Link> links_;
  std::vector<double> comp_cost_;
  std::vector<std::vector<std::size_t>> incident_;
};

bool operator==(const Link& a, const Link& b);

/// Boolean mask over the link list of a topology. Used both for the
/// activation set (true = link carries nonzero weight) and for sets of
/// frozen links.
class LinkMask {
 public:
  LinkMask() = default;
  explicit LinkMask(std::size_t size, bool value = false) : bits_(size, value ? 1 : 0) {}

  static LinkMask all(const Topology& t) { return LinkMask(t.link_count(), true); }
  static LinkMask none(const Topology& t) { return LinkMask(t.link_count(), false); }
  /// Links with |alpha_e| above the activation threshold.
  static LinkMask from_weights(const Vector& alpha);

  std::size_t size() const { return bits_.size(); }
  bool operator[](std::size_t i) const { return bits_[i] != 0; }
  void set(std::size_t i, bool value = true) { bits_.at(i) = value ? 1 : 0; }
  std::size_t count() const;

  friend bool operator==(const LinkMask&, const LinkMask&) = default;

 private:
  std::vector<std::uint8_t> bits_;
};

using ActiveSet = LinkMask;

struct ParseOptions {
  /// Communication cost for links that do not carry one and no
  /// `#comm_cost` header is present.
  double default_comm_cost = 1.0;
  /// Computation cost for nodes without a `#node` line when no
  /// `#comp_cost` header is present.
  double default_comp_cost = 0.0;
};

/// Parses the edge-list format:
///
///   # free-form comment
///   #nodes 5              optional; declares m (allows isolated nodes)
///   #comp_cost 0.0003342  optional document default for c^a
///   #comm_cost 0.0138     optional document default for c^b
///   #node 3 0.0004        per-node c^a
///   0 1                   link with default c^b
///   1 2 0.0138            link with symmetric c^b
///   2 3 0.01 0.02         link with c^b charged at 2 and at 3
///
/// Node ids must be dense: every id in [0, m) has to appear on a link or a
/// `#node` line unless `#nodes` declares the count explicitly.
Topology parse_topology(std::string_view text, const ParseOptions& options = {});

Topology read_topology_file(const std::filesystem::path& path, const ParseOptions& options = {});

/// Canonical text form; parse_topology(serialize_topology(t)) == t.
std::string serialize_topology(const Topology& t);

/// Dense m x |E| incidence matrix, +1 at u and -1 at v for link (u, v).
Matrix incidence_matrix(const Topology& t);

bool is_connected(const Topology& t, const ActiveSet& active);
std::vector<int> node_degrees(const Topology& t, const ActiveSet& active);

// Generators. All links get comm cost `comm`, all nodes comp cost `comp`.
Topology complete_graph(int m, double comp = 0.0, double comm = 1.0);
Topology path_graph(int m, double comp = 0.0, double comm = 1.0);
Topology cycle_graph(int m, double comp = 0.0, double comm = 1.0);
/// Star with center 0.
Topology star_graph(int m, double comp = 0.0, double comm = 1.0);
/// Unit-square random geometric graph; redraws until connected.
Topology random_geometric_graph(int m, double radius, std::uint64_t seed, double comp = 0.0,
                                double comm = 1.0, int max_attempts = 1000);

}  // namespace mixdesign
