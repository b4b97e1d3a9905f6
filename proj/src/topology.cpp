#include "mixdesign/topology.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include "mixdesign/union_find.hpp"

namespace mixdesign {

Topology::Topology(int node_count, std::vector<Link> links, std::vector<double> comp_cost)
    : node_count_(node_count), links_(std::move(links)), comp_cost_(std::move(comp_cost)) {
  if (node_count_ < 2) throw InputError("topology needs at least 2 nodes");
  if (comp_cost_.empty()) comp_cost_.assign(node_count_, 0.0);
  if (static_cast<int>(comp_cost_.size()) != node_count_)
    throw InputError("computation cost vector does not match node count");
  for (int i = 0; i < node_count_; ++i) {
    if (!(comp_cost_[i] >= 0.0)) throw InputError("negative computation cost at node " + std::to_string(i));
  }
  for (auto& l : links_) {
    if (l.u == l.v) throw InputError("self-loop at node " + std::to_string(l.u));
    if (l.u > l.v) {
      std::swap(l.u, l.v);
      std::swap(l.cost_u, l.cost_v);
    }
    if (l.u < 0 || l.v >= node_count_)
      throw InputError("link (" + std::to_string(l.u) + "," + std::to_string(l.v) + ") out of range");
    if (!(l.cost_u >= 0.0) || !(l.cost_v >= 0.0))
      throw InputError("negative communication cost on link (" + std::to_string(l.u) + "," +
                       std::to_string(l.v) + ")");
  }
  std::sort(links_.begin(), links_.end(),
            [](const Link& a, const Link& b) { return std::tie(a.u, a.v) < std::tie(b.u, b.v); });
  for (std::size_t i = 1; i < links_.size(); ++i) {
    if (links_[i].u == links_[i - 1].u && links_[i].v == links_[i - 1].v)
      throw InputError("duplicate link (" + std::to_string(links_[i].u) + "," +
                       std::to_string(links_[i].v) + ")");
  }
  incident_.assign(node_count_, {});
  for (std::size_t e = 0; e < links_.size(); ++e) {
    incident_[links_[e].u].push_back(e);
    incident_[links_[e].v].push_back(e);
  }
}

std::optional<std::size_t> Topology::find_link(int u, int v) const {
  if (u > v) std::swap(u, v);
  auto it = std::lower_bound(links_.begin(), links_.end(), std::pair{u, v},
                             [](const Link& l, const std::pair<int, int>& key) {
                               return std::tie(l.u, l.v) < std::tie(key.first, key.second);
                             });
  if (it == links_.end() || it->u != u || it->v != v) return std::nullopt;
  return static_cast<std::size_t>(it - links_.begin());
}

bool Topology::is_complete() const {
  auto m = static_cast<std::size_t>(node_count_);
  return links_.size() == m * (m - 1) / 2;
}

bool operator==(const Link& a, const Link& b) {
  return a.u == b.u && a.v == b.v && a.cost_u == b.cost_u && a.cost_v == b.cost_v;
}

bool operator==(const Topology& a, const Topology& b) {
  return a.node_count_ == b.node_count_ && a.links_ == b.links_ && a.comp_cost_ == b.comp_cost_;
}

LinkMask LinkMask::from_weights(const Vector& alpha) {
  LinkMask mask(static_cast<std::size_t>(alpha.size()));
  for (Eigen::Index e = 0; e < alpha.size(); ++e) mask.set(e, is_active_weight(alpha[e]));
  return mask;
}

std::size_t LinkMask::count() const {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

int parse_int(std::string_view tok, std::size_t line_no) {
  int value = 0;
  auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc() || p != tok.data() + tok.size())
    throw InputError("line " + std::to_string(line_no) + ": expected integer, got '" + std::string(tok) + "'");
  return value;
}

double parse_real(std::string_view tok, std::size_t line_no) {
  double value = 0.0;
  auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc() || p != tok.data() + tok.size())
    throw InputError("line " + std::to_string(line_no) + ": expected number, got '" + std::string(tok) + "'");
  if (value < 0.0) throw InputError("line " + std::to_string(line_no) + ": negative cost");
  return value;
}

struct RawLink {
  int u, v;
  std::optional<double> cost_u, cost_v;
};

}  // namespace

Topology parse_topology(std::string_view text, const ParseOptions& options) {
  std::optional<int> declared_nodes;
  double comm_default = options.default_comm_cost;
  double comp_default = options.default_comp_cost;
  std::map<int, double> node_costs;
  std::vector<RawLink> raw;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;

    auto tokens = split_ws(line);
    if (tokens.empty()) continue;
    if (tokens[0].front() == '#') {
      std::string_view key = tokens[0];
      if (key == "#nodes" && tokens.size() == 2) {
        declared_nodes = parse_int(tokens[1], line_no);
      } else if (key == "#comp_cost" && tokens.size() == 2) {
        comp_default = parse_real(tokens[1], line_no);
      } else if (key == "#comm_cost" && tokens.size() == 2) {
        comm_default = parse_real(tokens[1], line_no);
      } else if (key == "#node" && tokens.size() == 3) {
        int id = parse_int(tokens[1], line_no);
        if (id < 0) throw InputError("line " + std::to_string(line_no) + ": negative node id");
        if (!node_costs.emplace(id, parse_real(tokens[2], line_no)).second)
          throw InputError("line " + std::to_string(line_no) + ": node " + std::to_string(id) + " listed twice");
      }
      continue;  // anything else starting with '#' is a comment
    }
    if (tokens.size() < 2 || tokens.size() > 4)
      throw InputError("line " + std::to_string(line_no) + ": expected 'u v [c_b [c_b_at_v]]'");
    RawLink r{parse_int(tokens[0], line_no), parse_int(tokens[1], line_no), std::nullopt, std::nullopt};
    if (r.u < 0 || r.v < 0) throw InputError("line " + std::to_string(line_no) + ": negative node id");
    if (r.u == r.v) throw InputError("line " + std::to_string(line_no) + ": self-loop at node " + std::to_string(r.u));
    if (tokens.size() >= 3) r.cost_u = r.cost_v = parse_real(tokens[2], line_no);
    if (tokens.size() == 4) r.cost_v = parse_real(tokens[3], line_no);
    raw.push_back(r);
  }

  int max_id = -1;
  std::vector<bool> seen;
  auto mark = [&](int id) {
    max_id = std::max(max_id, id);
    if (static_cast<int>(seen.size()) <= id) seen.resize(id + 1, false);
    seen[id] = true;
  };
  for (const auto& r : raw) {
    mark(r.u);
    mark(r.v);
  }
  for (const auto& [id, cost] : node_costs) mark(id);

  int m = max_id + 1;
  if (declared_nodes) {
    if (*declared_nodes < m)
      throw InputError("#nodes " + std::to_string(*declared_nodes) + " is smaller than the largest node id + 1");
    m = *declared_nodes;
  } else {
    for (int i = 0; i < m; ++i) {
      if (!seen[i]) throw InputError("node ids are not dense: id " + std::to_string(i) + " never appears");
    }
  }
  if (m < 2) throw InputError("topology needs at least 2 nodes");

  std::vector<double> comp(m, comp_default);
  for (const auto& [id, cost] : node_costs) comp[id] = cost;

  std::vector<Link> links;
  links.reserve(raw.size());
  for (const auto& r : raw) {
    links.push_back(Link{r.u, r.v, r.cost_u.value_or(comm_default), r.cost_v.value_or(comm_default)});
  }
  return Topology(m, std::move(links), std::move(comp));
}

Topology read_topology_file(const std::filesystem::path& path, const ParseOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open topology file '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_topology(ss.str(), options);
}

std::string serialize_topology(const Topology& t) {
  std::ostringstream out;
  out << "#nodes " << t.node_count() << '\n';
  for (int i = 0; i < t.node_count(); ++i) {
    out << "#node " << i << ' ' << format_double(t.comp_cost()[i]) << '\n';
  }
  for (const auto& l : t.links()) {
    out << l.u << ' ' << l.v << ' ' << format_double(l.cost_u);
    if (!l.symmetric_cost()) out << ' ' << format_double(l.cost_v);
    out << '\n';
  }
  return out.str();
}

Matrix incidence_matrix(const Topology& t) {
  Matrix b = Matrix::Zero(t.node_count(), static_cast<Eigen::Index>(t.link_count()));
  for (std::size_t e = 0; e < t.link_count(); ++e) {
    const auto& l = t.link(e);
    b(l.u, e) = 1.0;
    b(l.v, e) = -1.0;
  }
  return b;
}

bool is_connected(const Topology& t, const ActiveSet& active) {
  if (active.size() != t.link_count()) throw InputError("active set size does not match link count");
  UnionFind uf(t.node_count());
  for (std::size_t e = 0; e < t.link_count(); ++e) {
    if (active[e]) uf.unite(t.link(e).u, t.link(e).v);
  }
  return uf.components() == 1;
}

std::vector<int> node_degrees(const Topology& t, const ActiveSet& active) {
  if (active.size() != t.link_count()) throw InputError("active set size does not match link count");
  std::vector<int> deg(t.node_count(), 0);
  for (std::size_t e = 0; e < t.link_count(); ++e) {
    if (!active[e]) continue;
    ++deg[t.link(e).u];
    ++deg[t.link(e).v];
  }
  return deg;
}

Topology complete_graph(int m, double comp, double comm) {
  std::vector<Link> links;
  for (int u = 0; u < m; ++u)
    for (int v = u + 1; v < m; ++v) links.push_back({u, v, comm, comm});
  return Topology(m, std::move(links), std::vector<double>(std::max(m, 0), comp));
}

Topology path_graph(int m, double comp, double comm) {
  std::vector<Link> links;
  for (int u = 0; u + 1 < m; ++u) links.push_back({u, u + 1, comm, comm});
  return Topology(m, std::move(links), std::vector<double>(std::max(m, 0), comp));
}

Topology cycle_graph(int m, double comp, double comm) {
  if (m < 3) throw InputError("cycle needs at least 3 nodes");
  std::vector<Link> links;
  for (int u = 0; u < m; ++u) links.push_back({u, (u + 1) % m, comm, comm});
  return Topology(m, std::move(links), std::vector<double>(m, comp));
}

Topology star_graph(int m, double comp, double comm) {
  std::vector<Link> links;
  for (int v = 1; v < m; ++v) links.push_back({0, v, comm, comm});
  return Topology(m, std::move(links), std::vector<double>(std::max(m, 0), comp));
}

Topology random_geometric_graph(int m, double radius, std::uint64_t seed, double comp, double comm,
                                int max_attempts) {
  if (m < 2) throw InputError("topology needs at least 2 nodes");
  if (!(radius > 0.0)) throw InputError("radius must be positive");
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    std::mt19937_64 rng(derive_seed(seed, 0x5eed, attempt));
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<std::pair<double, double>> pts(m);
    for (auto& p : pts) {
      p.first = unif(rng);
      p.second = unif(rng);
    }
    std::vector<Link> links;
    for (int u = 0; u < m; ++u) {
      for (int v = u + 1; v < m; ++v) {
        double dx = pts[u].first - pts[v].first;
        double dy = pts[u].second - pts[v].second;
        if (dx * dx + dy * dy <= radius * radius) links.push_back({u, v, comm, comm});
      }
    }
    Topology t(m, std::move(links), std::vector<double>(m, comp));
    if (is_connected(t, LinkMask::all(t))) return t;
  }
  throw ComputeError("random_geometric_graph: no connected draw within " + std::to_string(max_attempts) +
                     " attempts");
}

}  // namespace mixdesign
