#include "mixdesign/design_io.hpp"

#include <fstream>
#include <sstream>

namespace mixdesign {

using nlohmann::json;

json design_to_json(const MixingDesign& design, const CostModel& cost) {
  const Topology& t = design.topology;
  json links = json::array();
  for (std::size_t e = 0; e < t.link_count(); ++e) {
    const auto& l = t.link(e);
    links.push_back({{"u", l.u},
                     {"v", l.v},
                     {"alpha", design.alpha[static_cast<Eigen::Index>(e)]},
                     {"cost_u", l.cost_u},
                     {"cost_v", l.cost_v}});
  }
  const double rho_t = design.rho_tilde();
  return json{{"nodes", t.node_count()},
              {"comp_cost", t.comp_cost()},
              {"links", std::move(links)},
              {"links_active", design.active().count()},
              {"rho", rho_deterministic(design)},
              {"rho_tilde", rho_t},
              {"row_sum_max_err", design.row_sum_max_error()},
              {"node_costs", node_costs(t, cost, design.alpha)}};
}

json design_to_json(const MixingDesign& design) {
  return design_to_json(design, CostModel::from_topology(design.topology));
}

MixingDesign design_from_json(const json& doc) {
  try {
    const int m = doc.at("nodes").get<int>();
    std::vector<double> comp = doc.contains("comp_cost") ? doc.at("comp_cost").get<std::vector<double>>()
                                                         : std::vector<double>(std::max(m, 0), 0.0);
    std::vector<Link> links;
    std::vector<std::pair<std::pair<int, int>, double>> weights;
    for (const auto& l : doc.at("links")) {
      const int u = l.at("u").get<int>();
      const int v = l.at("v").get<int>();
      const double cu = l.value("cost_u", 0.0);
      const double cv = l.value("cost_v", cu);
      links.push_back({u, v, cu, cv});
      weights.push_back({{u, v}, l.at("alpha").get<double>()});
    }
    Topology t(m, std::move(links), std::move(comp));
    Vector alpha = Vector::Zero(static_cast<Eigen::Index>(t.link_count()));
    for (const auto& [uv, a] : weights) alpha[static_cast<Eigen::Index>(*t.find_link(uv.first, uv.second))] = a;
    return MixingDesign(std::move(t), std::move(alpha));
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed design document: ") + e.what());
  }
}

json solve_result_to_json(const MixingDesign& design, const SolveResult& r, const SolverConfig& cfg) {
  json doc = design_to_json(design);
  doc["solver"] = {{"rule", std::string(to_string(cfg.rule))},
                   {"tolerance", cfg.tolerance},
                   {"max_iterations", cfg.max_iterations},
                   {"iterations", r.iterations},
                   {"converged", r.converged},
                   {"reported_rho_tilde", r.rho_tilde}};
  return doc;
}

json greedy_outcome_to_json(const GreedyOutcome& g, double budget) {
  json doc = design_to_json(g.design);
  json history = json::array();
  for (const auto& s : g.history) {
    const auto& l = g.design.topology.link(s.link);
    json skipped = json::array();
    for (std::size_t e : s.skipped) {
      const auto& sl = g.design.topology.link(e);
      skipped.push_back({sl.u, sl.v});
    }
    history.push_back({{"link", {l.u, l.v}},
                       {"link_index", s.link},
                       {"abs_alpha", s.abs_alpha},
                       {"rho_tilde", s.rho_tilde},
                       {"skipped", std::move(skipped)}});
  }
  doc["greedy"] = {{"budget_wh", budget},
                   {"success", g.success},
                   {"failure", std::string(to_string(g.failure))},
                   {"diagnostic", g.diagnostic},
                   {"removals", std::move(history)},
                   {"solver_iterations", g.total_solver_iterations}};
  return doc;
}

namespace {

std::string opt_to_csv(const std::optional<double>& v) { return v ? format_double(*v) : std::string("inf"); }

}  // namespace

std::string sweep_to_csv(const SweepResult& s) {
  std::ostringstream out;
  out << "delta_wh,rho,K,product,feasible,max_node_cost_wh,links_active\n";
  for (const auto& r : s.rows) {
    out << format_double(r.budget) << ',' << format_double(r.rho) << ',' << opt_to_csv(r.iterations) << ','
        << opt_to_csv(r.product) << ',' << (r.feasible ? 1 : 0) << ',' << format_double(r.max_node_cost) << ','
        << r.links_active << '\n';
  }
  return out.str();
}

std::string trace_to_csv(const TrainingTrace& t) {
  std::ostringstream out;
  out << "iter,loss,grad_sq,running_avg_grad_sq,consensus,max_cum_energy_wh,total_cum_energy_wh\n";
  for (const auto& r : t.records) {
    double max_e = 0.0, total_e = 0.0;
    for (double e : r.cumulative_energy) {
      max_e = std::max(max_e, e);
      total_e += e;
    }
    out << r.iteration << ',' << format_double(r.loss) << ',' << format_double(r.grad_sq) << ','
        << format_double(r.running_avg_grad_sq) << ',' << format_double(r.consensus) << ',' << format_double(max_e)
        << ',' << format_double(total_e) << '\n';
  }
  return out.str();
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw InputError("failed writing '" + path.string() + "'");
}

}  // namespace mixdesign
