#pragma once

#include <filesystem>
#include <string>

#include "json.hpp"

#include "mixdesign/bilevel.hpp"
#include "mixdesign/cost.hpp"
#include "mixdesign/dpsgd_sim.hpp"
#include "mixdesign/spectral.hpp"
#include "mixdesign/sparsifier.hpp"
#include "mixdesign/weight_solver.hpp"

namespace mixdesign {

/// Design document:
///   {"nodes": m, "comp_cost": [...],
///    "links": [{"u", "v", "alpha", "cost_u", "cost_v"}, ...],
///    "rho", "rho_tilde", "row_sum_max_err", "node_costs": [...]}
/// Every base link is listed, including those with zero weight.
nlohmann::json design_to_json(const MixingDesign& design, const CostModel& cost);
nlohmann::json design_to_json(const MixingDesign& design);

/// Rebuilds the design (and the topology costs) from design_to_json output.
MixingDesign design_from_json(const nlohmann::json& doc);

nlohmann::json solve_result_to_json(const MixingDesign& design, const SolveResult& r, const SolverConfig& cfg);
nlohmann::json greedy_outcome_to_json(const GreedyOutcome& g, double budget);

/// Columns: delta_wh,rho,K,product,feasible,max_node_cost_wh,links_active
std::string sweep_to_csv(const SweepResult& s);

/// Columns: iter,loss,grad_sq,running_avg_grad_sq,consensus,max_cum_energy_wh,total_cum_energy_wh
std::string trace_to_csv(const TrainingTrace& t);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace mixdesign
