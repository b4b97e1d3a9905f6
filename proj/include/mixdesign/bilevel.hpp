#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mixdesign/cost.hpp"
#include "mixdesign/spectral.hpp"
#include "mixdesign/topology.hpp"
#include "mixdesign/weight_solver.hpp"

namespace mixdesign {

/// Constants of the iteration-count bound for D-PSGD.
///
/// The bound is only known up to a multiplicative constant, exposed as
/// `leading_constant`. K is therefore a ranking model for comparing budgets,
/// not a wall-clock predictor. The defaults are configuration, not claims
/// about any particular learning task.
struct ConvergenceModel {
  double smoothness = 1.0;      // l
  double sigma = 1.0;           // gradient noise scale
  double m1 = 0.0;              // noise growth with the gradient
  double zeta = 1.0;            // data heterogeneity scale
  double m2 = 0.0;              // heterogeneity growth with the gradient
  double epsilon = 0.1;         // target average squared gradient norm
  double initial_gap = 1.0;     // F(x_bar^(1)) - F_inf
  double leading_constant = 1.0;

  void validate() const;
};

/// Iterations until the average squared gradient norm of the node average
/// drops below epsilon:
///
///   K = C l gap ( sigma^2 / (m eps^2)
///               + (zeta sqrt(M1 + 1) + sigma sqrt(1 - rho)) / ((1 - rho) eps^1.5)
///               + sqrt((M2 + 1)(M1 + 1)) / ((1 - rho) eps) )
///
/// nullopt for rho >= 1 (no guarantee).
std::optional<double> iterations_to_epsilon(const ConvergenceModel& cm, double rho, int nodes);

enum class SweepMethod { Greedy, Ramanujan };

std::string_view to_string(SweepMethod method);
SweepMethod sweep_method_from_string(std::string_view name);

struct SweepRow {
  double budget = 0.0;
  bool feasible = false;
  std::optional<MixingDesign> design;
  double rho = 1.0;  // recomputed from the emitted design
  std::optional<double> iterations;
  std::optional<double> product;  // budget * iterations
  std::vector<double> node_costs;
  double max_node_cost = 0.0;
  std::size_t links_active = 0;
  std::optional<int> degree;  // ramanujan only
  std::string diagnostic;
};

struct SweepResult {
  std::vector<SweepRow> rows;  // ascending budget
  std::optional<std::size_t> argmin;
  std::string diagnostic;
};

struct SweepOptions {
  SweepMethod method = SweepMethod::Greedy;
  SolverConfig solver;
  std::uint64_t seed = 0;
  int jobs = 1;
  int ramanujan_attempts = 1000;
};

/// Runs the lower-level design for every budget in `grid` (non-empty,
/// ascending) and picks the feasible budget minimizing budget * K(rho).
/// Rows are independent and seeded by their index, so the result does not
/// depend on `jobs`.
SweepResult sweep(const Topology& t, const CostModel& cost, const ConvergenceModel& cm, std::span<const double> grid,
                  const SweepOptions& options);

/// `points` log-spaced budgets from the cheapest one-link budget
/// (min c^a + min c^b) to the maximum node cost with every link active.
std::vector<double> default_budget_grid(const Topology& t, const CostModel& cost, int points = 20);

}  // namespace mixdesign
