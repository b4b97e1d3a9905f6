#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mixdesign/cost.hpp"
#include "mixdesign/spectral.hpp"
#include "mixdesign/topology.hpp"
#include "mixdesign/weight_solver.hpp"

namespace mixdesign {

enum class GreedyFailure { None, Disconnection, BudgetUnreachable };

std::string_view to_string(GreedyFailure f);

/// One removal: the link frozen at zero and the solve that justified it.
struct RemovalStep {
  std::size_t link = 0;
  double abs_alpha = 0.0;       // |alpha| of `link` in the solve below
  double rho_tilde = 0.0;       // score of the solve below
  Vector alpha;                 // the solve the choice was made from
  std::vector<std::size_t> skipped;  // smaller-|alpha| candidates whose removal would disconnect
};

struct GreedyOutcome {
  bool success = false;
  GreedyFailure failure = GreedyFailure::None;
  std::string diagnostic{};
  /// The last solve; on success, the budget-feasible design.
  MixingDesign design;
  double rho_tilde = 0.0;
  std::vector<double> node_costs{};
  LinkMask frozen{};
  std::vector<RemovalStep> history{};
  int total_solver_iterations = 0;
};

/// Greedy budget-driven sparsification.
///
/// Repeats: solve for the minimum-score weights with the frozen links held
/// at zero; stop with success once every node cost is within `budget`.
/// Otherwise, among activated links with an over-budget endpoint, freeze the
/// one with the smallest |alpha| (ties to the lower link index), skipping
/// candidates whose removal would disconnect the links still available to
/// the solver. Fails with Disconnection when every candidate would
/// disconnect, and with BudgetUnreachable when an over-budget node has no
/// activated link left to drop.
///
/// Deciding whether any feasible sparsifier exists is NP-hard in general, so
/// a failure here does not prove that none exists.
GreedyOutcome greedy_sparsify(const Topology& t, const CostModel& cost, double budget, const SolverConfig& cfg);

/// Links eligible for removal given a solve: activated, not frozen, with an
/// endpoint whose cost exceeds `budget`; sorted by (|alpha|, index).
std::vector<std::size_t> removal_candidates(const Topology& t, const CostModel& cost, double budget,
                                            const LinkMask& frozen, const Vector& alpha);

}  // namespace mixdesign
