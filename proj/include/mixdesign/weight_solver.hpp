#pragma once

#include <cstdint>
#include <string_view>

#include "mixdesign/common.hpp"
#include "mixdesign/topology.hpp"

namespace mixdesign {

enum class StepRule {
  /// Log-barrier path following on the two matrix inequalities
  /// -t I <= I - L(alpha) - J <= t I, with damped Newton centering.
  Barrier,
  /// Subgradient descent with a Polyak step against a decaying target below
  /// the best value seen so far.
  PolyakSubgradient,
};

std::string_view to_string(StepRule rule);
StepRule step_rule_from_string(std::string_view name);

struct SolverConfig {
  int max_iterations = 5000;
  /// Barrier: target duality gap. Subgradient: best-value improvement
  /// required over a 200-iteration window.
  double tolerance = 1e-7;
  StepRule rule = StepRule::Barrier;
  /// 0 keeps the uniform start 1/(max degree + 1); any other value jitters it.
  std::uint64_t seed = 0;

  void validate() const;
};

struct SolveResult {
  Vector alpha;              // frozen links hold exactly 0
  double rho_tilde = 0.0;    // ||I - L(alpha) - J||, re-evaluated from alpha
  int iterations = 0;
  bool converged = false;
};

/// Minimizes ||I - B diag(alpha) B^T - J|| over the weights of the links not
/// in `frozen`. `warm_start`, when non-empty, seeds the free weights.
///
/// If the free links do not connect the graph the optimum is 1 and the
/// returned value is >= 1.
SolveResult solve_min_rho(const Topology& t, const LinkMask& frozen, const SolverConfig& cfg,
                          const Vector& warm_start = Vector());

/// Grid search over [0, 1]^k for the k <= 4 free links: exhaustive on a
/// 0.05 lattice, then refined around the best lattice points down to
/// `resolution`. Test oracle for solve_min_rho.
SolveResult brute_force_min_rho(const Topology& t, const LinkMask& frozen, double resolution);

}  // namespace mixdesign
