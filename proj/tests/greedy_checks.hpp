#pragma once

// Independent re-checks of a greedy sparsification outcome. Returns the
// first violation found, or an empty string.

#include <cmath>
#include <string>
#include <vector>

#include "mixdesign/sparsifier.hpp"
#include "oracles.hpp"

namespace greedy_checks {

inline std::vector<bool> activated(const mixdesign::Vector& alpha) {
  std::vector<bool> use(alpha.size());
  for (Eigen::Index e = 0; e < alpha.size(); ++e) use[e] = std::abs(alpha[e]) > 1e-9;
  return use;
}

// Eligible links for a solve, by (|alpha|, index), computed from scratch.
inline std::vector<std::size_t> eligible(const mixdesign::Topology& t, double budget, const std::vector<bool>& frozen,
                                         const mixdesign::Vector& alpha) {
  const auto use = activated(alpha);
  const auto cost = oracle::node_costs(t, use);
  std::vector<std::size_t> out;
  for (std::size_t e = 0; e < t.link_count(); ++e) {
    if (frozen[e] || !use[e]) continue;
    if (cost[t.link(e).u] > budget + 1e-12 || cost[t.link(e).v] > budget + 1e-12) out.push_back(e);
  }
  std::stable_sort(out.begin(), out.end(),
                   [&](std::size_t a, std::size_t b) { return std::abs(alpha[a]) < std::abs(alpha[b]); });
  return out;
}

// `rho_slack` bounds how far consecutive solves may decrease (solver accuracy).
inline std::string check(const mixdesign::Topology& t, double budget, const mixdesign::GreedyOutcome& g,
                         double rho_slack = 1e-7) {
  std::vector<bool> frozen(t.link_count(), false);
  double prev_rho = 0.0;
  for (std::size_t k = 0; k < g.history.size(); ++k) {
    const auto& step = g.history[k];
    const std::string at = "step " + std::to_string(k) + ": ";
    for (std::size_t e = 0; e < t.link_count(); ++e)
      if (frozen[e] && step.alpha[e] != 0.0) return at + "frozen link carries weight";
    if (std::abs(oracle::rho_tilde(t, oracle::to_std(step.alpha)) - step.rho_tilde) > 1e-6)
      return at + "reported rho_tilde does not re-evaluate";
    if (step.rho_tilde < prev_rho - rho_slack) return at + "rho_tilde decreased along the removals";
    prev_rho = step.rho_tilde;

    const auto cands = eligible(t, budget, frozen, step.alpha);
    std::vector<bool> avail(t.link_count());
    for (std::size_t e = 0; e < t.link_count(); ++e) avail[e] = !frozen[e];
    std::size_t pick = cands.size();
    std::vector<std::size_t> skipped;
    for (std::size_t i = 0; i < cands.size(); ++i) {
      auto trial = avail;
      trial[cands[i]] = false;
      if (oracle::connected(t, trial)) {
        pick = i;
        break;
      }
      skipped.push_back(cands[i]);
    }
    if (pick == cands.size()) return at + "no valid candidate, yet a removal was recorded";
    if (cands[pick] != step.link) return at + "removed link is not the smallest eligible |alpha|";
    if (skipped != step.skipped) return at + "skipped set differs";
    if (std::abs(std::abs(step.alpha[step.link]) - step.abs_alpha) > 0.0) return at + "abs_alpha mismatch";
    frozen[step.link] = true;
  }
  for (std::size_t e = 0; e < t.link_count(); ++e) {
    if (frozen[e] != g.frozen[e]) return "final frozen set differs from the history";
    if (frozen[e] && g.design.alpha[e] != 0.0) return "final design uses a frozen link";
  }
  if (!g.history.empty() && g.rho_tilde < prev_rho - rho_slack) return "final rho_tilde below the last step";

  const auto use = activated(g.design.alpha);
  const auto cost = oracle::node_costs(t, use);
  if (g.success) {
    for (double c : cost)
      if (c > budget + 1e-12) return "success but a node is over budget";
    if (!oracle::connected(t, use)) return "success but the support is disconnected";
    if (!(oracle::rho_tilde(t, oracle::to_std(g.design.alpha)) < 1.0)) return "success but rho_tilde >= 1";
  } else if (g.failure == mixdesign::GreedyFailure::Disconnection) {
    bool over = false;
    for (double c : cost) over = over || c > budget + 1e-12;
    if (over) {
      const auto cands = eligible(t, budget, frozen, g.design.alpha);
      if (cands.empty()) return "disconnection reported without candidates";
      for (std::size_t c : cands) {
        auto trial = use;
        trial[c] = false;
        if (oracle::connected(t, trial)) return "failure is unsound: a candidate keeps the support connected";
      }
    }
  }
  return {};
}

}  // namespace greedy_checks
