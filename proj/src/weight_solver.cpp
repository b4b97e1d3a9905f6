#include "mixdesign/weight_solver.hpp"

#include <algorithm>
#include <limits>
#include <optional>
#include <random>

#include "mixdesign/spectral.hpp"

namespace mixdesign {

std::string_view to_string(StepRule rule) {
  switch (rule) {
    case StepRule::Barrier:
      return "barrier";
    case StepRule::PolyakSubgradient:
      return "polyak";
  }
  return "unknown";
}

StepRule step_rule_from_string(std::string_view name) {
  if (name == "barrier") return StepRule::Barrier;
  if (name == "polyak") return StepRule::PolyakSubgradient;
  throw InputError("unknown step rule '" + std::string(name) + "'");
}

void SolverConfig::validate() const {
  if (max_iterations < 1) throw InputError("solver: max_iterations must be >= 1");
  if (!(tolerance > 0.0)) throw InputError("solver: tolerance must be positive");
}

namespace {

// The free links of a solve: the optimization variables.
struct Problem {
  const Topology& topo;
  std::vector<std::size_t> free;
  std::vector<int> u, v;  // endpoints of free link k
  int m;

  Problem(const Topology& t, const LinkMask& frozen) : topo(t), m(t.node_count()) {
    if (frozen.size() != t.link_count()) throw InputError("solver: frozen mask size does not match link count");
    for (std::size_t e = 0; e < t.link_count(); ++e) {
      if (frozen[e]) continue;
      free.push_back(e);
      u.push_back(t.link(e).u);
      v.push_back(t.link(e).v);
    }
  }

  std::size_t n() const { return free.size(); }

  Vector expand(const Vector& x) const {
    Vector alpha = Vector::Zero(static_cast<Eigen::Index>(topo.link_count()));
    for (std::size_t k = 0; k < free.size(); ++k) alpha[free[k]] = x[k];
    return alpha;
  }

  // L(x) over the free links only.
  Matrix laplacian(const Vector& x) const {
    Matrix l = Matrix::Zero(m, m);
    for (std::size_t k = 0; k < free.size(); ++k) {
      const double w = x[k];
      l(u[k], v[k]) -= w;
      l(v[k], u[k]) -= w;
      l(u[k], u[k]) += w;
      l(v[k], v[k]) += w;
    }
    return l;
  }

  // A(x) = I - J - L(x).
  Matrix score_matrix(const Vector& x) const {
    Matrix a = Matrix::Identity(m, m) - averaging_matrix(m) - laplacian(x);
    return 0.5 * (a + a.transpose());
  }

  double score(const Vector& x) const {
    Eigen::SelfAdjointEigenSolver<Matrix> es(score_matrix(x), Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw ComputeError("solver: eigensolver failed");
    return std::max(std::abs(es.eigenvalues()[0]), std::abs(es.eigenvalues()[m - 1]));
  }

  Vector initial(const Vector& warm, std::uint64_t seed) const {
    Vector x(static_cast<Eigen::Index>(n()));
    if (warm.size() == static_cast<Eigen::Index>(topo.link_count())) {
      for (std::size_t k = 0; k < free.size(); ++k) x[k] = warm[free[k]];
      return x;
    }
    std::vector<int> deg(m, 0);
    for (std::size_t k = 0; k < n(); ++k) {
      ++deg[u[k]];
      ++deg[v[k]];
    }
    const int max_deg = *std::max_element(deg.begin(), deg.end());
    x.setConstant(1.0 / (max_deg + 1.0));
    if (seed != 0) {
      std::mt19937_64 rng(seed);
      std::uniform_real_distribution<double> jitter(0.9, 1.1);
      for (Eigen::Index k = 0; k < x.size(); ++k) x[k] *= jitter(rng);
    }
    return x;
  }
};

// Log-barrier path following for
//   min t  s.t.  t I - A(x) >= 0,  t I + A(x) >= 0.
class BarrierSolver {
 public:
  BarrierSolver(const Problem& p, const SolverConfig& cfg) : p_(p), cfg_(cfg) {}

  SolveResult run(Vector x) {
    const int m = p_.m;
    const Eigen::Index n = static_cast<Eigen::Index>(p_.n());
    Vector z(n + 1);
    z.head(n) = x;
    const double f0 = p_.score(x);
    z[n] = f0 + std::max(0.1, 0.1 * f0);

    Vector best_x = x;
    double best_f = f0;

    Eval ev;
    if (!evaluate(z, ev)) throw ComputeError("solver: initial point is not strictly feasible");
    double tau = std::max(1.0, ev.s1inv.trace() + ev.s2inv.trace());

    int newton_steps = 0;
    bool converged = false;
    constexpr double kGrowth = 10.0;
    while (newton_steps < cfg_.max_iterations) {
      newton_steps += center(z, tau, cfg_.max_iterations - newton_steps);
      const double f = p_.score(z.head(n));
      if (f < best_f) {
        best_f = f;
        best_x = z.head(n);
      }
      if (2.0 * m / tau < cfg_.tolerance) {
        converged = true;
        break;
      }
      tau *= kGrowth;
    }
    SolveResult r;
    r.alpha = p_.expand(best_x);
    r.iterations = newton_steps;
    r.converged = converged;
    return r;
  }

 private:
  struct Eval {
    Eigen::LLT<Matrix> llt1, llt2;
    Matrix s1inv, s2inv;
    double logdet = 0.0;  // log det S1 + log det S2
  };

  bool evaluate(const Vector& z, Eval& ev, bool inverses = true) const {
    const int m = p_.m;
    const Eigen::Index n = static_cast<Eigen::Index>(p_.n());
    const Matrix a = p_.score_matrix(z.head(n));
    const Matrix ti = z[n] * Matrix::Identity(m, m);
    ev.llt1.compute(ti - a);
    if (ev.llt1.info() != Eigen::Success) return false;
    ev.llt2.compute(ti + a);
    if (ev.llt2.info() != Eigen::Success) return false;
    double ld = 0.0;
    for (int i = 0; i < m; ++i) {
      const double d1 = ev.llt1.matrixLLT()(i, i);
      const double d2 = ev.llt2.matrixLLT()(i, i);
      if (!(d1 > 0.0) || !(d2 > 0.0)) return false;
      ld += 2.0 * (std::log(d1) + std::log(d2));
    }
    if (!std::isfinite(ld)) return false;
    ev.logdet = ld;
    if (inverses) {
      ev.s1inv = ev.llt1.solve(Matrix::Identity(m, m));
      ev.s2inv = ev.llt2.solve(Matrix::Identity(m, m));
    }
    return true;
  }

  // Damped Newton on tau * t - log det S1 - log det S2. Returns steps taken.
  int center(Vector& z, double tau, int budget) const {
    const Eigen::Index n = static_cast<Eigen::Index>(p_.n());
    int steps = 0;
    Eval ev;
    if (!evaluate(z, ev)) return steps;
    while (steps < budget) {
      ++steps;
      const Matrix& s1 = ev.s1inv;
      const Matrix& s2 = ev.s2inv;
      const Matrix s1sq = s1 * s1;
      const Matrix s2sq = s2 * s2;

      // With S = S1^-1: (B^T S B)_{ef} = S(ue,uf) - S(ue,vf) - S(ve,uf) + S(ve,vf).
      Vector g(n + 1);
      Matrix h(n + 1, n + 1);
      for (Eigen::Index e = 0; e < n; ++e) {
        const int ue = p_.u[e], ve = p_.v[e];
        for (Eigen::Index f = e; f < n; ++f) {
          const int uf = p_.u[f], vf = p_.v[f];
          const double g1 = s1(ue, uf) - s1(ue, vf) - s1(ve, uf) + s1(ve, vf);
          const double g2 = s2(ue, uf) - s2(ue, vf) - s2(ve, uf) + s2(ve, vf);
          h(e, f) = h(f, e) = g1 * g1 + g2 * g2;
          if (f == e) g[e] = -g1 + g2;
        }
        const double q1 = s1sq(ue, ue) - 2.0 * s1sq(ue, ve) + s1sq(ve, ve);
        const double q2 = s2sq(ue, ue) - 2.0 * s2sq(ue, ve) + s2sq(ve, ve);
        h(e, n) = h(n, e) = q1 - q2;
      }
      g[n] = tau - s1.trace() - s2.trace();
      h(n, n) = s1.squaredNorm() + s2.squaredNorm();

      Eigen::LDLT<Matrix> ldlt(h);
      if (ldlt.info() != Eigen::Success) break;
      const Vector dz = -ldlt.solve(g);
      const double decrement = -g.dot(dz);
      if (!std::isfinite(decrement) || decrement <= 0.0) break;
      if (decrement * 0.5 < 1e-10) break;

      const double phi0 = tau * z[n] - ev.logdet;
      double step = 1.0;
      Eval trial;
      bool moved = false;
      while (step > 1e-14) {
        const Vector cand = z + step * dz;
        if (evaluate(cand, trial, false)) {
          const double phi = tau * cand[n] - trial.logdet;
          if (phi <= phi0 - 0.25 * step * decrement) {
            z = cand;
            moved = true;
            break;
          }
        }
        step *= 0.5;
      }
      if (!moved) break;
      if (!evaluate(z, ev)) break;
    }
    return steps;
  }

  const Problem& p_;
  const SolverConfig& cfg_;
};

SolveResult polyak_subgradient(const Problem& p, const SolverConfig& cfg, Vector x) {
  constexpr int kWindow = 200;
  const int m = p.m;
  const Eigen::Index n = static_cast<Eigen::Index>(p.n());

  Vector best_x = x;
  double best_f = std::numeric_limits<double>::infinity();
  double delta = -1.0;
  int since_improvement = 0;
  double window_start_best = std::numeric_limits<double>::infinity();
  int iter = 0;
  bool converged = false;

  for (; iter < cfg.max_iterations; ++iter) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(p.score_matrix(x));
    if (es.info() != Eigen::Success) throw ComputeError("solver: eigensolver failed");
    const Vector& lam = es.eigenvalues();
    // Largest |eigenvalue|; ties go to the first one the eigensolver lists.
    const int top = std::abs(lam[0]) >= std::abs(lam[m - 1]) ? 0 : m - 1;
    const double f = std::abs(lam[top]);
    const double sign = lam[top] >= 0.0 ? 1.0 : -1.0;
    const auto vec = es.eigenvectors().col(top);

    if (delta < 0.0) delta = std::max(0.05 * f, 1e-3);
    if (f < best_f) {
      if (f < best_f - 1e-12) since_improvement = 0;
      best_f = f;
      best_x = x;
    } else {
      ++since_improvement;
    }
    if (iter % kWindow == 0) {
      if (iter > 0 && window_start_best - best_f < cfg.tolerance) {
        converged = true;
        break;
      }
      window_start_best = best_f;
    }
    if (since_improvement >= 25) {
      delta *= 0.5;
      since_improvement = 0;
    }

    // d f / d alpha_e = -sign * (v_u - v_v)^2
    Vector g(n);
    for (Eigen::Index k = 0; k < n; ++k) {
      const double d = vec[p.u[k]] - vec[p.v[k]];
      g[k] = -sign * d * d;
    }
    const double gg = g.squaredNorm();
    if (gg < 1e-30) {
      converged = true;
      break;
    }
    const double target = best_f - delta;
    x -= ((f - target) / gg) * g;
  }

  SolveResult r;
  r.alpha = p.expand(best_x);
  r.iterations = iter;
  r.converged = converged;
  return r;
}

}  // namespace

SolveResult solve_min_rho(const Topology& t, const LinkMask& frozen, const SolverConfig& cfg,
                          const Vector& warm_start) {
  cfg.validate();
  if (warm_start.size() != 0 && static_cast<std::size_t>(warm_start.size()) != t.link_count())
    throw InputError("solver: warm start length does not match link count");
  Problem p(t, frozen);
  SolveResult r;
  if (p.n() == 0) {
    r.alpha = Vector::Zero(static_cast<Eigen::Index>(t.link_count()));
    r.converged = true;
  } else {
    Vector x0 = p.initial(warm_start, cfg.seed);
    r = cfg.rule == StepRule::Barrier ? BarrierSolver(p, cfg).run(x0) : polyak_subgradient(p, cfg, x0);
  }
  r.rho_tilde = rho_tilde(t, r.alpha);
  return r;
}

SolveResult brute_force_min_rho(const Topology& t, const LinkMask& frozen, double resolution) {
  if (!(resolution > 0.0)) throw InputError("brute force: resolution must be positive");
  Problem p(t, frozen);
  const int k = static_cast<int>(p.n());
  if (k > 4) throw InputError("brute force: at most 4 free links supported, got " + std::to_string(k));

  SolveResult r;
  if (k == 0) {
    r.alpha = Vector::Zero(static_cast<Eigen::Index>(t.link_count()));
    r.rho_tilde = rho_tilde(t, r.alpha);
    r.converged = true;
    return r;
  }

  struct Point {
    double f;
    Vector x;
  };
  constexpr int kKeep = 4;
  std::vector<Point> best;
  int evals = 0;
  auto offer = [&](const Vector& x) {
    ++evals;
    const double f = p.score(x);
    if (static_cast<int>(best.size()) < kKeep || f < best.back().f) {
      best.push_back({f, x});
      std::sort(best.begin(), best.end(), [](const Point& a, const Point& b) { return a.f < b.f; });
      if (static_cast<int>(best.size()) > kKeep) best.pop_back();
    }
  };

  // Visits every point center + step * (i_1 - half, ..., i_k - half) with
  // i_j in [0, 2 half], clipped to [0, 1].
  auto scan = [&](const Vector& center, double step, int half) {
    const int side = 2 * half + 1;
    std::vector<int> idx(k, 0);
    Vector x(k);
    while (true) {
      bool inside = true;
      for (int j = 0; j < k; ++j) {
        x[j] = center[j] + step * (idx[j] - half);
        if (x[j] < -1e-12 || x[j] > 1.0 + 1e-12) inside = false;
      }
      if (inside) offer(x);
      int j = 0;
      while (j < k && ++idx[j] == side) idx[j++] = 0;
      if (j == k) break;
    }
  };

  double step = std::max(resolution, 0.05);
  const int coarse_half = static_cast<int>(std::round(0.5 / step));
  scan(Vector::Constant(k, 0.5), 0.5 / coarse_half, coarse_half);
  step = 0.5 / coarse_half;
  while (step > resolution) {
    step = std::max(step / 4.0, resolution);
    auto seeds = best;
    for (const auto& s : seeds) scan(s.x, step, 4);
  }

  r.alpha = p.expand(best.front().x);
  r.rho_tilde = rho_tilde(t, r.alpha);
  r.iterations = evals;
  r.converged = true;
  return r;
}

}  // namespace mixdesign
