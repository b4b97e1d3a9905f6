#include "mixdesign/spectral.hpp"

#include <algorithm>
#include <numeric>

namespace mixdesign {

EigenDecomposition eig_symmetric(const Matrix& a, bool with_vectors) {
  if (a.rows() != a.cols()) throw InputError("eig_symmetric: matrix is not square");
  if (a.size() > 0 && (a - a.transpose()).cwiseAbs().maxCoeff() > 1e-10)
    throw InputError("eig_symmetric: matrix is not symmetric");
  Eigen::SelfAdjointEigenSolver<Matrix> solver(
      a, with_vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw ComputeError("eig_symmetric: eigensolver did not converge");
  EigenDecomposition out;
  out.values = solver.eigenvalues();
  if (with_vectors) out.vectors = solver.eigenvectors();
  return out;
}

Matrix laplacian(const Topology& t, const Vector& alpha) {
  if (static_cast<std::size_t>(alpha.size()) != t.link_count())
    throw InputError("laplacian: weight vector length " + std::to_string(alpha.size()) +
                     " does not match link count " + std::to_string(t.link_count()));
  const int m = t.node_count();
  Matrix l = Matrix::Zero(m, m);
  for (std::size_t e = 0; e < t.link_count(); ++e) {
    const auto& link = t.link(e);
    const double w = alpha[static_cast<Eigen::Index>(e)];
    l(link.u, link.v) -= w;
    l(link.v, link.u) -= w;
  }
  // Diagonal last, from the off-diagonals, so row sums cancel exactly.
  for (int i = 0; i < m; ++i) {
    double s = 0.0;
    for (int j = 0; j < m; ++j) {
      if (j != i) s += l(i, j);
    }
    l(i, i) = -s;
  }
  return 0.5 * (l + l.transpose());
}

Matrix averaging_matrix(int m) { return Matrix::Constant(m, m, 1.0 / m); }

double rho_tilde(const Topology& t, const Vector& alpha) {
  const int m = t.node_count();
  Matrix a = Matrix::Identity(m, m) - laplacian(t, alpha) - averaging_matrix(m);
  auto eig = eig_symmetric(a);
  return std::max(std::abs(eig.values[0]), std::abs(eig.values[m - 1]));
}

MixingDesign::MixingDesign(Topology t, Vector weights) : topology(std::move(t)), alpha(std::move(weights)) {
  if (static_cast<std::size_t>(alpha.size()) != topology.link_count())
    throw InputError("MixingDesign: weight vector length does not match link count");
}

Matrix MixingDesign::laplacian() const { return mixdesign::laplacian(topology, alpha); }

Matrix MixingDesign::mixing_matrix() const {
  const int m = node_count();
  return Matrix::Identity(m, m) - laplacian();
}

double MixingDesign::rho_tilde() const { return mixdesign::rho_tilde(topology, alpha); }

double MixingDesign::row_sum_max_error() const {
  Matrix w = mixing_matrix();
  return (w.rowwise().sum().array() - 1.0).abs().maxCoeff();
}

MixingDesign averaging_design(int m) {
  Topology k = complete_graph(m);
  return MixingDesign(k, Vector::Constant(static_cast<Eigen::Index>(k.link_count()), 1.0 / m));
}

MixingDesign identity_design(int m) {
  Topology k = complete_graph(m);
  return MixingDesign(k, Vector::Zero(static_cast<Eigen::Index>(k.link_count())));
}

MixingDistribution::MixingDistribution(std::vector<std::pair<MixingDesign, double>> entries)
    : entries_(std::move(entries)) {
  if (entries_.empty()) throw InputError("MixingDistribution: no designs");
  const int m = entries_.front().first.node_count();
  double total = 0.0;
  for (const auto& [design, p] : entries_) {
    if (design.node_count() != m) throw InputError("MixingDistribution: designs disagree on node count");
    if (!(p >= 0.0)) throw InputError("MixingDistribution: negative probability");
    total += p;
    cumulative_.push_back(total);
  }
  if (std::abs(total - 1.0) > 1e-9) throw InputError("MixingDistribution: probabilities do not sum to 1");
}

MixingDistribution MixingDistribution::deterministic(MixingDesign design) {
  std::vector<std::pair<MixingDesign, double>> e;
  e.emplace_back(std::move(design), 1.0);
  return MixingDistribution(std::move(e));
}

std::size_t MixingDistribution::sample(std::mt19937_64& rng) const {
  if (entries_.size() == 1) return 0;
  std::uniform_real_distribution<double> unif(0.0, cumulative_.back());
  const double r = unif(rng);
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), r);
  if (it == cumulative_.end()) --it;
  return static_cast<std::size_t>(it - cumulative_.begin());
}

double rho_deterministic(const MixingDesign& design) {
  auto eig = eig_symmetric(design.laplacian());
  const Eigen::Index m = eig.values.size();
  const double low = 1.0 - eig.values[1];
  const double high = 1.0 - eig.values[m - 1];
  return std::max(low * low, high * high);
}

Matrix expected_gram(const MixingDistribution& dist) {
  const int m = dist.node_count();
  Matrix g = Matrix::Zero(m, m);
  for (const auto& [design, p] : dist.entries()) {
    Matrix w = design.mixing_matrix();
    g += p * (w.transpose() * w);
  }
  return 0.5 * (g + g.transpose());
}

double rho_randomized(const MixingDistribution& dist) {
  const int m = dist.node_count();
  auto eig = eig_symmetric(expected_gram(dist) - averaging_matrix(m));
  return std::max(std::abs(eig.values[0]), std::abs(eig.values[m - 1]));
}

double expected_squared_score(const MixingDistribution& dist) {
  double s = 0.0;
  for (const auto& [design, p] : dist.entries()) {
    const double r = design.rho_tilde();
    s += p * r * r;
  }
  return s;
}

double contraction_ratio(const Matrix& gram_minus_j, const Matrix& x) {
  const auto m = gram_minus_j.rows();
  Matrix centered = x - x * averaging_matrix(static_cast<int>(m));  // X (I - J)
  const double den = centered.squaredNorm();
  const double num = (x * gram_minus_j * x.transpose()).trace();
  return num / den;
}

RhoBoundsReport validate_rho_bounds(const MixingDistribution& dist, int trials, std::uint64_t seed) {
  if (trials < 1) throw InputError("validate_rho_bounds: trials must be >= 1");
  const int m = dist.node_count();
  constexpr int kRows = 4;
  constexpr double kDenominatorFloor = 1e-12;

  RhoBoundsReport report;
  report.trials = trials;
  report.rho = rho_randomized(dist);
  report.expected_squared_score = expected_squared_score(dist);
  report.jensen_ok = report.rho <= report.expected_squared_score + 1e-9;
  report.p = 1.0 - report.rho;

  const Matrix gram_minus_j = expected_gram(dist) - averaging_matrix(m);
  const Matrix centering = Matrix::Identity(m, m) - averaging_matrix(m);

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  report.max_sampled_ratio = 0.0;
  for (int k = 0; k < trials; ++k) {
    Matrix x(kRows, m);
    do {
      for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = normal(rng);
    } while ((x * centering).squaredNorm() < kDenominatorFloor);
    report.max_sampled_ratio = std::max(report.max_sampled_ratio, contraction_ratio(gram_minus_j, x));
  }
  report.samples_ok = report.max_sampled_ratio <= report.rho + 1e-8;

  // Top eigenvector of the PSD matrix E[W^T W] - J. It is orthogonal to the
  // all-ones vector whenever rho > 0; project anyway so rho = 0 stays well
  // defined.
  auto eig = eig_symmetric(gram_minus_j, true);
  Vector v = eig.vectors.col(m - 1);
  v = centering * v;
  if (v.norm() < 1e-8) {
    v = Vector::Zero(m);
    v[0] = 1.0;
    v[1] = -1.0;
  }
  v.normalize();
  Matrix x(kRows, m);
  for (int r = 0; r < kRows; ++r) x.row(r) = (r + 1.0) * v.transpose();
  report.aligned_ratio = contraction_ratio(gram_minus_j, x);
  report.aligned_ok = std::abs(report.aligned_ratio - report.rho) <= 1e-6;
  return report;
}

}  // namespace mixdesign
