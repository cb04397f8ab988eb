#include "netcrop/generators.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "netcrop/errors.hpp"

namespace netcrop {

namespace {

enum Stream : std::uint64_t { kLabels = 1, kDegrees = 2, kEdges = 3, kPositions = 4 };

template <typename Prob>
AdjacencyMatrix sample_upper_triangle(std::size_t n, Prob&& prob, Rng& rng) {
  std::vector<std::pair<NodeId, NodeId>> edges;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double u = unif(rng);
      if (u < prob(i, j)) edges.emplace_back(static_cast<NodeId>(i), static_cast<NodeId>(j));
    }
  }
  return AdjacencyMatrix::from_edges(n, edges);
}

}  // namespace

double logistic(double x) noexcept {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

void BlockmodelSpec::validate() const {
  if (B.rows() < 1 || B.rows() != B.cols()) throw DomainError("B must be a non-empty square matrix");
  for (Eigen::Index a = 0; a < B.rows(); ++a) {
    for (Eigen::Index b = 0; b < B.cols(); ++b) {
      if (!(B(a, b) >= 0.0 && B(a, b) <= 1.0)) throw DomainError("B entries must lie in [0, 1]");
      if (B(a, b) != B(b, a)) throw DomainError("B must be symmetric");
    }
  }
}

void RdpgSpec::validate() const {
  if (d < 1) throw DomainError("RDPG dimension must be >= 1");
  if (!(zeta >= 0.0 && zeta <= 1.0)) throw DomainError("zeta must lie in [0, 1]");
}

void LatentSpec::validate() const {
  if (d < 1) throw DomainError("latent dimension must be >= 1");
  if (!std::isfinite(alpha)) throw DomainError("alpha must be finite");
}

Eigen::MatrixXd planted_partition_B(int k, double alpha, double beta) {
  if (k < 1) throw DomainError("K must be >= 1");
  if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("alpha must lie in (0, 1]");
  if (!(beta >= 0.0 && beta <= 1.0)) throw DomainError("beta must lie in [0, 1]");
  if (alpha * beta > 1.0) throw DomainError("alpha * beta must not exceed 1");
  Eigen::MatrixXd B = Eigen::MatrixXd::Constant(k, k, alpha * beta);
  B.diagonal().setConstant(alpha);
  return B;
}

Eigen::VectorXd sample_dcbm_degrees(std::size_t n, Rng& rng) {
  // Beta(4, 1) has CDF u^4, so U = V^(1/4) for V uniform on (0, 1].
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Eigen::VectorXd psi(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < psi.size(); ++i) {
    const double v = 1.0 - unif(rng);
    psi(i) = 1.0 / std::pow(v, 0.25);
  }
  return psi;
}

DegreeSampler inverse_beta_degrees() {
  return [](std::size_t n, Rng& rng) { return sample_dcbm_degrees(n, rng); };
}

DegreeSampler constant_degrees(double value) {
  return [value](std::size_t n, Rng&) {
    return Eigen::VectorXd::Constant(static_cast<Eigen::Index>(n), value).eval();
  };
}

Eigen::MatrixXd blockmodel_probabilities(const Eigen::MatrixXd& B, const std::vector<int>& labels,
                                         const Eigen::VectorXd& psi) {
  const auto n = static_cast<Eigen::Index>(labels.size());
  Eigen::MatrixXd P(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      P(i, j) = std::min(1.0, B(labels[static_cast<std::size_t>(i)], labels[static_cast<std::size_t>(j)]) *
                                  psi(i) * psi(j));
    }
  }
  return P;
}

BlockmodelSample sample_blockmodel(const BlockmodelSpec& spec,
                                   const std::optional<std::vector<int>>& labels, Rng& rng) {
  spec.validate();
  const std::uint64_t base = rng();
  const int k = spec.k();
  BlockmodelSample out;
  if (labels) {
    if (labels->size() != spec.n) throw DomainError("label vector length must equal n");
    for (int g : *labels) {
      if (g < 0 || g >= k) throw RangeError("label " + std::to_string(g) + " outside [0, K)");
    }
    out.labels = *labels;
  } else {
    Rng label_rng = child_rng(base, kLabels);
    std::uniform_int_distribution<int> pick(0, k - 1);
    out.labels.resize(spec.n);
    for (auto& g : out.labels) g = pick(label_rng);
  }
  if (spec.degrees) {
    Rng degree_rng = child_rng(base, kDegrees);
    out.psi = spec.degrees(spec.n, degree_rng);
    if (static_cast<std::size_t>(out.psi.size()) != spec.n) {
      throw DomainError("degree sampler returned the wrong length");
    }
  } else {
    out.psi = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(spec.n));
  }
  Rng edge_rng = child_rng(base, kEdges);
  const auto& g = out.labels;
  const auto& psi = out.psi;
  out.adjacency = sample_upper_triangle(
      spec.n,
      [&](std::size_t i, std::size_t j) {
        return std::min(1.0, spec.B(g[i], g[j]) * psi(static_cast<Eigen::Index>(i)) *
                                 psi(static_cast<Eigen::Index>(j)));
      },
      edge_rng);
  return out;
}

double RdpgSample::probability(Eigen::Index i, Eigen::Index j) const {
  return zeta * (X.row(i).dot(X.row(j)) / max_gram);
}

Eigen::MatrixXd RdpgSample::probabilities() const {
  const auto n = X.rows();
  Eigen::MatrixXd P(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) P(i, j) = probability(i, j);
  }
  return P;
}

RdpgSample sample_rdpg(const RdpgSpec& spec, Rng& rng) {
  spec.validate();
  const std::uint64_t base = rng();
  Rng pos_rng = child_rng(base, kPositions);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  RdpgSample out;
  out.zeta = spec.zeta;
  out.X.resize(static_cast<Eigen::Index>(spec.n), spec.d);
  for (Eigen::Index i = 0; i < out.X.rows(); ++i) {
    for (Eigen::Index k = 0; k < out.X.cols(); ++k) out.X(i, k) = unif(pos_rng);
  }
  // By Cauchy-Schwarz the largest Gram entry sits on the diagonal.
  out.max_gram = 0.0;
  for (Eigen::Index i = 0; i < out.X.rows(); ++i) {
    out.max_gram = std::max(out.max_gram, out.X.row(i).dot(out.X.row(i)));
  }
  if (out.max_gram <= 0.0) out.max_gram = 1.0;
  Rng edge_rng = child_rng(base, kEdges);
  out.adjacency = sample_upper_triangle(
      spec.n,
      [&](std::size_t i, std::size_t j) {
        return out.probability(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      },
      edge_rng);
  return out;
}

double LatentSample::probability(Eigen::Index i, Eigen::Index j) const {
  return logistic(alpha - (Z.row(i) - Z.row(j)).squaredNorm());
}

Eigen::MatrixXd LatentSample::probabilities() const {
  const auto n = Z.rows();
  Eigen::MatrixXd P(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) P(i, j) = probability(i, j);
  }
  return P;
}

LatentSample sample_latent_from_positions(Eigen::MatrixXd Z, double alpha, Rng& rng) {
  const std::uint64_t base = rng();
  LatentSample out;
  out.Z = std::move(Z);
  out.alpha = alpha;
  Rng edge_rng = child_rng(base, kEdges);
  out.adjacency = sample_upper_triangle(
      static_cast<std::size_t>(out.Z.rows()),
      [&](std::size_t i, std::size_t j) {
        return out.probability(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      },
      edge_rng);
  return out;
}

LatentSample sample_latent(const LatentSpec& spec, Rng& rng) {
  spec.validate();
  const std::uint64_t base = rng();
  Rng pos_rng = child_rng(base, kPositions);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd Z(static_cast<Eigen::Index>(spec.n), spec.d);
  for (Eigen::Index i = 0; i < Z.rows(); ++i) {
    for (Eigen::Index k = 0; k < Z.cols(); ++k) Z(i, k) = normal(pos_rng);
  }
  Rng edge_rng = child_rng(base, kEdges);
  return sample_latent_from_positions(std::move(Z), spec.alpha, edge_rng);
}

namespace {

// E[min(1, b * psi_i * psi_j)] for independent psi = V^(-1/4), V ~ U(0, 1).
// The inner integral over one V has the closed form 4c/3 - c^4/3 (c < 1).
double clipped_pair_mean(double b) {
  constexpr int kNodes = 4000;
  double total = 0.0;
  for (int t = 0; t < kNodes; ++t) {
    const double x = (t + 0.5) / kNodes;
    const double c = b / std::pow(x, 0.25);
    total += c >= 1.0 ? 1.0 : 4.0 * c / 3.0 - std::pow(c, 4) / 3.0;
  }
  return total / kNodes;
}

}  // namespace

double expected_mean_degree(std::size_t n, int k, double alpha, double beta, bool degree_corrected) {
  if (k < 1) throw DomainError("K must be >= 1");
  const double same = 1.0 / k;
  const double pair = degree_corrected
                          ? same * clipped_pair_mean(alpha) + (1.0 - same) * clipped_pair_mean(alpha * beta)
                          : alpha * (same + (1.0 - same) * beta);
  return static_cast<double>(n > 0 ? n - 1 : 0) * pair;
}

double alpha_for_mean_degree(std::size_t n, int k, double beta, double target, bool degree_corrected) {
  double lo = 0.0;
  double hi = 1.0;
  if (beta > 1.0 || beta < 0.0) throw DomainError("beta must lie in [0, 1]");
  if (!(target > 0.0) || expected_mean_degree(n, k, hi, beta, degree_corrected) < target) {
    throw DomainError("target mean degree " + std::to_string(target) + " not reachable with alpha <= 1");
  }
  for (int it = 0; it < 80; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (expected_mean_degree(n, k, mid, beta, degree_corrected) < target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace netcrop
