#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "netcrop/graph.hpp"
#include "netcrop/rng.hpp"

namespace netcrop {

using DegreeSampler = std::function<Eigen::VectorXd(std::size_t n, Rng& rng)>;

/// SBM(n, K, B) or, when `degrees` is set, DCBM(n, K, B, psi).
struct BlockmodelSpec {
  std::size_t n = 0;
  Eigen::MatrixXd B;
  DegreeSampler degrees;

  int k() const noexcept { return static_cast<int>(B.rows()); }
  void validate() const;
};

struct BlockmodelSample {
  AdjacencyMatrix adjacency;
  std::vector<int> labels;
  Eigen::VectorXd psi;  // all ones for the SBM path
};

struct RdpgSpec {
  std::size_t n = 0;
  int d = 1;
  double zeta = 1.0;
  void validate() const;
};

/// P = zeta * X X^T / max(X X^T) with X_ik ~ U(0, 1).
struct RdpgSample {
  AdjacencyMatrix adjacency;
  Eigen::MatrixXd X;
  double zeta = 1.0;
  double max_gram = 1.0;

  double probability(Eigen::Index i, Eigen::Index j) const;
  Eigen::MatrixXd probabilities() const;
};

struct LatentSpec {
  std::size_t n = 0;
  int d = 1;
  double alpha = 0.0;
  void validate() const;
};

/// logit P_ij = alpha - |z_i - z_j|^2.
struct LatentSample {
  AdjacencyMatrix adjacency;
  Eigen::MatrixXd Z;
  double alpha = 0.0;

  double probability(Eigen::Index i, Eigen::Index j) const;
  Eigen::MatrixXd probabilities() const;
};

double logistic(double x) noexcept;

/// alpha * ((1 - beta) I + beta J).
Eigen::MatrixXd planted_partition_B(int k, double alpha, double beta);

/// Draws labels (uniform when `labels` is empty), degree parameters, then the
/// upper triangle. Each stage uses its own child stream of a single draw from
/// `rng`, so a DCBM with psi == 1 reproduces the SBM sample bit for bit.
BlockmodelSample sample_blockmodel(const BlockmodelSpec& spec,
                                   const std::optional<std::vector<int>>& labels, Rng& rng);

/// psi_i = 1 / U_i with U_i ~ Beta(4, 1).
Eigen::VectorXd sample_dcbm_degrees(std::size_t n, Rng& rng);

DegreeSampler inverse_beta_degrees();
DegreeSampler constant_degrees(double value);

/// Dense expectation matrix min(1, B[g_i, g_j] psi_i psi_j), diagonal included.
Eigen::MatrixXd blockmodel_probabilities(const Eigen::MatrixXd& B, const std::vector<int>& labels,
                                         const Eigen::VectorXd& psi);

RdpgSample sample_rdpg(const RdpgSpec& spec, Rng& rng);

LatentSample sample_latent(const LatentSpec& spec, Rng& rng);
LatentSample sample_latent_from_positions(Eigen::MatrixXd Z, double alpha, Rng& rng);

/// Expected mean degree of a planted-partition network with uniform labels.
/// With `degree_corrected` the 1/Beta(4,1) degrees and the clipping at 1 are
/// integrated out numerically.
double expected_mean_degree(std::size_t n, int k, double alpha, double beta, bool degree_corrected);

/// Bisection on `expected_mean_degree` for the alpha hitting `target`.
double alpha_for_mean_degree(std::size_t n, int k, double beta, double target, bool degree_corrected);

}  // namespace netcrop
