#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "netcrop/graph.hpp"
#include "netcrop/rng.hpp"

namespace netcrop {

struct LatentFitOptions {
  std::size_t max_iterations = 200;
  /// Relative log-likelihood change that counts as converged.
  double tolerance = 1e-6;
  /// First trial step; 0 means 1/n.
  double initial_step = 0.0;
  /// Each iteration first tries twice the previously accepted step.
  bool warm_start_step = true;
  /// Rows of Z are projected onto this ball after centering; 0 disables it.
  double radius = 0.0;
  bool fit_positions = true;
  bool fit_alpha = true;
  std::optional<double> initial_alpha;
  std::optional<Eigen::MatrixXd> initial_positions;
};

struct LatentFit {
  double alpha = 0.0;
  Eigen::MatrixXd Z;
  double log_likelihood = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  /// Log-likelihood after each accepted step, starting at the initial point.
  std::vector<double> trace;
};

struct LatentGradient {
  double alpha = 0.0;
  Eigen::MatrixXd Z;
};

/// sum_{i<j} [A_ij eta_ij - log(1 + exp(eta_ij))], eta_ij = alpha - |z_i - z_j|^2.
double latent_log_likelihood(const Eigen::MatrixXd& a, double alpha, const Eigen::MatrixXd& z);
LatentGradient latent_gradient(const Eigen::MatrixXd& a, double alpha, const Eigen::MatrixXd& z);

/// Projected gradient ascent with backtracking. Z is column-centered after every
/// step. Starts from the scaled top-d embedding of the double-centered adjacency
/// and alpha = logit(density) unless initial values are supplied.
LatentFit fit_latent(const SparseSym& a, int d, Rng& rng, const LatentFitOptions& options = {});

}  // namespace netcrop
