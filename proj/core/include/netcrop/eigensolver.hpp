#pragma once

#include <cstddef>
#include <cstdint>

#include <Eigen/Dense>

#include "netcrop/graph.hpp"

namespace netcrop {

/// Which end of the spectrum counts as "leading".
enum class EigenOrder {
  Magnitude,  ///< |lambda| descending, ties toward the positive eigenvalue (SC, SSC)
  Algebraic,  ///< lambda descending (ASE, regularized Laplacian)
};

struct EigenOptions {
  /// Matrices with at most this many rows use the dense symmetric solver.
  std::size_t dense_threshold = 1024;
  /// Residual target |Av - lambda v| <= tolerance * max(1, |lambda|).
  double tolerance = 1e-6;
  std::size_t max_restarts = 3000;
  /// Krylov basis size for the Lanczos path; 0 picks max(2k + 20, 50).
  std::size_t krylov_dim = 0;
  std::uint64_t start_seed = 0x6e657463726f70ULL;
};

struct EigenBasis {
  Eigen::VectorXd values;   // ordered per `order`
  Eigen::MatrixXd vectors;  // n x k, orthonormal columns
  EigenOrder order = EigenOrder::Magnitude;
  double max_residual = 0.0;

  int size() const noexcept { return static_cast<int>(values.size()); }
  /// First `k` eigenpairs, i.e. the truncation used for candidate dimension k.
  EigenBasis leading(int k) const;
};

/// Leading `k` eigenpairs of a symmetric matrix. Each eigenvector is signed so
/// that its largest-magnitude entry is positive.
EigenBasis top_eigenpairs(const SparseSym& a, int k, EigenOrder order, const EigenOptions& options = {});
EigenBasis top_eigenpairs(const Eigen::MatrixXd& a, int k, EigenOrder order, const EigenOptions& options = {});

}  // namespace netcrop
