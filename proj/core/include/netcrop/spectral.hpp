#pragma once

#include <vector>

#include <Eigen/Dense>

#include "netcrop/eigensolver.hpp"
#include "netcrop/graph.hpp"
#include "netcrop/kmeans.hpp"
#include "netcrop/rng.hpp"

namespace netcrop {

/// Labels for the nodes of `subset`, in subset order.
struct CommunityAssignment {
  NodeSubset subset;
  std::vector<int> labels;
  int k = 1;
};

/// Latent coordinates, one row per node of `subset`.
struct Embedding {
  NodeSubset subset;
  Eigen::MatrixXd coords;

  int dim() const noexcept { return static_cast<int>(coords.cols()); }
};

enum class SphericalBackend { KMeans, KMedian };

struct ClusteringOptions {
  KMeansOptions kmeans;
  SphericalBackend spherical = SphericalBackend::KMeans;
  EigenOptions eigen;
};

/// Clusters the rows of an eigenvector block (the second half of SC).
std::vector<int> cluster_rows(const Eigen::MatrixXd& u, int k, Rng& rng, const ClusteringOptions& options = {});

/// Row-normalizes, clusters rows of positive norm, and puts zero rows in community 0.
std::vector<int> cluster_rows_spherical(const Eigen::MatrixXd& u, int k, Rng& rng,
                                        const ClusteringOptions& options = {});

CommunityAssignment spectral_clustering(const SparseSym& a, int k, Rng& rng, const ClusteringOptions& options = {});
CommunityAssignment spherical_spectral_clustering(const SparseSym& a, int k, Rng& rng,
                                                  const ClusteringOptions& options = {});

/// X = U diag(max(lambda, 0))^(1/2) from the d largest algebraic eigenpairs.
Embedding ase(const SparseSym& a, int d, const EigenOptions& options = {});
Embedding ase_from_basis(const EigenBasis& basis, int d);

/// D_tau^(-1/2) A D_tau^(-1/2) with D_tau = D + tau * mean_degree * I. Nodes whose
/// regularized degree is zero get a zero row and column.
SparseSym regularized_laplacian(const SparseSym& a, double tau);

CommunityAssignment regularized_spectral_clustering(const SparseSym& a, int k, double tau, Rng& rng,
                                                    const ClusteringOptions& options = {});

}  // namespace netcrop
