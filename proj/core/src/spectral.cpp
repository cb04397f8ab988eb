#include "netcrop/spectral.hpp"

#include <cmath>
#include <string>

#include "netcrop/errors.hpp"

namespace netcrop {

namespace {

void check_k(int k, Eigen::Index n) {
  if (k < 1 || k > n) {
    throw DomainError("need 1 <= K <= n, got K=" + std::to_string(k) + " with n=" + std::to_string(n));
  }
}

CommunityAssignment wrap(std::vector<int> labels, int k) {
  CommunityAssignment out;
  out.subset = NodeSubset::all(labels.size());
  out.labels = std::move(labels);
  out.k = k;
  return out;
}

}  // namespace

std::vector<int> cluster_rows(const Eigen::MatrixXd& u, int k, Rng& rng, const ClusteringOptions& options) {
  check_k(k, u.rows());
  if (k == 1) return std::vector<int>(static_cast<std::size_t>(u.rows()), 0);
  return kmeans(u, k, rng, options.kmeans).labels;
}

std::vector<int> cluster_rows_spherical(const Eigen::MatrixXd& u, int k, Rng& rng,
                                        const ClusteringOptions& options) {
  check_k(k, u.rows());
  std::vector<int> labels(static_cast<std::size_t>(u.rows()), 0);
  if (k == 1) return labels;
  std::vector<Eigen::Index> positive;
  for (Eigen::Index i = 0; i < u.rows(); ++i) {
    if (u.row(i).norm() > 0.0) positive.push_back(i);
  }
  if (static_cast<Eigen::Index>(positive.size()) < k) {
    // Too few usable rows: give each its own community, the rest stay at 0.
    for (std::size_t a = 0; a < positive.size(); ++a) labels[static_cast<std::size_t>(positive[a])] = static_cast<int>(a);
    return labels;
  }
  Eigen::MatrixXd normalized(static_cast<Eigen::Index>(positive.size()), u.cols());
  for (std::size_t a = 0; a < positive.size(); ++a) {
    normalized.row(static_cast<Eigen::Index>(a)) = u.row(positive[a]).normalized();
  }
  const KMeansResult fit = options.spherical == SphericalBackend::KMeans
                               ? kmeans(normalized, k, rng, options.kmeans)
                               : kmedian(normalized, k, rng, options.kmeans);
  for (std::size_t a = 0; a < positive.size(); ++a) labels[static_cast<std::size_t>(positive[a])] = fit.labels[a];
  return labels;
}

CommunityAssignment spectral_clustering(const SparseSym& a, int k, Rng& rng, const ClusteringOptions& options) {
  check_k(k, a.rows());
  const EigenBasis basis = top_eigenpairs(a, k, EigenOrder::Magnitude, options.eigen);
  return wrap(cluster_rows(basis.vectors, k, rng, options), k);
}

CommunityAssignment spherical_spectral_clustering(const SparseSym& a, int k, Rng& rng,
                                                  const ClusteringOptions& options) {
  check_k(k, a.rows());
  const EigenBasis basis = top_eigenpairs(a, k, EigenOrder::Magnitude, options.eigen);
  return wrap(cluster_rows_spherical(basis.vectors, k, rng, options), k);
}

Embedding ase_from_basis(const EigenBasis& basis, int d) {
  if (d < 1) throw DomainError("embedding dimension must be >= 1");
  if (basis.order != EigenOrder::Algebraic) throw DomainError("ASE needs an algebraically ordered basis");
  const EigenBasis lead = basis.leading(d);
  Embedding out;
  out.subset = NodeSubset::all(static_cast<std::size_t>(lead.vectors.rows()));
  out.coords = lead.vectors * lead.values.cwiseMax(0.0).cwiseSqrt().asDiagonal();
  return out;
}

Embedding ase(const SparseSym& a, int d, const EigenOptions& options) {
  if (d < 1) throw DomainError("embedding dimension must be >= 1");
  return ase_from_basis(top_eigenpairs(a, d, EigenOrder::Algebraic, options), d);
}

SparseSym regularized_laplacian(const SparseSym& a, double tau) {
  if (!(tau >= 0.0)) throw DomainError("tau must be >= 0");
  const Eigen::Index n = a.rows();
  Eigen::VectorXd deg = Eigen::VectorXd::Zero(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (SparseSym::InnerIterator it(a, i); it; ++it) deg(i) += it.value();
  }
  const double mean = n > 0 ? deg.mean() : 0.0;
  if (mean <= 0.0) throw DomainError("regularized Laplacian of a graph with zero mean degree");
  Eigen::VectorXd inv_sqrt(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double reg = deg(i) + tau * mean;
    inv_sqrt(i) = reg > 0.0 ? 1.0 / std::sqrt(reg) : 0.0;
  }
  SparseSym l = a;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (SparseSym::InnerIterator it(l, i); it; ++it) it.valueRef() *= inv_sqrt(i) * inv_sqrt(it.col());
  }
  return l;
}

CommunityAssignment regularized_spectral_clustering(const SparseSym& a, int k, double tau, Rng& rng,
                                                    const ClusteringOptions& options) {
  check_k(k, a.rows());
  const SparseSym l = regularized_laplacian(a, tau);
  const EigenBasis basis = top_eigenpairs(l, k, EigenOrder::Algebraic, options.eigen);
  return wrap(cluster_rows_spherical(basis.vectors, k, rng, options), k);
}

}  // namespace netcrop
