#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "netcrop/graph.hpp"
#include "netcrop/spectral.hpp"

namespace netcrop {

/// Bijection on [0, K): source label a becomes map[a].
struct PermutationMap {
  std::vector<int> map;

  int k() const noexcept { return static_cast<int>(map.size()); }
  bool is_bijection() const;
  std::vector<int> apply(std::span<const int> labels) const;
  static PermutationMap identity(int k);
};

struct OrthogonalMap {
  Eigen::MatrixXd matrix;
  /// Set when the cross-product matrix was zero and the identity was returned.
  bool degenerate = false;

  int d() const noexcept { return static_cast<int>(matrix.rows()); }
};

/// Largest K accepted by match_bf.
inline constexpr int kMaxBruteForceK = 8;

/// Number of nodes i with map[c1[i]] != c2[i].
std::size_t mismatches(std::span<const int> c1, std::span<const int> c2, const PermutationMap& map);

/// Exhaustive search; ties go to the lexicographically smallest permutation.
PermutationMap match_bf(std::span<const int> c1, std::span<const int> c2, int k);

/// Greedy peeling of the confusion matrix, ties toward lower row then column.
PermutationMap match_greedy(std::span<const int> c1, std::span<const int> c2, int k);

enum class MatchingRule { Auto, BruteForce, Greedy };

/// Auto uses brute force for K <= 6 and greedy above.
PermutationMap match_labels(std::span<const int> c1, std::span<const int> c2, int k, MatchingRule rule);
MatchingRule resolve_matching(MatchingRule rule, int k) noexcept;

/// Orthogonal W minimizing |from * W - to|_F.
OrthogonalMap procrustes(const Eigen::MatrixXd& from, const Eigen::MatrixXd& to);

struct AlignmentResult {
  std::vector<OrthogonalMap> maps;  // maps[0] is the identity
  std::vector<std::string> warnings;
};

/// Rotates every embedding onto embeddings[0] using only the overlap rows.
AlignmentResult align_embeddings(std::vector<Embedding>& embeddings, const NodeSubset& overlap);

/// Rigid-motion version for latent-space positions: center each embedding on
/// its overlap centroid, rotate, and move it onto the standard's overlap centroid.
AlignmentResult align_latent(std::vector<Embedding>& embeddings, const NodeSubset& overlap);

/// Rows of `e` belonging to the nodes of `nodes`, in that order.
Eigen::MatrixXd rows_for(const Embedding& e, const NodeSubset& nodes);

}  // namespace netcrop
