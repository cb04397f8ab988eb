#include "netcrop/alignment.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "netcrop/errors.hpp"

namespace netcrop {

namespace {

void check_labels(std::span<const int> c1, std::span<const int> c2, int k) {
  if (c1.size() != c2.size()) throw DomainError("label vectors differ in length");
  if (k < 1) throw DomainError("K must be >= 1");
  for (auto v : {c1, c2}) {
    for (int g : v) {
      if (g < 0 || g >= k) throw RangeError("label " + std::to_string(g) + " outside [0, K)");
    }
  }
}

std::vector<std::vector<std::size_t>> confusion(std::span<const int> c1, std::span<const int> c2, int k) {
  std::vector<std::vector<std::size_t>> m(static_cast<std::size_t>(k), std::vector<std::size_t>(static_cast<std::size_t>(k), 0));
  for (std::size_t i = 0; i < c1.size(); ++i) ++m[static_cast<std::size_t>(c1[i])][static_cast<std::size_t>(c2[i])];
  return m;
}

}  // namespace

bool PermutationMap::is_bijection() const {
  std::vector<char> seen(map.size(), 0);
  for (int t : map) {
    if (t < 0 || t >= k() || seen[static_cast<std::size_t>(t)]) return false;
    seen[static_cast<std::size_t>(t)] = 1;
  }
  return true;
}

std::vector<int> PermutationMap::apply(std::span<const int> labels) const {
  std::vector<int> out(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) out[i] = map[static_cast<std::size_t>(labels[i])];
  return out;
}

PermutationMap PermutationMap::identity(int k) {
  PermutationMap p;
  p.map.resize(static_cast<std::size_t>(k));
  std::iota(p.map.begin(), p.map.end(), 0);
  return p;
}

std::size_t mismatches(std::span<const int> c1, std::span<const int> c2, const PermutationMap& map) {
  std::size_t count = 0;
  for (std::size_t i = 0; i < c1.size(); ++i) count += map.map[static_cast<std::size_t>(c1[i])] != c2[i];
  return count;
}

PermutationMap match_bf(std::span<const int> c1, std::span<const int> c2, int k) {
  if (k > kMaxBruteForceK) {
    throw ComplexityError("brute-force matching limited to K <= " + std::to_string(kMaxBruteForceK) +
                          "; use greedy matching");
  }
  check_labels(c1, c2, k);
  const auto m = confusion(c1, c2, k);
  PermutationMap perm = PermutationMap::identity(k);
  PermutationMap best = perm;
  std::size_t best_hits = 0;
  bool first = true;
  do {
    std::size_t hits = 0;
    for (int a = 0; a < k; ++a) hits += m[static_cast<std::size_t>(a)][static_cast<std::size_t>(perm.map[static_cast<std::size_t>(a)])];
    if (first || hits > best_hits) {
      best = perm;
      best_hits = hits;
      first = false;
    }
  } while (std::next_permutation(perm.map.begin(), perm.map.end()));
  return best;
}

PermutationMap match_greedy(std::span<const int> c1, std::span<const int> c2, int k) {
  check_labels(c1, c2, k);
  const auto m = confusion(c1, c2, k);
  std::vector<char> row_used(static_cast<std::size_t>(k), 0);
  std::vector<char> col_used(static_cast<std::size_t>(k), 0);
  PermutationMap out;
  out.map.assign(static_cast<std::size_t>(k), -1);
  for (int step = 0; step < k; ++step) {
    int br = -1;
    int bc = -1;
    for (int a = 0; a < k; ++a) {
      if (row_used[static_cast<std::size_t>(a)]) continue;
      for (int b = 0; b < k; ++b) {
        if (col_used[static_cast<std::size_t>(b)]) continue;
        if (br < 0 || m[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] >
                          m[static_cast<std::size_t>(br)][static_cast<std::size_t>(bc)]) {
          br = a;
          bc = b;
        }
      }
    }
    out.map[static_cast<std::size_t>(br)] = bc;
    row_used[static_cast<std::size_t>(br)] = 1;
    col_used[static_cast<std::size_t>(bc)] = 1;
  }
  return out;
}

MatchingRule resolve_matching(MatchingRule rule, int k) noexcept {
  if (rule != MatchingRule::Auto) return rule;
  return k <= 6 ? MatchingRule::BruteForce : MatchingRule::Greedy;
}

PermutationMap match_labels(std::span<const int> c1, std::span<const int> c2, int k, MatchingRule rule) {
  return resolve_matching(rule, k) == MatchingRule::BruteForce ? match_bf(c1, c2, k) : match_greedy(c1, c2, k);
}

OrthogonalMap procrustes(const Eigen::MatrixXd& from, const Eigen::MatrixXd& to) {
  if (from.rows() != to.rows() || from.cols() != to.cols()) throw DomainError("Procrustes inputs differ in shape");
  if (from.rows() < 1 || from.cols() < 1) throw DomainError("Procrustes needs at least one row and column");
  const Eigen::MatrixXd cross = from.transpose() * to;
  OrthogonalMap out;
  if (cross.cwiseAbs().maxCoeff() == 0.0) {
    out.matrix = Eigen::MatrixXd::Identity(from.cols(), from.cols());
    out.degenerate = true;
    return out;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(cross, Eigen::ComputeFullU | Eigen::ComputeFullV);
  out.matrix = svd.matrixU() * svd.matrixV().transpose();
  return out;
}

Eigen::MatrixXd rows_for(const Embedding& e, const NodeSubset& nodes) {
  const auto pos = e.subset.positions();
  Eigen::MatrixXd out(static_cast<Eigen::Index>(nodes.size()), e.coords.cols());
  for (std::size_t a = 0; a < nodes.size(); ++a) {
    const auto node = static_cast<std::size_t>(nodes[a]);
    if (node >= pos.size() || pos[node] < 0) throw DomainError("embedding lacks a requested node");
    out.row(static_cast<Eigen::Index>(a)) = e.coords.row(pos[node]);
  }
  return out;
}

namespace {

AlignmentResult align(std::vector<Embedding>& embeddings, const NodeSubset& overlap, bool translate) {
  AlignmentResult result;
  if (embeddings.empty()) return result;
  const int d = embeddings[0].dim();
  for (const auto& e : embeddings) {
    if (e.dim() != d) throw DomainError("embeddings differ in dimension");
  }
  if (static_cast<int>(overlap.size()) < d) {
    result.warnings.push_back("overlap of " + std::to_string(overlap.size()) + " nodes is smaller than dimension " +
                              std::to_string(d) + "; alignment is ill-posed");
  }
  Eigen::MatrixXd target = rows_for(embeddings[0], overlap);
  Eigen::RowVectorXd target_centroid = Eigen::RowVectorXd::Zero(d);
  if (translate && target.rows() > 0) {
    target_centroid = target.colwise().mean();
    target.rowwise() -= target_centroid;
  }
  result.maps.push_back({Eigen::MatrixXd::Identity(d, d), false});
  for (std::size_t q = 1; q < embeddings.size(); ++q) {
    Eigen::MatrixXd from = rows_for(embeddings[q], overlap);
    Eigen::RowVectorXd centroid = Eigen::RowVectorXd::Zero(d);
    if (translate && from.rows() > 0) {
      centroid = from.colwise().mean();
      from.rowwise() -= centroid;
    }
    OrthogonalMap w = procrustes(from, target);
    if (w.degenerate) result.warnings.push_back("subnetwork " + std::to_string(q) + ": degenerate Procrustes fit");
    auto& coords = embeddings[q].coords;
    if (translate) {
      coords.rowwise() -= centroid;
      coords = (coords * w.matrix).eval();
      coords.rowwise() += target_centroid;
    } else {
      coords = (coords * w.matrix).eval();
    }
    result.maps.push_back(std::move(w));
  }
  return result;
}

}  // namespace

AlignmentResult align_embeddings(std::vector<Embedding>& embeddings, const NodeSubset& overlap) {
  return align(embeddings, overlap, false);
}

AlignmentResult align_latent(std::vector<Embedding>& embeddings, const NodeSubset& overlap) {
  return align(embeddings, overlap, true);
}

}  // namespace netcrop
