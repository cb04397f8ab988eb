#include "netcrop/estimators.hpp"

#include <string>

#include "netcrop/errors.hpp"

namespace netcrop {

namespace {

void check_inputs(std::span<const SparseSym> subs, std::span<const CommunityAssignment> assignments, int k) {
  if (k < 1) throw DomainError("K must be >= 1");
  if (subs.size() != assignments.size() || subs.empty()) {
    throw DomainError("need one assignment per subnetwork");
  }
  for (std::size_t q = 0; q < subs.size(); ++q) {
    if (static_cast<std::size_t>(subs[q].rows()) != assignments[q].labels.size()) {
      throw DomainError("assignment " + std::to_string(q) + " does not match its subnetwork size");
    }
    for (int g : assignments[q].labels) {
      if (g < 0 || g >= k) throw RangeError("label " + std::to_string(g) + " outside [0, K)");
    }
  }
}

// Sum of A over ordered pairs (i, j) with labels (k, k'); the diagonal is
// counted only when `with_diagonal`.
Eigen::MatrixXd block_sums(const SparseSym& a, const std::vector<int>& g, int k, bool with_diagonal) {
  Eigen::MatrixXd e = Eigen::MatrixXd::Zero(k, k);
  for (Eigen::Index i = 0; i < a.outerSize(); ++i) {
    for (SparseSym::InnerIterator it(a, i); it; ++it) {
      if (it.col() == i && !with_diagonal) continue;
      e(g[static_cast<std::size_t>(i)], g[static_cast<std::size_t>(it.col())]) += it.value();
    }
  }
  return e;
}

Eigen::VectorXd block_sizes(const std::vector<int>& g, int k) {
  Eigen::VectorXd n = Eigen::VectorXd::Zero(k);
  for (int c : g) n(c) += 1.0;
  return n;
}

}  // namespace

std::vector<SparseSym> training_matrices(const SparseSym& a, const SplitPlan& plan) {
  std::vector<SparseSym> out;
  out.reserve(plan.s());
  for (std::size_t q = 0; q < plan.s(); ++q) out.push_back(induced_submatrix(a, plan.training(q)));
  return out;
}

BlockmodelFit estimate_sbm(std::span<const SparseSym> subs, std::span<const CommunityAssignment> assignments, int k) {
  check_inputs(subs, assignments, k);
  BlockmodelFit fit;
  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(k, k);
  Eigen::MatrixXd present = Eigen::MatrixXd::Zero(k, k);
  double density_sum = 0.0;
  std::size_t empty_cells = 0;
  for (std::size_t q = 0; q < subs.size(); ++q) {
    const auto& g = assignments[q].labels;
    const Eigen::MatrixXd e = block_sums(subs[q], g, k, false);
    const Eigen::VectorXd nk = block_sizes(g, k);
    const double nn = static_cast<double>(g.size());
    const double density = nn > 1 ? e.sum() / (nn * (nn - 1.0)) : 0.0;
    density_sum += density;
    Eigen::MatrixXd b(k, k);
    for (int r = 0; r < k; ++r) {
      for (int c = 0; c < k; ++c) {
        const double pairs = nk(r) * nk(c) - (r == c ? nk(r) : 0.0);
        if (pairs > 0.0) {
          b(r, c) = e(r, c) / pairs;
          sum(r, c) += b(r, c);
          present(r, c) += 1.0;
        } else {
          b(r, c) = density;
          ++empty_cells;
        }
      }
    }
    fit.per_subnetwork.push_back(std::move(b));
  }
  const double fallback = density_sum / static_cast<double>(subs.size());
  fit.averaged.resize(k, k);
  for (int r = 0; r < k; ++r) {
    for (int c = 0; c < k; ++c) fit.averaged(r, c) = present(r, c) > 0.0 ? sum(r, c) / present(r, c) : fallback;
  }
  if (empty_cells > 0) {
    fit.warnings.push_back("SBM(K=" + std::to_string(k) + "): " + std::to_string(empty_cells) +
                           " empty block cells replaced by subnetwork density");
  }
  return fit;
}

BlockmodelFit estimate_dcbm_poisson(std::span<const SparseSym> subs, std::span<const CommunityAssignment> assignments,
                                    int k) {
  check_inputs(subs, assignments, k);
  BlockmodelFit fit;
  fit.averaged = Eigen::MatrixXd::Zero(k, k);
  std::size_t zero_blocks = 0;
  for (std::size_t q = 0; q < subs.size(); ++q) {
    const auto& g = assignments[q].labels;
    const Eigen::MatrixXd o = block_sums(subs[q], g, k, true);
    const Eigen::VectorXd kappa = o.rowwise().sum();
    Eigen::VectorXd psi(subs[q].rows());
    for (Eigen::Index i = 0; i < psi.size(); ++i) {
      double deg = 0.0;
      for (SparseSym::InnerIterator it(subs[q], i); it; ++it) deg += it.value();
      const double denom = kappa(g[static_cast<std::size_t>(i)]);
      if (denom > 0.0) {
        psi(i) = deg / denom;
      } else {
        psi(i) = 0.0;
        ++zero_blocks;
      }
    }
    fit.averaged += o;
    fit.per_subnetwork.push_back(o);
    fit.psi.push_back(std::move(psi));
  }
  fit.averaged /= static_cast<double>(subs.size());
  if (zero_blocks > 0) {
    fit.warnings.push_back("DCBM(K=" + std::to_string(k) + "): " + std::to_string(zero_blocks) +
                           " nodes in blocks without edges got psi = 0");
  }
  return fit;
}

BlockmodelFit estimate_dcbm_eigen(std::span<const Eigen::MatrixXd> eigenvectors, std::span<const SparseSym> subs,
                                  std::span<const CommunityAssignment> assignments, int k) {
  check_inputs(subs, assignments, k);
  if (eigenvectors.size() != subs.size()) throw DomainError("need one eigenbasis per subnetwork");
  BlockmodelFit fit;
  fit.averaged = Eigen::MatrixXd::Zero(k, k);
  std::size_t zero_cells = 0;
  for (std::size_t q = 0; q < subs.size(); ++q) {
    const auto& u = eigenvectors[q];
    if (u.rows() != subs[q].rows() || u.cols() < k) throw DomainError("eigenbasis too small for K");
    const auto& g = assignments[q].labels;
    const Eigen::VectorXd psi = u.leftCols(k).rowwise().norm();
    Eigen::VectorXd total = Eigen::VectorXd::Zero(k);
    Eigen::VectorXd squares = Eigen::VectorXd::Zero(k);
    for (Eigen::Index i = 0; i < psi.size(); ++i) {
      total(g[static_cast<std::size_t>(i)]) += psi(i);
      squares(g[static_cast<std::size_t>(i)]) += psi(i) * psi(i);
    }
    const Eigen::MatrixXd e = block_sums(subs[q], g, k, false);
    Eigen::MatrixXd b(k, k);
    for (int r = 0; r < k; ++r) {
      for (int c = 0; c < k; ++c) {
        const double denom = total(r) * total(c) - (r == c ? squares(r) : 0.0);
        if (denom > 0.0) {
          b(r, c) = e(r, c) / denom;
        } else {
          b(r, c) = 0.0;
          ++zero_cells;
        }
      }
    }
    fit.averaged += b;
    fit.per_subnetwork.push_back(std::move(b));
    fit.psi.push_back(psi);
  }
  fit.averaged /= static_cast<double>(subs.size());
  if (zero_cells > 0) {
    fit.warnings.push_back("DCBM(K=" + std::to_string(k) + "): " + std::to_string(zero_cells) +
                           " block cells with zero weight set to 0");
  }
  return fit;
}

BlockmodelFit estimate_sbm(const SparseSym& a, const SplitPlan& plan, std::span<const CommunityAssignment> assignments,
                           int k) {
  const auto subs = training_matrices(a, plan);
  return estimate_sbm(std::span<const SparseSym>(subs), assignments, k);
}

BlockmodelFit estimate_dcbm_poisson(const SparseSym& a, const SplitPlan& plan,
                                    std::span<const CommunityAssignment> assignments, int k) {
  const auto subs = training_matrices(a, plan);
  return estimate_dcbm_poisson(std::span<const SparseSym>(subs), assignments, k);
}

std::vector<PredictedBlock> predict_blockmodel(const SplitPlan& plan, std::span<const CommunityAssignment> assignments,
                                               const BlockmodelFit& fit) {
  if (assignments.size() != plan.s()) throw DomainError("need one assignment per subnetwork");
  // Row of part-q node a inside subnetwork q: overlap rows come first.
  const std::size_t o = plan.overlap.size();
  auto label = [&](std::size_t q, std::size_t a) { return assignments[q].labels[o + a]; };
  auto weight = [&](std::size_t q, std::size_t a) {
    return fit.degree_corrected() ? fit.psi[q](static_cast<Eigen::Index>(o + a)) : 1.0;
  };
  std::vector<PredictedBlock> out;
  for (std::size_t p = 0; p < plan.s(); ++p) {
    for (std::size_t q = p + 1; q < plan.s(); ++q) {
      PredictedBlock blk{{plan.parts[p], plan.parts[q]}, {}};
      const auto rows = plan.parts[p].size();
      const auto cols = plan.parts[q].size();
      blk.probs.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
      for (std::size_t a = 0; a < rows; ++a) {
        const int ga = label(p, a);
        const double wa = weight(p, a);
        for (std::size_t b = 0; b < cols; ++b) {
          blk.probs(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) =
              fit.averaged(ga, label(q, b)) * wa * weight(q, b);
        }
      }
      out.push_back(std::move(blk));
    }
  }
  return out;
}

}  // namespace netcrop
