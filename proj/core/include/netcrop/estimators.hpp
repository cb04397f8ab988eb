#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "netcrop/cv.hpp"
#include "netcrop/graph.hpp"
#include "netcrop/spectral.hpp"

namespace netcrop {

/// Connectivity estimate shared by the three blockmodel estimators. For the
/// degree-corrected forms `psi[q]` holds one weight per row of subnetwork q.
struct BlockmodelFit {
  Eigen::MatrixXd averaged;
  std::vector<Eigen::MatrixXd> per_subnetwork;
  std::vector<Eigen::VectorXd> psi;
  std::vector<std::string> warnings;

  bool degree_corrected() const noexcept { return !psi.empty(); }
};

/// Extracts A restricted to every training subnetwork of `plan`.
std::vector<SparseSym> training_matrices(const SparseSym& a, const SplitPlan& plan);

/// Plug-in B: mean of A over node pairs (i != j) with labels (k, k'). Empty
/// cells fall back to the subnetwork's density; averaging over subnetworks
/// skips the subnetworks where that cell was empty.
BlockmodelFit estimate_sbm(std::span<const SparseSym> subnetworks, std::span<const CommunityAssignment> assignments,
                           int k);

/// Poisson approximation: O counts A over ordered pairs between blocks and
/// psi_i = degree(i) / (total degree of i's block), so sum of psi in a block is 1.
BlockmodelFit estimate_dcbm_poisson(std::span<const SparseSym> subnetworks,
                                    std::span<const CommunityAssignment> assignments, int k);

/// Eigenvector form: psi'_i is the norm of row i of the first K columns of
/// `eigenvectors[q]`; B'_kk' = block edge sum / block sum of psi'_i psi'_j.
BlockmodelFit estimate_dcbm_eigen(std::span<const Eigen::MatrixXd> eigenvectors,
                                  std::span<const SparseSym> subnetworks,
                                  std::span<const CommunityAssignment> assignments, int k);

BlockmodelFit estimate_sbm(const SparseSym& a, const SplitPlan& plan, std::span<const CommunityAssignment> assignments,
                           int k);
BlockmodelFit estimate_dcbm_poisson(const SparseSym& a, const SplitPlan& plan,
                                    std::span<const CommunityAssignment> assignments, int k);

/// P_ij = B[g_i, g_j] * psi_i * psi_j on every test block, where labels and psi
/// of a node come from the subnetwork containing its part.
std::vector<PredictedBlock> predict_blockmodel(const SplitPlan& plan, std::span<const CommunityAssignment> assignments,
                                               const BlockmodelFit& fit);

}  // namespace netcrop
