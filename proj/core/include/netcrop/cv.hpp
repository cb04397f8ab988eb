#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "netcrop/graph.hpp"
#include "netcrop/rng.hpp"

namespace netcrop {

enum class LossKind { Squared, Deviance, NegAuc };

std::string to_string(LossKind loss);
LossKind parse_loss(const std::string& name);

struct PlanParameters {
  std::size_t o = 0;
  std::size_t s = 0;
  std::size_t m = 0;
};

/// Overlap size, subnetwork count and part size for a target test fraction.
PlanParameters plan_parameters(std::size_t n, double p_test);

struct CvConfig {
  std::size_t n = 0;
  std::size_t o = 0;
  std::size_t s = 2;
  std::size_t m = 0;
  int repetitions = 1;
  /// Target test fraction; 0 when (o, s) were given explicitly.
  double p_test = 0.0;
  LossKind loss = LossKind::Squared;
  std::uint64_t seed = 0;
  /// Worker threads; never affects results.
  int threads = 1;

  void validate() const;

  static CvConfig from_test_fraction(std::size_t n, double p_test);
  /// Requires (n - o) divisible by s.
  static CvConfig from_overlap(std::size_t n, std::size_t o, std::size_t s);
};

/// Default test fraction: 0.02 for n >= 1000, else 0.1.
double default_test_fraction(std::size_t n) noexcept;

struct SplitPlan {
  std::size_t n = 0;
  NodeSubset overlap;              // S_0, sorted
  std::vector<NodeSubset> parts;   // S_1..S_s, each sorted

  std::size_t s() const noexcept { return parts.size(); }
  /// S_0 followed by S_q; overlap rows come first in every subnetwork.
  NodeSubset training(std::size_t q) const;
  std::size_t test_pair_count() const noexcept;
  /// The s(s-1)/2 blocks S_p x S_q, p < q, in lexicographic (p, q) order.
  std::vector<DensePairBlock> test_blocks() const;

  static SplitPlan from_parts(std::size_t n, NodeSubset overlap, std::vector<NodeSubset> parts);
};

SplitPlan make_split(const CvConfig& config, Rng& rng);

double loss_sq(double a, double p) noexcept;
double loss_dev(double a, double p) noexcept;
/// Negative area under the ROC curve with midranks for tied scores. Returns -0.5
/// when either class is empty.
double loss_negauc(std::span<const double> labels, std::span<const double> scores);

inline constexpr double kDevianceClip = 1e-9;

struct PredictedBlock {
  DensePairBlock block;
  Eigen::MatrixXd probs;  // rows x cols
};

/// Sum of entry losses over all test blocks, or the pooled negative AUC.
/// Throws ConsistencyError unless the blocks are exactly the plan's test blocks.
double total_loss(const SparseSym& a, const SplitPlan& plan, std::span<const PredictedBlock> blocks, LossKind loss);

/// A point of a candidate set.
struct CandidateModel {
  enum class Kind { Blockmodel, RdpgDim, LatentDim, RscTau };

  Kind kind = Kind::Blockmodel;
  int k = 0;  // K for blockmodels, d for dimensions
  bool degree_corrected = false;
  double tau = 0.0;

  static CandidateModel blockmodel(int k, bool dc) { return {Kind::Blockmodel, k, dc, 0.0}; }
  static CandidateModel rdpg(int d) { return {Kind::RdpgDim, d, false, 0.0}; }
  static CandidateModel latent(int d) { return {Kind::LatentDim, d, false, 0.0}; }
  static CandidateModel rsc(double tau) { return {Kind::RscTau, 0, false, tau}; }

  std::string name() const;
  /// Complexity order: smaller K/d first, SBM before DCBM, smaller tau first.
  bool simpler_than(const CandidateModel& other) const noexcept;

  friend bool operator==(const CandidateModel&, const CandidateModel&) = default;
};

/// Index of the smallest loss. Losses within 1e-12 relative of the incumbent
/// count as ties and go to the simpler candidate, then to the earlier one.
/// NaN counts as +infinity.
std::size_t argmin_loss(std::span<const CandidateModel> candidates, std::span<const double> losses);

/// Modal winner; ties go to the simpler candidate.
CandidateModel majority_vote(std::span<const CandidateModel> winners);

}  // namespace netcrop
