#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "netcrop/alignment.hpp"
#include "netcrop/cv.hpp"
#include "netcrop/graph.hpp"
#include "netcrop/latent_mle.hpp"
#include "netcrop/spectral.hpp"

namespace netcrop {

enum class DcbmEstimator { Poisson, Eigen };

struct EngineOptions {
  ClusteringOptions clustering;
  DcbmEstimator dcbm = DcbmEstimator::Poisson;
  MatchingRule matching = MatchingRule::Auto;
  LatentFitOptions latent;
  /// Wall-clock phases are only measured on request, so that reports of
  /// identical runs stay byte-identical by default.
  bool record_timings = false;
};

using ConfigValue = std::variant<bool, std::int64_t, double, std::string, std::vector<double>>;

struct RepetitionResult {
  CandidateModel winner;
  std::vector<double> losses;  // one per candidate; +inf marks a failed fit
};

struct SelectionReport {
  std::vector<std::pair<std::string, ConfigValue>> config;
  std::vector<CandidateModel> candidates;
  std::vector<RepetitionResult> repetitions;
  CandidateModel final_winner;
  std::vector<std::pair<std::string, double>> timings_ms;
  std::vector<std::string> warnings;

  /// Per-candidate mean over repetitions.
  std::vector<double> mean_losses() const;
};

struct RscSelection {
  SelectionReport report;
  /// Stitched labels of every node at the selected tau.
  std::vector<int> labels;
};

/// Candidates SBM(1), DCBM(1), ..., SBM(kmax), DCBM(kmax).
SelectionReport select_blockmodel(const SparseSym& a, const CvConfig& config, int kmax,
                                  const EngineOptions& options = {});
SelectionReport select_rdpg_dim(const SparseSym& a, const CvConfig& config, int dmax,
                                const EngineOptions& options = {});
SelectionReport select_latent_dim(const SparseSym& a, const CvConfig& config, int dmax,
                                  const EngineOptions& options = {});
RscSelection tune_rsc(const SparseSym& a, const CvConfig& config, int k, std::span<const double> taus,
                      const EngineOptions& options = {});

SelectionReport select_blockmodel(const AdjacencyMatrix& a, const CvConfig& config, int kmax,
                                  const EngineOptions& options = {});
SelectionReport select_rdpg_dim(const AdjacencyMatrix& a, const CvConfig& config, int dmax,
                                const EngineOptions& options = {});
SelectionReport select_latent_dim(const AdjacencyMatrix& a, const CvConfig& config, int dmax,
                                  const EngineOptions& options = {});
RscSelection tune_rsc(const AdjacencyMatrix& a, const CvConfig& config, int k, std::span<const double> taus,
                      const EngineOptions& options = {});

/// Runs body(0..count-1) on up to `threads` workers. Exceptions are rethrown
/// after all workers finish, lowest index first.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& body);

/// Stitched labels for one repetition: subnetwork q's labels must already be
/// matched; overlap nodes take subnetwork 0's labels.
std::vector<int> stitch_labels(const SplitPlan& plan, std::span<const CommunityAssignment> assignments);

/// Predicted probabilities X_p X_q^T on every test block from aligned
/// embeddings, truncated to the first `d` columns.
std::vector<PredictedBlock> predict_rdpg(const SplitPlan& plan, std::span<const Embedding> embeddings, int d);

/// logistic((alpha_p + alpha_q)/2 - |z_i - z_j|^2) on every test block.
std::vector<PredictedBlock> predict_latent(const SplitPlan& plan, std::span<const Embedding> embeddings,
                                           std::span<const double> alphas);

}  // namespace netcrop
