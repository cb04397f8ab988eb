#include "netcrop/selection.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <thread>

#include "netcrop/eigensolver.hpp"
#include "netcrop/errors.hpp"
#include "netcrop/estimators.hpp"
#include "netcrop/generators.hpp"

namespace netcrop {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct RepOutput {
  std::vector<double> losses;
  std::vector<std::string> warnings;
  std::vector<int> labels;  // tune_rsc only: stitched labels at this repetition's winner
  std::vector<std::pair<std::string, double>> timings;
};

class PhaseClock {
 public:
  PhaseClock(bool on, std::vector<std::pair<std::string, double>>& sink) : on_(on), sink_(sink) { reset(); }
  void reset() {
    if (on_) start_ = std::chrono::steady_clock::now();
  }
  void lap(const std::string& phase) {
    if (!on_) return;
    const auto now = std::chrono::steady_clock::now();
    sink_.emplace_back(phase, std::chrono::duration<double, std::milli>(now - start_).count());
    start_ = now;
  }

 private:
  bool on_;
  std::vector<std::pair<std::string, double>>& sink_;
  std::chrono::steady_clock::time_point start_;
};

std::string matching_name(MatchingRule r) {
  switch (r) {
    case MatchingRule::Auto: return "auto";
    case MatchingRule::BruteForce: return "bf";
    case MatchingRule::Greedy: return "greedy";
  }
  return "auto";
}

std::vector<std::pair<std::string, ConfigValue>> base_config(const std::string& pipeline, const CvConfig& c) {
  return {{"pipeline", pipeline},
          {"n", static_cast<std::int64_t>(c.n)},
          {"o", static_cast<std::int64_t>(c.o)},
          {"s", static_cast<std::int64_t>(c.s)},
          {"m", static_cast<std::int64_t>(c.m)},
          {"p_test", c.p_test},
          {"repetitions", static_cast<std::int64_t>(c.repetitions)},
          {"loss", to_string(c.loss)},
          {"seed", std::to_string(c.seed)}};
}

void clustering_config(std::vector<std::pair<std::string, ConfigValue>>& cfg, const EngineOptions& o) {
  cfg.emplace_back("spherical_backend",
                   std::string(o.clustering.spherical == SphericalBackend::KMeans ? "kmeans" : "kmedian"));
  cfg.emplace_back("kmeans_restarts", static_cast<std::int64_t>(o.clustering.kmeans.restarts));
  cfg.emplace_back("matching", matching_name(o.matching));
  cfg.emplace_back("eigen_dense_threshold", static_cast<std::int64_t>(o.clustering.eigen.dense_threshold));
}

// Repetition r gets seed derive(master, r); its split uses stream 0 of that
// seed and subnetwork q uses stream q + 1.
std::uint64_t repetition_seed(const CvConfig& c, std::size_t r) { return derive_seed(c.seed, r); }
std::uint64_t subnetwork_seed(std::uint64_t rep, std::size_t q) { return derive_seed(rep, q + 1); }

template <typename RunRep>
SelectionReport drive(const SparseSym& a, const CvConfig& config, std::vector<CandidateModel> candidates,
                      std::vector<std::pair<std::string, ConfigValue>> echo, const EngineOptions& options,
                      RunRep&& run_rep, std::vector<RepOutput>* outputs_out = nullptr) {
  config.validate();
  if (static_cast<std::size_t>(a.rows()) != config.n || a.rows() != a.cols()) {
    throw DomainError("configuration is for n=" + std::to_string(config.n) + " but the network has " +
                      std::to_string(a.rows()) + " nodes");
  }
  const auto reps = static_cast<std::size_t>(config.repetitions);
  const int outer = reps > 1 ? config.threads : 1;
  const int inner = reps > 1 ? 1 : config.threads;
  std::vector<RepOutput> outputs(reps);
  parallel_for(reps, outer, [&](std::size_t r) {
    const std::uint64_t seed = repetition_seed(config, r);
    RepOutput& out = outputs[r];
    PhaseClock clock(options.record_timings, out.timings);
    Rng split_rng = child_rng(seed, 0);
    const SplitPlan plan = make_split(config, split_rng);
    clock.lap("split");
    run_rep(plan, seed, inner, out, clock);
    if (out.losses.size() != candidates.size()) throw ConsistencyError("repetition produced the wrong loss count");
  });

  SelectionReport report;
  report.config = std::move(echo);
  report.candidates = std::move(candidates);
  std::vector<CandidateModel> winners;
  for (std::size_t r = 0; r < reps; ++r) {
    auto& out = outputs[r];
    const std::size_t best = argmin_loss(report.candidates, out.losses);
    winners.push_back(report.candidates[best]);
    report.repetitions.push_back({report.candidates[best], out.losses});
    for (auto& w : out.warnings) report.warnings.push_back("repetition " + std::to_string(r) + ": " + w);
    for (auto& [phase, ms] : out.timings) {
      auto it = std::find_if(report.timings_ms.begin(), report.timings_ms.end(),
                             [&](const auto& t) { return t.first == phase; });
      if (it == report.timings_ms.end()) {
        report.timings_ms.emplace_back(phase, ms);
      } else {
        it->second += ms;
      }
    }
  }
  report.final_winner = majority_vote(winners);
  if (outputs_out) *outputs_out = std::move(outputs);
  return report;
}

double guarded_loss(const SparseSym& a, const SplitPlan& plan, const CandidateModel& c, LossKind loss,
                    std::vector<std::string>& warnings, const std::function<std::vector<PredictedBlock>()>& predict) {
  try {
    const auto blocks = predict();
    const double value = total_loss(a, plan, blocks, loss);
    if (!std::isfinite(value)) {
      warnings.push_back(c.name() + ": non-finite loss");
      return kInf;
    }
    return value;
  } catch (const Error& e) {
    warnings.push_back(c.name() + ": fit failed (" + e.what() + ")");
    return kInf;
  }
}

// Relabels every subnetwork to agree with subnetwork 0 on the overlap rows.
void match_to_standard(std::vector<CommunityAssignment>& assignments, std::size_t overlap, int k, MatchingRule rule) {
  const auto& ref = assignments[0].labels;
  const std::span<const int> ref_overlap(ref.data(), overlap);
  for (std::size_t q = 1; q < assignments.size(); ++q) {
    auto& labels = assignments[q].labels;
    const PermutationMap map = match_labels(std::span<const int>(labels.data(), overlap), ref_overlap, k, rule);
    labels = map.apply(labels);
  }
}

std::vector<CommunityAssignment> as_assignments(const SplitPlan& plan, std::vector<std::vector<int>> labels, int k) {
  std::vector<CommunityAssignment> out(labels.size());
  for (std::size_t q = 0; q < labels.size(); ++q) {
    out[q].subset = plan.training(q);
    out[q].labels = std::move(labels[q]);
    out[q].k = k;
  }
  return out;
}

}  // namespace

std::vector<double> SelectionReport::mean_losses() const {
  std::vector<double> mean(candidates.size(), 0.0);
  if (repetitions.empty()) return mean;
  for (const auto& rep : repetitions) {
    for (std::size_t c = 0; c < mean.size(); ++c) mean[c] += rep.losses[c];
  }
  for (auto& v : mean) v /= static_cast<double>(repetitions.size());
  return mean;
}

void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& body) {
  std::vector<std::exception_ptr> errors(count);
  const auto workers = static_cast<std::size_t>(std::max(1, threads));
  if (workers <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) {
      try {
        body(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  } else {
    std::atomic<std::size_t> next{0};
    auto work = [&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          body(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    };
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < std::min(workers, count); ++t) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

std::vector<int> stitch_labels(const SplitPlan& plan, std::span<const CommunityAssignment> assignments) {
  std::vector<int> labels(plan.n, 0);
  const std::size_t o = plan.overlap.size();
  for (std::size_t a = 0; a < o; ++a) labels[static_cast<std::size_t>(plan.overlap[a])] = assignments[0].labels[a];
  for (std::size_t q = 0; q < plan.s(); ++q) {
    for (std::size_t a = 0; a < plan.parts[q].size(); ++a) {
      labels[static_cast<std::size_t>(plan.parts[q][a])] = assignments[q].labels[o + a];
    }
  }
  return labels;
}

std::vector<PredictedBlock> predict_rdpg(const SplitPlan& plan, std::span<const Embedding> embeddings, int d) {
  const auto o = static_cast<Eigen::Index>(plan.overlap.size());
  std::vector<PredictedBlock> out;
  for (std::size_t p = 0; p < plan.s(); ++p) {
    const auto mp = static_cast<Eigen::Index>(plan.parts[p].size());
    const auto xp = embeddings[p].coords.block(o, 0, mp, d);
    for (std::size_t q = p + 1; q < plan.s(); ++q) {
      const auto mq = static_cast<Eigen::Index>(plan.parts[q].size());
      const auto xq = embeddings[q].coords.block(o, 0, mq, d);
      out.push_back({{plan.parts[p], plan.parts[q]}, xp * xq.transpose()});
    }
  }
  return out;
}

std::vector<PredictedBlock> predict_latent(const SplitPlan& plan, std::span<const Embedding> embeddings,
                                           std::span<const double> alphas) {
  const auto o = static_cast<Eigen::Index>(plan.overlap.size());
  std::vector<PredictedBlock> out;
  for (std::size_t p = 0; p < plan.s(); ++p) {
    const auto mp = static_cast<Eigen::Index>(plan.parts[p].size());
    const Eigen::MatrixXd zp = embeddings[p].coords.middleRows(o, mp);
    for (std::size_t q = p + 1; q < plan.s(); ++q) {
      const auto mq = static_cast<Eigen::Index>(plan.parts[q].size());
      const Eigen::MatrixXd zq = embeddings[q].coords.middleRows(o, mq);
      const double alpha = 0.5 * (alphas[p] + alphas[q]);
      Eigen::MatrixXd probs(mp, mq);
      for (Eigen::Index i = 0; i < mp; ++i) {
        for (Eigen::Index j = 0; j < mq; ++j) probs(i, j) = logistic(alpha - (zp.row(i) - zq.row(j)).squaredNorm());
      }
      out.push_back({{plan.parts[p], plan.parts[q]}, std::move(probs)});
    }
  }
  return out;
}

SelectionReport select_blockmodel(const SparseSym& a, const CvConfig& config, int kmax, const EngineOptions& options) {
  if (kmax < 1) throw DomainError("K_max must be >= 1");
  std::vector<CandidateModel> candidates;
  for (int k = 1; k <= kmax; ++k) {
    candidates.push_back(CandidateModel::blockmodel(k, false));
    candidates.push_back(CandidateModel::blockmodel(k, true));
  }
  auto echo = base_config("select-blockmodel", config);
  echo.emplace_back("kmax", static_cast<std::int64_t>(kmax));
  echo.emplace_back("dcbm_estimator", std::string(options.dcbm == DcbmEstimator::Poisson ? "poisson" : "eigen"));
  clustering_config(echo, options);

  auto run = [&](const SplitPlan& plan, std::uint64_t seed, int threads, RepOutput& out, PhaseClock& clock) {
    const auto subs = training_matrices(a, plan);
    const std::size_t s = plan.s();
    for (const auto& sub : subs) {
      if (sub.rows() < kmax) throw DomainError("K_max exceeds the subnetwork size");
    }
    // sc[q][k-1], ssc[q][k-1]
    std::vector<std::vector<std::vector<int>>> sc(s), ssc(s);
    std::vector<Eigen::MatrixXd> vectors(s);
    parallel_for(s, threads, [&](std::size_t q) {
      const std::uint64_t qs = subnetwork_seed(seed, q);
      const EigenBasis basis = top_eigenpairs(subs[q], kmax, EigenOrder::Magnitude, options.clustering.eigen);
      vectors[q] = basis.vectors;
      for (int k = 1; k <= kmax; ++k) {
        Rng r0 = child_rng(qs, 2 * static_cast<std::uint64_t>(k));
        Rng r1 = child_rng(qs, 2 * static_cast<std::uint64_t>(k) + 1);
        const Eigen::MatrixXd u = basis.vectors.leftCols(k);
        sc[q].push_back(cluster_rows(u, k, r0, options.clustering));
        ssc[q].push_back(cluster_rows_spherical(u, k, r1, options.clustering));
      }
    });
    clock.lap("fit");
    for (int k = 1; k <= kmax; ++k) {
      for (int dc = 0; dc <= 1; ++dc) {
        const CandidateModel cand = CandidateModel::blockmodel(k, dc == 1);
        out.losses.push_back(guarded_loss(a, plan, cand, config.loss, out.warnings, [&] {
          std::vector<std::vector<int>> labels(s);
          for (std::size_t q = 0; q < s; ++q) labels[q] = (dc ? ssc : sc)[q][static_cast<std::size_t>(k - 1)];
          auto assignments = as_assignments(plan, std::move(labels), k);
          match_to_standard(assignments, plan.overlap.size(), k, options.matching);
          BlockmodelFit fit;
          if (!dc) {
            fit = estimate_sbm(std::span<const SparseSym>(subs), assignments, k);
          } else if (options.dcbm == DcbmEstimator::Poisson) {
            fit = estimate_dcbm_poisson(std::span<const SparseSym>(subs), assignments, k);
          } else {
            std::vector<Eigen::MatrixXd> u(s);
            for (std::size_t q = 0; q < s; ++q) u[q] = vectors[q].leftCols(k);
            fit = estimate_dcbm_eigen(std::span<const Eigen::MatrixXd>(u), std::span<const SparseSym>(subs),
                                      assignments, k);
          }
          for (auto& w : fit.warnings) out.warnings.push_back(std::move(w));
          return predict_blockmodel(plan, assignments, fit);
        }));
      }
    }
    clock.lap("evaluate");
  };
  return drive(a, config, std::move(candidates), std::move(echo), options, run);
}

SelectionReport select_rdpg_dim(const SparseSym& a, const CvConfig& config, int dmax, const EngineOptions& options) {
  if (dmax < 1) throw DomainError("d_max must be >= 1");
  std::vector<CandidateModel> candidates;
  for (int d = 1; d <= dmax; ++d) candidates.push_back(CandidateModel::rdpg(d));
  auto echo = base_config("select-rdpg", config);
  echo.emplace_back("dmax", static_cast<std::int64_t>(dmax));
  echo.emplace_back("eigen_dense_threshold", static_cast<std::int64_t>(options.clustering.eigen.dense_threshold));

  auto run = [&](const SplitPlan& plan, std::uint64_t, int threads, RepOutput& out, PhaseClock& clock) {
    const auto subs = training_matrices(a, plan);
    const std::size_t s = plan.s();
    std::vector<Embedding> emb(s);
    parallel_for(s, threads, [&](std::size_t q) {
      if (subs[q].rows() < dmax) throw DomainError("d_max exceeds the subnetwork size");
      emb[q] = ase_from_basis(top_eigenpairs(subs[q], dmax, EigenOrder::Algebraic, options.clustering.eigen), dmax);
      emb[q].subset = plan.training(q);
    });
    AlignmentResult aligned = align_embeddings(emb, plan.overlap);
    for (auto& w : aligned.warnings) out.warnings.push_back(std::move(w));
    clock.lap("fit");
    for (int d = 1; d <= dmax; ++d) {
      out.losses.push_back(guarded_loss(a, plan, CandidateModel::rdpg(d), config.loss, out.warnings,
                                        [&] { return predict_rdpg(plan, emb, d); }));
    }
    clock.lap("evaluate");
  };
  return drive(a, config, std::move(candidates), std::move(echo), options, run);
}

SelectionReport select_latent_dim(const SparseSym& a, const CvConfig& config, int dmax, const EngineOptions& options) {
  if (dmax < 1) throw DomainError("d_max must be >= 1");
  std::vector<CandidateModel> candidates;
  for (int d = 1; d <= dmax; ++d) candidates.push_back(CandidateModel::latent(d));
  auto echo = base_config("select-latent", config);
  echo.emplace_back("dmax", static_cast<std::int64_t>(dmax));
  echo.emplace_back("latent_max_iterations", static_cast<std::int64_t>(options.latent.max_iterations));
  echo.emplace_back("latent_tolerance", options.latent.tolerance);
  echo.emplace_back("latent_radius", options.latent.radius);

  auto run = [&](const SplitPlan& plan, std::uint64_t seed, int threads, RepOutput& out, PhaseClock& clock) {
    const auto subs = training_matrices(a, plan);
    const std::size_t s = plan.s();
    const auto dims = static_cast<std::size_t>(dmax);
    // Slot q * dmax + (d - 1).
    std::vector<LatentFit> fits(s * dims);
    std::vector<std::string> failures(s * dims);
    parallel_for(s * dims, threads, [&](std::size_t t) {
      const std::size_t q = t / dims;
      const int d = static_cast<int>(t % dims) + 1;
      Rng rng = child_rng(subnetwork_seed(seed, q), static_cast<std::uint64_t>(d));
      try {
        fits[t] = fit_latent(subs[q], d, rng, options.latent);
      } catch (const NumericalError& e) {
        failures[t] = e.what();
      }
    });
    clock.lap("fit");
    for (int d = 1; d <= dmax; ++d) {
      const CandidateModel cand = CandidateModel::latent(d);
      out.losses.push_back(guarded_loss(a, plan, cand, config.loss, out.warnings, [&] {
        std::vector<Embedding> emb(s);
        std::vector<double> alphas(s);
        for (std::size_t q = 0; q < s; ++q) {
          const std::size_t t = q * dims + static_cast<std::size_t>(d - 1);
          if (!failures[t].empty()) throw NumericalError(failures[t], fits[t].iterations);
          if (!fits[t].converged) {
            out.warnings.push_back(cand.name() + ": subnetwork " + std::to_string(q) + " fit stopped at " +
                                   std::to_string(fits[t].iterations) + " iterations without converging");
          }
          emb[q].subset = plan.training(q);
          emb[q].coords = fits[t].Z;
          alphas[q] = fits[t].alpha;
        }
        AlignmentResult aligned = align_latent(emb, plan.overlap);
        for (auto& w : aligned.warnings) out.warnings.push_back(std::move(w));
        return predict_latent(plan, emb, alphas);
      }));
    }
    clock.lap("evaluate");
  };
  return drive(a, config, std::move(candidates), std::move(echo), options, run);
}

RscSelection tune_rsc(const SparseSym& a, const CvConfig& config, int k, std::span<const double> taus,
                      const EngineOptions& options) {
  if (taus.empty()) throw DomainError("tau grid is empty");
  if (k < 1) throw DomainError("K must be >= 1");
  std::vector<CandidateModel> candidates;
  for (double t : taus) {
    if (!(t >= 0.0)) throw DomainError("tau values must be >= 0");
    candidates.push_back(CandidateModel::rsc(t));
  }
  auto echo = base_config("tune-rsc", config);
  echo.emplace_back("k", static_cast<std::int64_t>(k));
  echo.emplace_back("tau_grid", std::vector<double>(taus.begin(), taus.end()));
  echo.emplace_back("test_estimator", std::string("poisson"));
  clustering_config(echo, options);

  const std::size_t n_tau = taus.size();
  auto run = [&](const SplitPlan& plan, std::uint64_t seed, int threads, RepOutput& out, PhaseClock& clock) {
    const auto subs = training_matrices(a, plan);
    const std::size_t s = plan.s();
    // labels[t][q]
    std::vector<std::vector<std::vector<int>>> labels(n_tau, std::vector<std::vector<int>>(s));
    parallel_for(s, threads, [&](std::size_t q) {
      const std::uint64_t qs = subnetwork_seed(seed, q);
      for (std::size_t t = 0; t < n_tau; ++t) {
        Rng rng = child_rng(qs, t + 1);
        labels[t][q] = regularized_spectral_clustering(subs[q], k, taus[t], rng, options.clustering).labels;
      }
    });
    clock.lap("fit");
    std::vector<std::vector<CommunityAssignment>> matched(n_tau);
    for (std::size_t t = 0; t < n_tau; ++t) {
      out.losses.push_back(guarded_loss(a, plan, candidates[t], config.loss, out.warnings, [&] {
        matched[t] = as_assignments(plan, labels[t], k);
        match_to_standard(matched[t], plan.overlap.size(), k, options.matching);
        BlockmodelFit fit = estimate_dcbm_poisson(std::span<const SparseSym>(subs), matched[t], k);
        for (auto& w : fit.warnings) out.warnings.push_back(std::move(w));
        return predict_blockmodel(plan, matched[t], fit);
      }));
    }
    const std::size_t best = argmin_loss(candidates, out.losses);
    if (!matched[best].empty()) out.labels = stitch_labels(plan, matched[best]);
    clock.lap("evaluate");
  };
  std::vector<RepOutput> outputs;
  RscSelection result;
  result.report = drive(a, config, candidates, std::move(echo), options, run, &outputs);
  for (std::size_t r = 0; r < outputs.size(); ++r) {
    if (result.report.repetitions[r].winner == result.report.final_winner) {
      result.labels = outputs[r].labels;
      break;
    }
  }
  return result;
}

SelectionReport select_blockmodel(const AdjacencyMatrix& a, const CvConfig& config, int kmax,
                                  const EngineOptions& options) {
  return select_blockmodel(a.to_sparse(), config, kmax, options);
}

SelectionReport select_rdpg_dim(const AdjacencyMatrix& a, const CvConfig& config, int dmax,
                                const EngineOptions& options) {
  return select_rdpg_dim(a.to_sparse(), config, dmax, options);
}

SelectionReport select_latent_dim(const AdjacencyMatrix& a, const CvConfig& config, int dmax,
                                  const EngineOptions& options) {
  return select_latent_dim(a.to_sparse(), config, dmax, options);
}

RscSelection tune_rsc(const AdjacencyMatrix& a, const CvConfig& config, int k, std::span<const double> taus,
                      const EngineOptions& options) {
  return tune_rsc(a.to_sparse(), config, k, taus, options);
}

}  // namespace netcrop
