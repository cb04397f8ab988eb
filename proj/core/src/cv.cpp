#include "netcrop/cv.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>
#include <utility>

#include "netcrop/errors.hpp"

namespace netcrop {

std::string to_string(LossKind loss) {
  switch (loss) {
    case LossKind::Squared: return "sq";
    case LossKind::Deviance: return "dev";
    case LossKind::NegAuc: return "auc";
  }
  return "sq";
}

LossKind parse_loss(const std::string& name) {
  if (name == "sq") return LossKind::Squared;
  if (name == "dev") return LossKind::Deviance;
  if (name == "auc") return LossKind::NegAuc;
  throw DomainError("unknown loss '" + name + "' (expected sq, dev or auc)");
}

namespace {

// Smallest integer strictly greater than x.
std::size_t next_integer_above(double x) {
  const double f = std::floor(x);
  return static_cast<std::size_t>(f) + 1;
}

std::size_t subnetwork_count(std::size_t n, std::size_t o, double p_test) {
  const double po = static_cast<double>(o) / static_cast<double>(n);
  const double q = (1.0 - po) * (1.0 - po);
  if (q <= p_test) return 0;
  return next_integer_above(q / (q - p_test));
}

}  // namespace

PlanParameters plan_parameters(std::size_t n, double p_test) {
  if (!(p_test > 0.0 && p_test < 0.5)) throw DomainError("p_test must lie in (0, 0.5)");
  if (n < 3) throw PlanningError("network too small to split; pass the overlap and subnetwork count explicitly");
  const double start = static_cast<double>(n) * (1.0 - std::sqrt(2.0 * p_test));
  std::size_t o = start < 0.0 ? 0 : next_integer_above(start);
  for (; o < n; ++o) {
    const std::size_t s = subnetwork_count(n, o, p_test);
    if (s < 2 || s > n - o) break;
    if ((n - o) % s == 0) return {o, s, (n - o) / s};
  }
  throw PlanningError("no feasible overlap size for n=" + std::to_string(n) + " and p_test=" + std::to_string(p_test) +
                      "; pass the overlap and subnetwork count explicitly");
}

void CvConfig::validate() const {
  if (s < 2) throw DomainError("need at least two subnetworks");
  if (o < 1 || o >= n) throw DomainError("overlap size must lie in [1, n)");
  if (m < 1 || o + s * m != n) throw DomainError("n must equal o + s*m exactly");
  if (repetitions < 1) throw DomainError("repetitions must be >= 1");
  if (threads < 1) throw DomainError("threads must be >= 1");
}

CvConfig CvConfig::from_test_fraction(std::size_t n, double p_test) {
  const PlanParameters p = plan_parameters(n, p_test);
  CvConfig c;
  c.n = n;
  c.o = p.o;
  c.s = p.s;
  c.m = p.m;
  c.p_test = p_test;
  return c;
}

CvConfig CvConfig::from_overlap(std::size_t n, std::size_t o, std::size_t s) {
  if (s < 2) throw DomainError("need at least two subnetworks");
  if (o >= n) throw DomainError("overlap must be smaller than n");
  if ((n - o) % s != 0) {
    throw DomainError("n - o = " + std::to_string(n - o) + " is not divisible by s = " + std::to_string(s));
  }
  CvConfig c;
  c.n = n;
  c.o = o;
  c.s = s;
  c.m = (n - o) / s;
  c.validate();
  return c;
}

double default_test_fraction(std::size_t n) noexcept { return n >= 1000 ? 0.02 : 0.1; }

NodeSubset SplitPlan::training(std::size_t q) const {
  std::vector<NodeId> idx(overlap.begin(), overlap.end());
  idx.insert(idx.end(), parts.at(q).begin(), parts.at(q).end());
  return NodeSubset(std::move(idx), n);
}

std::size_t SplitPlan::test_pair_count() const noexcept {
  std::size_t total = 0;
  for (std::size_t p = 0; p < parts.size(); ++p) {
    for (std::size_t q = p + 1; q < parts.size(); ++q) total += parts[p].size() * parts[q].size();
  }
  return total;
}

std::vector<DensePairBlock> SplitPlan::test_blocks() const {
  std::vector<DensePairBlock> blocks;
  for (std::size_t p = 0; p < parts.size(); ++p) {
    for (std::size_t q = p + 1; q < parts.size(); ++q) blocks.push_back({parts[p], parts[q]});
  }
  return blocks;
}

SplitPlan SplitPlan::from_parts(std::size_t n, NodeSubset overlap, std::vector<NodeSubset> parts) {
  std::vector<char> seen(n, 0);
  auto mark = [&](const NodeSubset& s) {
    if (s.parent_size() != n) throw DomainError("subset built for a different node count");
    for (NodeId i : s) {
      if (seen[static_cast<std::size_t>(i)]) throw DomainError("split parts overlap");
      seen[static_cast<std::size_t>(i)] = 1;
    }
  };
  mark(overlap);
  for (const auto& p : parts) mark(p);
  if (std::find(seen.begin(), seen.end(), 0) != seen.end()) throw DomainError("split does not cover every node");
  if (parts.size() < 2) throw DomainError("need at least two parts");
  SplitPlan plan;
  plan.n = n;
  plan.overlap = std::move(overlap);
  plan.parts = std::move(parts);
  return plan;
}

SplitPlan make_split(const CvConfig& config, Rng& rng) {
  config.validate();
  std::vector<NodeId> order(config.n);
  std::iota(order.begin(), order.end(), NodeId{0});
  std::shuffle(order.begin(), order.end(), rng);
  auto sorted_subset = [&](std::size_t from, std::size_t count) {
    std::vector<NodeId> idx(order.begin() + static_cast<std::ptrdiff_t>(from),
                            order.begin() + static_cast<std::ptrdiff_t>(from + count));
    std::sort(idx.begin(), idx.end());
    return NodeSubset(std::move(idx), config.n);
  };
  SplitPlan plan;
  plan.n = config.n;
  plan.overlap = sorted_subset(0, config.o);
  for (std::size_t q = 0; q < config.s; ++q) plan.parts.push_back(sorted_subset(config.o + q * config.m, config.m));
  return plan;
}

double loss_sq(double a, double p) noexcept {
  const double c = std::clamp(p, 0.0, 1.0);
  return (a - c) * (a - c);
}

double loss_dev(double a, double p) noexcept {
  const double c = std::clamp(p, kDevianceClip, 1.0 - kDevianceClip);
  return -(a * std::log(c) + (1.0 - a) * std::log1p(-c));
}

double loss_negauc(std::span<const double> labels, std::span<const double> scores) {
  if (labels.size() != scores.size()) throw DomainError("labels and scores differ in length");
  const std::size_t t = scores.size();
  std::vector<std::size_t> idx(t);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  double rank_sum = 0.0;
  std::size_t positives = 0;
  for (std::size_t a = 0; a < t;) {
    std::size_t b = a;
    while (b < t && scores[idx[b]] == scores[idx[a]]) ++b;
    const double midrank = 0.5 * static_cast<double>(a + 1 + b);
    for (std::size_t c = a; c < b; ++c) {
      if (labels[idx[c]] > 0.5) {
        rank_sum += midrank;
        ++positives;
      }
    }
    a = b;
  }
  const std::size_t negatives = t - positives;
  if (positives == 0 || negatives == 0) return -0.5;
  const double np = static_cast<double>(positives);
  const double u = rank_sum - np * (np + 1.0) / 2.0;
  return -u / (np * static_cast<double>(negatives));
}

double total_loss(const SparseSym& a, const SplitPlan& plan, std::span<const PredictedBlock> blocks, LossKind loss) {
  const auto expected = plan.test_blocks();
  if (blocks.size() != expected.size()) {
    throw ConsistencyError("expected " + std::to_string(expected.size()) + " test blocks, got " +
                           std::to_string(blocks.size()));
  }
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    if (!(blocks[b].block.rows == expected[b].rows && blocks[b].block.cols == expected[b].cols)) {
      throw ConsistencyError("test block " + std::to_string(b) + " does not match the split");
    }
    if (blocks[b].probs.rows() != static_cast<Eigen::Index>(expected[b].rows.size()) ||
        blocks[b].probs.cols() != static_cast<Eigen::Index>(expected[b].cols.size())) {
      throw ConsistencyError("test block " + std::to_string(b) + " has the wrong shape");
    }
  }
  if (loss == LossKind::NegAuc) {
    std::vector<double> labels;
    std::vector<double> scores;
    labels.reserve(plan.test_pair_count());
    scores.reserve(plan.test_pair_count());
    for (const auto& blk : blocks) {
      const Eigen::MatrixXd obs = dense_block(a, blk.block.rows, blk.block.cols);
      for (Eigen::Index i = 0; i < obs.rows(); ++i) {
        for (Eigen::Index j = 0; j < obs.cols(); ++j) {
          labels.push_back(obs(i, j));
          scores.push_back(blk.probs(i, j));
        }
      }
    }
    return loss_negauc(labels, scores);
  }
  double total = 0.0;
  for (const auto& blk : blocks) {
    const Eigen::MatrixXd obs = dense_block(a, blk.block.rows, blk.block.cols);
    for (Eigen::Index i = 0; i < obs.rows(); ++i) {
      for (Eigen::Index j = 0; j < obs.cols(); ++j) {
        total += loss == LossKind::Squared ? loss_sq(obs(i, j), blk.probs(i, j)) : loss_dev(obs(i, j), blk.probs(i, j));
      }
    }
  }
  return total;
}

std::string CandidateModel::name() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::Blockmodel: os << (degree_corrected ? "DCBM(K=" : "SBM(K=") << k << ')'; break;
    case Kind::RdpgDim: os << "RDPG(d=" << k << ')'; break;
    case Kind::LatentDim: os << "LSM(d=" << k << ')'; break;
    case Kind::RscTau: os << "RSC(tau=" << tau << ')'; break;
  }
  return os.str();
}

bool CandidateModel::simpler_than(const CandidateModel& other) const noexcept {
  if (kind != other.kind) return kind < other.kind;
  if (k != other.k) return k < other.k;
  if (degree_corrected != other.degree_corrected) return !degree_corrected;
  return tau < other.tau;
}

std::size_t argmin_loss(std::span<const CandidateModel> candidates, std::span<const double> losses) {
  if (candidates.empty() || candidates.size() != losses.size()) throw DomainError("candidate and loss lists mismatch");
  auto value = [&](std::size_t i) {
    return std::isnan(losses[i]) ? std::numeric_limits<double>::infinity() : losses[i];
  };
  std::size_t best = 0;
  for (std::size_t i = 1; i < candidates.size(); ++i) {
    const double b = value(best);
    const double v = value(i);
    const double slack = std::isfinite(b) ? 1e-12 * std::max(1.0, std::abs(b)) : 0.0;
    if (v < b - slack) {
      best = i;
    } else if (v <= b + slack && candidates[i].simpler_than(candidates[best])) {
      best = i;
    }
  }
  return best;
}

CandidateModel majority_vote(std::span<const CandidateModel> winners) {
  if (winners.empty()) throw DomainError("majority vote over an empty list");
  std::vector<std::pair<CandidateModel, std::size_t>> counts;
  for (const auto& w : winners) {
    auto it = std::find_if(counts.begin(), counts.end(), [&](const auto& c) { return c.first == w; });
    if (it == counts.end()) {
      counts.emplace_back(w, 1);
    } else {
      ++it->second;
    }
  }
  auto best = counts.begin();
  for (auto it = counts.begin() + 1; it != counts.end(); ++it) {
    if (it->second > best->second || (it->second == best->second && it->first.simpler_than(best->first))) best = it;
  }
  return best->first;
}

}  // namespace netcrop
