#include "netcrop/kmeans.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "netcrop/errors.hpp"

namespace netcrop {

namespace {

enum class Objective { Squared, Absolute };

double point_cost(double sq, Objective obj) { return obj == Objective::Squared ? sq : std::sqrt(sq); }

Eigen::MatrixXd plus_plus_seeds(const Eigen::MatrixXd& x, int k, Rng& rng) {
  const Eigen::Index m = x.rows();
  Eigen::MatrixXd centers(k, x.cols());
  std::uniform_int_distribution<Eigen::Index> first(0, m - 1);
  centers.row(0) = x.row(first(rng));
  Eigen::VectorXd d2 = (x.rowwise() - centers.row(0)).rowwise().squaredNorm();
  for (int c = 1; c < k; ++c) {
    const double total = d2.sum();
    Eigen::Index pick = 0;
    if (total > 0.0) {
      double u = uniform01(rng) * total;
      pick = m - 1;
      for (Eigen::Index i = 0; i < m; ++i) {
        u -= d2(i);
        if (u < 0.0) {
          pick = i;
          break;
        }
      }
    } else {
      pick = first(rng);
    }
    centers.row(c) = x.row(pick);
    d2 = d2.cwiseMin((x.rowwise() - centers.row(c)).rowwise().squaredNorm());
  }
  return centers;
}

// Geometric median of the rows listed in `members`, warm-started at `start`.
Eigen::RowVectorXd weiszfeld(const Eigen::MatrixXd& x, const std::vector<Eigen::Index>& members,
                             Eigen::RowVectorXd start) {
  Eigen::RowVectorXd y = std::move(start);
  for (int it = 0; it < 100; ++it) {
    Eigen::RowVectorXd num = Eigen::RowVectorXd::Zero(x.cols());
    double den = 0.0;
    bool at_point = false;
    for (auto i : members) {
      const double dist = (x.row(i) - y).norm();
      if (dist < 1e-12) {
        at_point = true;
        continue;
      }
      num += x.row(i) / dist;
      den += 1.0 / dist;
    }
    // Landing exactly on a data point: stay there (a valid, if slightly
    // conservative, choice that keeps the objective from increasing).
    if (den == 0.0 || at_point) break;
    Eigen::RowVectorXd next = num / den;
    const double step = (next - y).norm();
    y = std::move(next);
    if (step < 1e-10 * std::max(1.0, y.norm())) break;
  }
  return y;
}

struct Run {
  std::vector<int> labels;
  Eigen::MatrixXd centers;
  double cost;
  std::vector<double> history;
};

Run lloyd(const Eigen::MatrixXd& x, Eigen::MatrixXd centers, Objective obj, const KMeansOptions& options) {
  const Eigen::Index m = x.rows();
  const int k = static_cast<int>(centers.rows());
  Run run{std::vector<int>(static_cast<std::size_t>(m), 0), {}, 0.0, {}};
  Eigen::VectorXd own(m);
  double previous = std::numeric_limits<double>::infinity();
  for (int it = 0; it < options.max_iterations; ++it) {
    double cost = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) {
      int best = 0;
      double best_d = (x.row(i) - centers.row(0)).squaredNorm();
      for (int c = 1; c < k; ++c) {
        const double d = (x.row(i) - centers.row(c)).squaredNorm();
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      run.labels[static_cast<std::size_t>(i)] = best;
      own(i) = best_d;
      cost += point_cost(best_d, obj);
    }
    run.history.push_back(cost);
    run.cost = cost;
    if (previous - cost <= options.tolerance * cost) break;
    previous = cost;

    std::vector<std::vector<Eigen::Index>> members(static_cast<std::size_t>(k));
    for (Eigen::Index i = 0; i < m; ++i) members[static_cast<std::size_t>(run.labels[static_cast<std::size_t>(i)])].push_back(i);
    for (int c = 0; c < k; ++c) {
      const auto& mem = members[static_cast<std::size_t>(c)];
      if (mem.empty()) continue;
      if (obj == Objective::Squared) {
        Eigen::RowVectorXd mean = Eigen::RowVectorXd::Zero(x.cols());
        for (auto i : mem) mean += x.row(i);
        centers.row(c) = mean / static_cast<double>(mem.size());
      } else {
        centers.row(c) = weiszfeld(x, mem, centers.row(c));
      }
    }
    for (int c = 0; c < k; ++c) {
      if (!members[static_cast<std::size_t>(c)].empty()) continue;
      Eigen::Index far = 0;
      own.maxCoeff(&far);
      centers.row(c) = x.row(far);
      own(far) = 0.0;
    }
  }
  run.centers = std::move(centers);
  return run;
}

KMeansResult cluster(const Eigen::MatrixXd& x, int k, Rng& rng, const KMeansOptions& options, Objective obj) {
  if (k < 1) throw DomainError("number of clusters must be >= 1");
  if (x.rows() < k) {
    throw DomainError("cannot form " + std::to_string(k) + " clusters from " + std::to_string(x.rows()) + " points");
  }
  if (options.restarts < 1 || options.max_iterations < 1) throw DomainError("restarts and iterations must be >= 1");
  KMeansResult best;
  best.cost = std::numeric_limits<double>::infinity();
  for (int r = 0; r < options.restarts; ++r) {
    Run run = lloyd(x, plus_plus_seeds(x, k, rng), obj, options);
    best.cost_history.push_back(run.history);
    if (run.cost < best.cost) {
      best.cost = run.cost;
      best.labels = std::move(run.labels);
      best.centers = std::move(run.centers);
    }
  }
  return best;
}

}  // namespace

KMeansResult kmeans(const Eigen::MatrixXd& points, int k, Rng& rng, const KMeansOptions& options) {
  return cluster(points, k, rng, options, Objective::Squared);
}

KMeansResult kmedian(const Eigen::MatrixXd& points, int k, Rng& rng, const KMeansOptions& options) {
  return cluster(points, k, rng, options, Objective::Absolute);
}

}  // namespace netcrop
