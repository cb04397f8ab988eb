#pragma once

#include <vector>

#include <Eigen/Dense>

#include "netcrop/rng.hpp"

namespace netcrop {

struct KMeansOptions {
  int restarts = 10;
  int max_iterations = 100;
  /// Stop when the cost drops by less than this fraction of itself.
  double tolerance = 1e-6;
};

struct KMeansResult {
  std::vector<int> labels;
  Eigen::MatrixXd centers;  // K x dim
  double cost = 0.0;
  /// Cost after every assignment step, one trace per restart.
  std::vector<std::vector<double>> cost_history;
};

/// Lloyd iterations from k-means++ seeds, best of `restarts`. Ties in the
/// nearest-center search go to the lower center index; an emptied cluster is
/// re-seeded at the point farthest from its current center.
KMeansResult kmeans(const Eigen::MatrixXd& points, int k, Rng& rng, const KMeansOptions& options = {});

/// Same interface, minimizing the sum of (unsquared) Euclidean distances.
/// Centers are geometric medians computed by Weiszfeld iterations.
KMeansResult kmedian(const Eigen::MatrixXd& points, int k, Rng& rng, const KMeansOptions& options = {});

}  // namespace netcrop
