#include "netcrop/latent_mle.hpp"

#include <algorithm>
#include <cmath>

#include "netcrop/eigensolver.hpp"
#include "netcrop/errors.hpp"

namespace netcrop {

namespace {

double softplus(double x) { return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

Eigen::MatrixXd eta_matrix(double alpha, const Eigen::MatrixXd& z) {
  const Eigen::VectorXd sq = z.rowwise().squaredNorm();
  Eigen::MatrixXd eta = 2.0 * (z * z.transpose());
  eta.colwise() -= sq;
  eta.rowwise() -= sq.transpose();
  eta.array() += alpha;
  return eta;
}

void project(Eigen::MatrixXd& z, double radius) {
  if (z.rows() == 0) return;
  z.rowwise() -= z.colwise().mean();
  if (radius > 0.0) {
    for (Eigen::Index i = 0; i < z.rows(); ++i) {
      const double r = z.row(i).norm();
      if (r > radius) z.row(i) *= radius / r;
    }
  }
}

// Scaled top-d embedding of the double-centered adjacency (classical scaling:
// centered A behaves like a positive multiple of Z Z^T).
Eigen::MatrixXd initial_positions(const Eigen::MatrixXd& a, int d, Rng& rng) {
  const Eigen::Index n = a.rows();
  Eigen::MatrixXd c = a;
  c.rowwise() -= c.colwise().mean();
  c.colwise() -= c.rowwise().mean();
  c = 0.5 * (c + c.transpose()).eval();
  const int k = static_cast<int>(std::min<Eigen::Index>(d, n));
  const EigenBasis basis = top_eigenpairs(c, k, EigenOrder::Algebraic);
  Eigen::MatrixXd z = Eigen::MatrixXd::Zero(n, d);
  z.leftCols(k) = basis.vectors * basis.values.cwiseMax(0.0).cwiseSqrt().asDiagonal();
  double mean_norm = z.rowwise().norm().mean();
  if (!(mean_norm > 1e-12)) {
    std::normal_distribution<double> normal(0.0, 1.0);
    for (Eigen::Index i = 0; i < z.rows(); ++i) {
      for (Eigen::Index j = 0; j < z.cols(); ++j) z(i, j) = 1e-3 * normal(rng);
    }
    mean_norm = z.rowwise().norm().mean();
  }
  z /= mean_norm;
  project(z, 0.0);
  return z;
}

}  // namespace

double latent_log_likelihood(const Eigen::MatrixXd& a, double alpha, const Eigen::MatrixXd& z) {
  const Eigen::MatrixXd eta = eta_matrix(alpha, z);
  double ll = 0.0;
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    for (Eigen::Index i = 0; i < j; ++i) ll += a(i, j) * eta(i, j) - softplus(eta(i, j));
  }
  return ll;
}

LatentGradient latent_gradient(const Eigen::MatrixXd& a, double alpha, const Eigen::MatrixXd& z) {
  Eigen::MatrixXd r = a.array() - (1.0 + (-eta_matrix(alpha, z).array()).exp()).inverse();
  r.diagonal().setZero();
  LatentGradient g;
  g.alpha = 0.5 * r.sum();
  // d eta_ij / d z_i = -2 (z_i - z_j)
  const Eigen::VectorXd row = r.rowwise().sum();
  g.Z = -2.0 * (row.asDiagonal() * z - r * z);
  return g;
}

LatentFit fit_latent(const SparseSym& sparse, int d, Rng& rng, const LatentFitOptions& options) {
  if (d < 1) throw DomainError("latent dimension must be >= 1");
  const Eigen::Index n = sparse.rows();
  if (n < 2) throw DomainError("latent fit needs at least two nodes");
  Eigen::MatrixXd a = Eigen::MatrixXd(sparse);
  a.diagonal().setZero();

  LatentFit fit;
  const double pairs = 0.5 * static_cast<double>(n) * static_cast<double>(n - 1);
  const double density = std::clamp(0.5 * a.sum() / pairs, 0.5 / pairs, 1.0 - 0.5 / pairs);
  fit.alpha = options.initial_alpha.value_or(std::log(density / (1.0 - density)));
  if (options.initial_positions) {
    if (options.initial_positions->rows() != n || options.initial_positions->cols() != d) {
      throw DomainError("initial positions have the wrong shape");
    }
    fit.Z = *options.initial_positions;
  } else {
    fit.Z = initial_positions(a, d, rng);
  }
  if (options.fit_positions) project(fit.Z, options.radius);

  double ll = latent_log_likelihood(a, fit.alpha, fit.Z);
  if (!std::isfinite(ll)) throw NumericalError("non-finite initial log-likelihood", 0);
  fit.trace.push_back(ll);
  const double base_step = options.initial_step > 0.0 ? options.initial_step : 1.0 / static_cast<double>(n);
  double step = base_step;

  for (std::size_t it = 1; it <= options.max_iterations; ++it) {
    fit.iterations = it;
    const LatentGradient g = latent_gradient(a, fit.alpha, fit.Z);
    if (!std::isfinite(g.alpha) || !g.Z.allFinite()) throw NumericalError("non-finite gradient", it);
    const double dalpha = options.fit_alpha ? g.alpha / static_cast<double>(n) : 0.0;
    const bool move_z = options.fit_positions;
    if (dalpha == 0.0 && (!move_z || g.Z.squaredNorm() == 0.0)) {
      fit.converged = true;
      break;
    }
    double trial = options.warm_start_step ? 2.0 * step : base_step;
    bool accepted = false;
    double next_alpha = fit.alpha;
    Eigen::MatrixXd next_z;
    double next_ll = ll;
    for (int halving = 0; halving < 60; ++halving, trial *= 0.5) {
      next_alpha = fit.alpha + trial * dalpha;
      next_z = fit.Z;
      if (move_z) {
        next_z += trial * g.Z;
        project(next_z, options.radius);
      }
      next_ll = latent_log_likelihood(a, next_alpha, next_z);
      if (std::isnan(next_ll)) throw NumericalError("non-finite log-likelihood", it);
      if (next_ll > ll) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      fit.converged = true;
      break;
    }
    step = trial;
    const double gain = next_ll - ll;
    fit.alpha = next_alpha;
    fit.Z = std::move(next_z);
    ll = next_ll;
    fit.trace.push_back(ll);
    if (gain <= options.tolerance * std::max(1.0, std::abs(ll))) {
      fit.converged = true;
      break;
    }
  }
  fit.log_likelihood = ll;
  return fit;
}

}  // namespace netcrop
