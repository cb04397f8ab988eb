#include "netcrop/eigensolver.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "netcrop/errors.hpp"
#include "netcrop/rng.hpp"

namespace netcrop {

namespace {

// Indices of `theta` sorted from most to least wanted.
std::vector<Eigen::Index> ranked(const Eigen::VectorXd& theta, EigenOrder order) {
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(theta.size()));
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  std::stable_sort(idx.begin(), idx.end(), [&](Eigen::Index a, Eigen::Index b) {
    if (order == EigenOrder::Algebraic) return theta(a) > theta(b);
    const double ma = std::abs(theta(a));
    const double mb = std::abs(theta(b));
    if (ma != mb) return ma > mb;
    return theta(a) > theta(b);
  });
  return idx;
}

void fix_signs(Eigen::MatrixXd& vectors) {
  for (Eigen::Index c = 0; c < vectors.cols(); ++c) {
    Eigen::Index arg = 0;
    vectors.col(c).cwiseAbs().maxCoeff(&arg);
    if (vectors(arg, c) < 0) vectors.col(c) *= -1.0;
  }
}

template <typename Matrix>
double max_residual(const Matrix& a, const EigenBasis& basis) {
  double worst = 0.0;
  for (Eigen::Index c = 0; c < basis.vectors.cols(); ++c) {
    const Eigen::VectorXd r = a * basis.vectors.col(c) - basis.values(c) * basis.vectors.col(c);
    worst = std::max(worst, r.norm() / std::max(1.0, std::abs(basis.values(c))));
  }
  return worst;
}

EigenBasis dense_solve(const Eigen::MatrixXd& a, int k, EigenOrder order) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a);
  if (solver.info() != Eigen::Success) throw SolverError("dense symmetric eigensolver failed", NAN);
  const auto idx = ranked(solver.eigenvalues(), order);
  EigenBasis out;
  out.order = order;
  out.values.resize(k);
  out.vectors.resize(a.rows(), k);
  for (int c = 0; c < k; ++c) {
    out.values(c) = solver.eigenvalues()(idx[static_cast<std::size_t>(c)]);
    out.vectors.col(c) = solver.eigenvectors().col(idx[static_cast<std::size_t>(c)]);
  }
  return out;
}

Eigen::VectorXd random_unit_orthogonal(const Eigen::MatrixXd& basis, Eigen::Index used, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd v(basis.rows());
  for (int attempt = 0; attempt < 10; ++attempt) {
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = normal(rng);
    for (int pass = 0; pass < 2; ++pass) {
      if (used > 0) v -= basis.leftCols(used) * (basis.leftCols(used).transpose() * v);
    }
    const double nv = v.norm();
    if (nv > 1e-8) return v / nv;
  }
  throw SolverError("could not extend Krylov basis", NAN);
}

// Thick-restart Lanczos with full reorthogonalization. The projected matrix H is
// accumulated from explicit projections, so after a restart the arrowhead
// coupling between kept Ritz vectors and the new direction appears on its own.
template <typename Matrix>
EigenBasis lanczos_solve(const Matrix& a, int k, EigenOrder order, const EigenOptions& options) {
  const Eigen::Index n = a.rows();
  Eigen::Index p = options.krylov_dim > 0 ? static_cast<Eigen::Index>(options.krylov_dim)
                                          : std::max<Eigen::Index>(2 * k + 20, 50);
  p = std::min<Eigen::Index>(p, n - 1);
  Rng rng(options.start_seed);

  Eigen::MatrixXd V(n, p);
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(p, p);
  Eigen::VectorXd next = random_unit_orthogonal(V, 0, rng);
  Eigen::Index kept = 0;
  double scale = 0.0;
  double last_residual = NAN;

  for (std::size_t restart = 0; restart <= options.max_restarts; ++restart) {
    Eigen::VectorXd w(n);
    double beta = 0.0;
    for (Eigen::Index j = kept; j < p; ++j) {
      V.col(j) = next;
      w = a * V.col(j);
      Eigen::VectorXd h = V.leftCols(j + 1).transpose() * w;
      w -= V.leftCols(j + 1) * h;
      const Eigen::VectorXd h2 = V.leftCols(j + 1).transpose() * w;
      w -= V.leftCols(j + 1) * h2;
      h += h2;
      H.col(j).head(j + 1) = h;
      H.row(j).head(j + 1) = h.transpose();
      scale = std::max(scale, h.cwiseAbs().maxCoeff());
      beta = w.norm();
      if (j + 1 < p) {
        if (beta <= 1e-12 * std::max(1.0, scale)) {
          next = random_unit_orthogonal(V, j + 1, rng);
        } else {
          next = w / beta;
        }
      }
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> small(H);
    const Eigen::VectorXd& theta = small.eigenvalues();
    const Eigen::MatrixXd& Y = small.eigenvectors();
    const auto idx = ranked(theta, order);

    bool converged = true;
    last_residual = 0.0;
    for (int c = 0; c < k; ++c) {
      const auto i = idx[static_cast<std::size_t>(c)];
      const double res = beta * std::abs(Y(p - 1, i)) / std::max(1.0, std::abs(theta(i)));
      last_residual = std::max(last_residual, res);
      if (res > options.tolerance) converged = false;
    }

    if (converged) {
      EigenBasis out;
      out.order = order;
      out.values.resize(k);
      Eigen::MatrixXd Yk(p, k);
      for (int c = 0; c < k; ++c) {
        out.values(c) = theta(idx[static_cast<std::size_t>(c)]);
        Yk.col(c) = Y.col(idx[static_cast<std::size_t>(c)]);
      }
      out.vectors = V * Yk;
      return out;
    }

    kept = std::min<Eigen::Index>(p - 2, k + (p - k) / 2);
    Eigen::MatrixXd Ykeep(p, kept);
    H.setZero();
    for (Eigen::Index c = 0; c < kept; ++c) {
      const auto i = idx[static_cast<std::size_t>(c)];
      Ykeep.col(c) = Y.col(i);
      H(c, c) = theta(i);
    }
    V.leftCols(kept) = (V * Ykeep).eval();
    if (beta <= 1e-12 * std::max(1.0, scale)) {
      next = random_unit_orthogonal(V, kept, rng);
    } else {
      next = w / beta;
    }
  }
  throw SolverError("Lanczos did not converge after " + std::to_string(options.max_restarts) + " restarts",
                    last_residual);
}

template <typename Matrix>
EigenBasis solve(const Matrix& a, int k, EigenOrder order, const EigenOptions& options) {
  if (a.rows() != a.cols()) throw DomainError("eigensolver needs a square matrix");
  const auto n = a.rows();
  if (k < 1 || k > n) {
    throw DomainError("requested " + std::to_string(k) + " eigenpairs of a " + std::to_string(n) +
                      "-node matrix");
  }
  const Eigen::Index krylov = options.krylov_dim > 0 ? static_cast<Eigen::Index>(options.krylov_dim)
                                                     : std::max<Eigen::Index>(2 * k + 20, 50);
  EigenBasis out;
  if (static_cast<std::size_t>(n) <= options.dense_threshold || krylov + 2 >= n) {
    out = dense_solve(Eigen::MatrixXd(a), k, order);
  } else {
    out = lanczos_solve(a, k, order, options);
  }
  fix_signs(out.vectors);
  out.max_residual = max_residual(a, out);
  return out;
}

}  // namespace

EigenBasis EigenBasis::leading(int k) const {
  if (k < 1 || k > size()) throw DomainError("cannot truncate basis of size " + std::to_string(size()) +
                                             " to " + std::to_string(k));
  EigenBasis out;
  out.order = order;
  out.values = values.head(k);
  out.vectors = vectors.leftCols(k);
  out.max_residual = max_residual;
  return out;
}

EigenBasis top_eigenpairs(const SparseSym& a, int k, EigenOrder order, const EigenOptions& options) {
  return solve(a, k, order, options);
}

EigenBasis top_eigenpairs(const Eigen::MatrixXd& a, int k, EigenOrder order, const EigenOptions& options) {
  return solve(a, k, order, options);
}

}  // namespace netcrop
