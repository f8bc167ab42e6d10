#include "specpart/eigensolver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>

#include "specpart/errors.hpp"

namespace specpart {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using Ldlt = Eigen::SimplicialLDLT<SparseMatrix>;

constexpr int kExtraColumns = 8;
constexpr std::size_t kDenseLimit = 300;
constexpr int kMaxShiftUpdates = 4;

// Factorizes A - sigma I; returns the number of negative pivots or -1 if
// the factorization broke down.
int factor_shifted(const SparseMatrix& A, const SparseMatrix& I, double sigma, Ldlt& ldlt) {
  const SparseMatrix S = A - sigma * I;
  ldlt.factorize(S);
  if (ldlt.info() != Eigen::Success) return -1;
  const VectorXd& d = ldlt.vectorD();
  int neg = 0;
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    if (!(d[i] > 0.0)) {
      if (d[i] == 0.0 || !std::isfinite(d[i])) return -1;
      ++neg;
    }
  }
  return neg;
}

MatrixXd orthonormalize(const MatrixXd& Y) {
  Eigen::HouseholderQR<MatrixXd> qr(Y);
  return qr.householderQ() * MatrixXd::Identity(Y.rows(), Y.cols());
}

VectorXd guess_values(const DiscreteForm& form, const Field& g) {
  if (!(g.grid() == form.grid())) throw GridMismatch("initial guess lives on a different grid");
  VectorXd x(static_cast<Eigen::Index>(form.dofs()));
  const auto vals = g.values();
  for (std::size_t d = 0; d < form.dofs(); ++d) x[static_cast<Eigen::Index>(d)] = vals[form.point_of_dof(d)];
  return x;
}

struct RawPairs {
  VectorXd lambda;
  MatrixXd vectors;  // unit Euclidean columns
  VectorXd residual;
};

RawPairs dense_solve(const DiscreteForm& form, int k) {
  const MatrixXd A = MatrixXd(form.matrix());
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(A);
  if (es.info() != Eigen::Success) throw NoConvergence(0, std::numeric_limits<double>::infinity());
  RawPairs out;
  out.lambda = es.eigenvalues().head(k);
  out.vectors = es.eigenvectors().leftCols(k);
  const MatrixXd R = form.matrix() * out.vectors - out.vectors * out.lambda.asDiagonal();
  out.residual = R.colwise().norm().transpose();
  return out;
}

RawPairs subspace_solve(const DiscreteForm& form, int k, double tol, std::span<const VectorXd> starts) {
  const SparseMatrix& A = form.matrix();
  const Eigen::Index n = A.rows();
  const Eigen::Index b = std::min<Eigen::Index>(n, k + kExtraColumns);
  const int max_iter = static_cast<int>(10.0 * std::sqrt(static_cast<double>(n))) + 1000;

  SparseMatrix I(n, n);
  I.setIdentity();
  Ldlt ldlt;
  ldlt.analyzePattern(A);

  // A - vmin I is positive definite: the Dirichlet Laplacian part is.
  double sigma = form.potential_min();
  if (factor_shifted(A, I, sigma, ldlt) != 0) {
    sigma -= 1e-8 * std::max(1.0, std::abs(sigma));
    if (factor_shifted(A, I, sigma, ldlt) != 0) throw NoConvergence(0, std::numeric_limits<double>::infinity());
  }

  MatrixXd X(n, b);
  std::mt19937_64 rng(0x5eed5eedULL);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  for (Eigen::Index j = 0; j < b; ++j) {
    if (static_cast<std::size_t>(j) < starts.size() && starts[j].norm() > 0.0) {
      X.col(j) = starts[j];
    } else if (j == 0) {
      X.col(j).setOnes();
    } else {
      for (Eigen::Index i = 0; i < n; ++i) X(i, j) = uni(rng);
    }
  }
  X = orthonormalize(X);

  RawPairs out;
  double worst = std::numeric_limits<double>::infinity();
  int shifts = 0;
  int next_shift = 3;
  for (int it = 1; it <= max_iter; ++it) {
    const MatrixXd Q = orthonormalize(ldlt.solve(X));
    const MatrixXd AQ = A * Q;
    MatrixXd H = Q.transpose() * AQ;
    H = 0.5 * (H + H.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(H);
    const VectorXd& theta = es.eigenvalues();
    X = Q * es.eigenvectors();
    const MatrixXd AX = AQ * es.eigenvectors();

    bool done = true;
    worst = 0.0;
    VectorXd res(k);
    for (int j = 0; j < k; ++j) {
      res[j] = (AX.col(j) - theta[j] * X.col(j)).norm();
      worst = std::max(worst, res[j]);
      if (res[j] > residual_target(form, theta[j], tol)) done = false;
    }
    if (done) {
      out.lambda = theta.head(k);
      out.vectors = X.leftCols(k);
      out.residual = res;
      return out;
    }

    // Move the shift toward the lowest Ritz value while A - sigma I stays
    // positive definite; this sharpens the convergence ratio.
    if (it == next_shift && shifts < kMaxShiftUpdates && theta[0] > sigma) {
      next_shift *= 2;
      double step = 0.9 * (theta[0] - sigma);
      for (int attempt = 0; attempt < 4; ++attempt, step *= 0.5) {
        Ldlt trial;
        trial.analyzePattern(A);
        if (factor_shifted(A, I, sigma + step, trial) == 0) {
          sigma += step;
          ldlt.factorize(A - sigma * I);
          ++shifts;
          break;
        }
      }
    }
  }
  throw NoConvergence(max_iter, worst);
}

RawPairs solve_raw(const DiscreteForm& form, int k, double tol, std::span<const VectorXd> starts) {
  if (k < 1) throw ValidationError("k must be at least 1");
  if (static_cast<std::size_t>(k) > form.dofs()) {
    throw ValidationError("k = " + std::to_string(k) + " exceeds the " + std::to_string(form.dofs()) +
                          " interior points");
  }
  if (form.dofs() <= kDenseLimit) return dense_solve(form, k);
  return subspace_solve(form, k, tol, starts);
}

Field to_field(const DiscreteForm& form, const VectorXd& unit) {
  return form.extend(unit / std::sqrt(form.grid().cell_volume()));
}

}  // namespace

double residual_target(const DiscreteForm& form, double lambda, double tol) {
  const double floor = 32.0 * std::numeric_limits<double>::epsilon() * form.norm_inf();
  return std::max(tol * std::max(std::abs(lambda), 1.0), floor);
}

Eigenpair smallest_eigenpair(const DiscreteForm& form, double tol, const Field* guess) {
  std::vector<VectorXd> starts;
  if (guess != nullptr) starts.push_back(guess_values(form, *guess));
  RawPairs raw = solve_raw(form, 1, tol, starts);
  // A ground state has one sign on each component of the mask.
  VectorXd v = raw.vectors.col(0).cwiseAbs();
  v.normalize();
  const double lambda = v.dot(form.matrix() * v);
  Eigenpair out;
  out.lambda = lambda;
  out.residual = (form.matrix() * v - lambda * v).norm();
  out.u = to_field(form, v);
  return out;
}

std::vector<Eigenpair> k_smallest(const DiscreteForm& form, int k, double tol, std::span<const Field> guesses) {
  std::vector<VectorXd> starts;
  for (const auto& g : guesses) starts.push_back(guess_values(form, g));
  const RawPairs raw = solve_raw(form, k, tol, starts);
  std::vector<Eigenpair> out;
  out.reserve(k);
  for (int j = 0; j < k; ++j) {
    VectorXd v = raw.vectors.col(j);
    if (v.sum() < 0.0) v = -v;
    out.push_back(Eigenpair{raw.lambda[j], to_field(form, v), raw.residual[j]});
  }
  return out;
}

int count_below(const DiscreteForm& form, double c) {
  const SparseMatrix& A = form.matrix();
  SparseMatrix I(A.rows(), A.cols());
  I.setIdentity();
  Ldlt ldlt;
  ldlt.analyzePattern(A);
  double shift = c + 1e-12 * std::max(1.0, std::abs(c));
  for (int attempt = 0; attempt < 8; ++attempt) {
    const int neg = factor_shifted(A, I, shift, ldlt);
    if (neg >= 0) return neg;
    shift += 1e-10 * std::max(1.0, std::abs(c));
  }
  throw NoConvergence(8, std::numeric_limits<double>::infinity());
}

}  // namespace specpart
