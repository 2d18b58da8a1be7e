#pragma once

// Dense linear algebra substrate: linear maps, SPD metrics, SVD-based
// pseudoinverses and the metric projections onto ker M and ran(U M*).

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include <Eigen/Dense>

#include "monoprox/config.hpp"
#include "monoprox/errors.hpp"

namespace monoprox {

/// Dense real matrix viewed as a map from R^cols to R^rows.
class LinearMap {
 public:
  LinearMap() = default;
  explicit LinearMap(Matrix entries) : m_(std::move(entries)) {}

  static LinearMap identity(Index n) { return LinearMap(Matrix::Identity(n, n)); }
  static LinearMap zero(Index rows, Index cols) { return LinearMap(Matrix::Zero(rows, cols)); }

  Index rows() const { return m_.rows(); }
  Index cols() const { return m_.cols(); }
  const Matrix& matrix() const { return m_; }

  Vector apply(const Vector& x) const {
    require_dims(x.size() == cols(), "LinearMap::apply: vector of size " +
                                         std::to_string(x.size()) + " for map with " +
                                         std::to_string(cols()) + " columns");
    return m_ * x;
  }
  Vector apply_adjoint(const Vector& y) const {
    require_dims(y.size() == rows(), "LinearMap::apply_adjoint: size mismatch");
    return m_.transpose() * y;
  }
  LinearMap adjoint() const { return LinearMap(m_.transpose()); }

 private:
  Matrix m_;
};

/// Thin SVD with the numerical-rank cutoff attached.
struct SvdFactors {
  Matrix left;
  Vector singular_values;  // descending, >= 0
  Matrix right;
  double rank_cutoff = 0.0;

  Index rank() const {
    Index r = 0;
    for (Index i = 0; i < singular_values.size(); ++i)
      if (singular_values(i) > rank_cutoff) ++r;
    return r;
  }
};

inline double default_rank_cutoff(const Matrix& m, double largest_singular_value,
                                  const ToleranceConfig& cfg = {}) {
  return static_cast<double>(std::max(m.rows(), m.cols())) * largest_singular_value *
         cfg.rank_relative;
}

/// Negative `rank_cutoff` selects the default numerical-rank rule.
inline SvdFactors svd(const Matrix& m, double rank_cutoff = -1.0, const ToleranceConfig& cfg = {}) {
  Eigen::JacobiSVD<Matrix> solver(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  SvdFactors f;
  f.left = solver.matrixU();
  f.singular_values = solver.singularValues();
  f.right = solver.matrixV();
  const double smax = f.singular_values.size() > 0 ? f.singular_values(0) : 0.0;
  f.rank_cutoff = rank_cutoff >= 0.0 ? rank_cutoff : default_rank_cutoff(m, smax, cfg);
  return f;
}

inline Matrix pseudoinverse(const SvdFactors& f) {
  Vector inv = Vector::Zero(f.singular_values.size());
  for (Index i = 0; i < inv.size(); ++i)
    if (f.singular_values(i) > f.rank_cutoff) inv(i) = 1.0 / f.singular_values(i);
  return f.right * inv.asDiagonal() * f.left.transpose();
}

/// Moore-Penrose inverse. Rank deficiency is resolved by the cutoff; a
/// negative cutoff selects max(rows, cols) * smax * rank_relative.
inline LinearMap pseudoinverse(const LinearMap& m, double rank_cutoff = -1.0,
                               const ToleranceConfig& cfg = {}) {
  return LinearMap(pseudoinverse(svd(m.matrix(), rank_cutoff, cfg)));
}

inline Index numerical_rank(const Matrix& m, const ToleranceConfig& cfg = {}) {
  return svd(m, -1.0, cfg).rank();
}

/// Largest singular value by power iteration on M*M.
inline double operator_norm(const Matrix& m, const ToleranceConfig& cfg = {}) {
  if (m.size() == 0 || m.isZero(0.0)) return 0.0;
  const Matrix gram = m.transpose() * m;
  // fixed seed: the result must not depend on call order
  std::mt19937_64 rng(0x5eed);
  std::normal_distribution<double> normal;
  Vector v(gram.rows());
  for (Index i = 0; i < v.size(); ++i) v(i) = normal(rng);
  v.normalize();
  double estimate = 0.0;
  for (int it = 0; it < cfg.power_max_iter; ++it) {
    Vector w = gram * v;
    const double norm_w = w.norm();
    if (norm_w == 0.0) break;
    const double next = v.dot(w);
    v = w / norm_w;
    if (it > 0 && std::abs(next - estimate) <= cfg.power_tol * std::abs(next)) {
      estimate = next;
      break;
    }
    estimate = next;
  }
  // one more Rayleigh quotient with the final vector
  estimate = std::max(estimate, v.dot(gram * v));
  return std::sqrt(std::max(estimate, 0.0));
}

inline double operator_norm(const LinearMap& m, const ToleranceConfig& cfg = {}) {
  return operator_norm(m.matrix(), cfg);
}

/// Symmetric positive definite operator U with cached U^{-1}, sqrt(U), sqrt(U)^{-1}.
class Metric {
 public:
  Metric() = default;

  static Metric identity(Index n) { return scaled(n, 1.0); }

  static Metric scaled(Index n, double rho) {
    if (!(rho > 0.0)) throw NotPositiveDefinite("Metric::scaled: rho must be positive");
    return diagonal(Vector::Constant(n, rho));
  }

  static Metric diagonal(const Vector& d) {
    if (d.size() == 0) throw InvalidParameter("Metric::diagonal: empty diagonal");
    if (!(d.minCoeff() > 0.0) || !d.allFinite())
      throw NotPositiveDefinite("Metric::diagonal: entries must be positive");
    Metric u;
    u.u_ = d.asDiagonal();
    u.u_inv_ = d.cwiseInverse().asDiagonal();
    u.u_sqrt_ = d.cwiseSqrt().asDiagonal();
    u.u_inv_sqrt_ = d.cwiseSqrt().cwiseInverse().asDiagonal();
    u.mu_ = d.minCoeff();
    u.lambda_max_ = d.maxCoeff();
    u.diagonal_ = true;
    u.scalar_ = (d.array() == d(0)).all();
    return u;
  }

  Index dim() const { return u_.rows(); }
  const Matrix& matrix() const { return u_; }
  const Matrix& inverse_matrix() const { return u_inv_; }
  const Matrix& sqrt_matrix() const { return u_sqrt_; }
  const Matrix& inv_sqrt_matrix() const { return u_inv_sqrt_; }
  /// Smallest eigenvalue (strong monotonicity constant).
  double mu() const { return mu_; }
  double lambda_max() const { return lambda_max_; }
  bool is_diagonal() const { return diagonal_; }
  /// True when U = c Id.
  bool is_scalar() const { return scalar_; }
  double scalar_value() const { return u_(0, 0); }
  Vector diagonal_entries() const { return u_.diagonal(); }

  Vector apply(const Vector& x) const { return u_ * x; }
  Vector apply_inverse(const Vector& x) const { return u_inv_ * x; }

  double inner(const Vector& x, const Vector& y) const { return x.dot(u_ * y); }
  double norm_sq(const Vector& x) const { return x.dot(u_ * x); }

  /// The metric U^{-1}; caches are swapped, nothing is refactored.
  Metric inverse() const {
    Metric v;
    v.u_ = u_inv_;
    v.u_inv_ = u_;
    v.u_sqrt_ = u_inv_sqrt_;
    v.u_inv_sqrt_ = u_sqrt_;
    v.mu_ = 1.0 / lambda_max_;
    v.lambda_max_ = 1.0 / mu_;
    v.diagonal_ = diagonal_;
    v.scalar_ = scalar_;
    return v;
  }

 private:
  friend Metric spd_sqrt(const Matrix& u, const ToleranceConfig& cfg);

  Matrix u_, u_inv_, u_sqrt_, u_inv_sqrt_;
  double mu_ = 0.0;
  double lambda_max_ = 0.0;
  bool diagonal_ = false;
  bool scalar_ = false;
};

/// Builds a Metric from a symmetric positive definite matrix through its
/// symmetric eigendecomposition.
inline Metric spd_sqrt(const Matrix& u, const ToleranceConfig& cfg = {}) {
  if (u.rows() != u.cols() || u.rows() == 0)
    throw DimensionMismatch("spd_sqrt: metric must be a non-empty square matrix");
  const double scale = std::max(u.norm(), 1.0);
  if ((u - u.transpose()).norm() > cfg.symmetry * scale)
    throw NotSymmetric("spd_sqrt: matrix is not symmetric");

  const Matrix sym = 0.5 * (u + u.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(sym);
  if (eig.info() != Eigen::Success) throw NotPositiveDefinite("spd_sqrt: eigensolver failed");
  const Vector& lambda = eig.eigenvalues();
  if (!(lambda.minCoeff() > cfg.eigen_floor))
    throw NotPositiveDefinite("spd_sqrt: smallest eigenvalue " +
                              std::to_string(lambda.minCoeff()) + " <= floor");

  const Matrix& q = eig.eigenvectors();
  Metric m;
  m.u_ = sym;
  m.u_inv_ = q * lambda.cwiseInverse().asDiagonal() * q.transpose();
  m.u_sqrt_ = q * lambda.cwiseSqrt().asDiagonal() * q.transpose();
  m.u_inv_sqrt_ = q * lambda.cwiseSqrt().cwiseInverse().asDiagonal() * q.transpose();
  m.mu_ = lambda.minCoeff();
  m.lambda_max_ = lambda.maxCoeff();
  const bool diag = sym.isDiagonal(0.0);
  m.diagonal_ = diag;
  m.scalar_ = diag && (sym.diagonal().array() == sym(0, 0)).all();
  if (diag) {
    // keep the caches exactly diagonal
    const Vector d = sym.diagonal();
    m.u_inv_ = d.cwiseInverse().asDiagonal();
    m.u_sqrt_ = d.cwiseSqrt().asDiagonal();
    m.u_inv_sqrt_ = d.cwiseSqrt().cwiseInverse().asDiagonal();
  }
  return m;
}

/// Splitting of x along G = ker M (+) ran(U M*), orthogonal in <.,.>_{U^{-1}}.
struct MetricSplit {
  Vector kernel_part;
  Vector range_part;
};

/// M : G -> H, U a metric on G. Both parts come from one factorization of
/// sqrt(U) M*, so kernel_part + range_part reproduces x up to rounding.
inline MetricSplit split_metric(const LinearMap& m, const Metric& u, const Vector& x,
                                const ToleranceConfig& cfg = {}) {
  require_dims(u.dim() == m.cols(), "split_metric: metric dimension differs from domain of M");
  require_dims(x.size() == m.cols(), "split_metric: point dimension differs from domain of M");
  const Matrix w = u.sqrt_matrix() * m.matrix().transpose();  // sqrt(U) M*
  const Matrix w_pinv = pseudoinverse(svd(w, -1.0, cfg));
  const Vector y = w_pinv * (u.inv_sqrt_matrix() * x);
  MetricSplit s;
  s.range_part = u.matrix() * (m.matrix().transpose() * y);
  s.kernel_part = x - s.range_part;
  return s;
}

/// P^{U^{-1}}_{ker M} x = x - U M* (sqrt(U) M*)^+ sqrt(U)^{-1} x.
inline Vector project_kernel_metric(const LinearMap& m, const Metric& u, const Vector& x,
                                    const ToleranceConfig& cfg = {}) {
  return split_metric(m, u, x, cfg).kernel_part;
}

/// P^{U^{-1}}_{ran(U M*)} x = U M* (sqrt(U) M*)^+ sqrt(U)^{-1} x.
inline Vector project_range_metric(const LinearMap& m, const Metric& u, const Vector& x,
                                   const ToleranceConfig& cfg = {}) {
  return split_metric(m, u, x, cfg).range_part;
}

/// Euclidean projector onto (ker M)^perp, i.e. M^+ M.
inline Matrix kernel_complement_projector(const Matrix& m, const ToleranceConfig& cfg = {}) {
  const SvdFactors f = svd(m, -1.0, cfg);
  const Index r = f.rank();
  const Matrix v = f.right.leftCols(r);
  return v * v.transpose();
}

inline bool is_symmetric(const Matrix& a, double tol) {
  return a.rows() == a.cols() && (a - a.transpose()).norm() <= tol * std::max(a.norm(), 1.0);
}

}  // namespace monoprox
