#pragma once

// Catalog of proper lsc convex functions with value, conjugate and prox
// oracles, and the metric proximity operator
//   prox^U_f(x) = argmin_y f(y) + 1/2 ||x - y||_U^2.

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <string>

#include "monoprox/config.hpp"
#include "monoprox/errors.hpp"
#include "monoprox/fista.hpp"
#include "monoprox/linalg.hpp"

namespace monoprox {

enum class FunctionKind {
  quadratic,
  l1,
  indicator_box,
  indicator_ball,
  indicator_affine,
  zero,
  separable_exp,
  linear,
};

inline const char* to_string(FunctionKind k) {
  switch (k) {
    case FunctionKind::quadratic: return "quadratic";
    case FunctionKind::l1: return "l1";
    case FunctionKind::indicator_box: return "indicator_box";
    case FunctionKind::indicator_ball: return "indicator_ball";
    case FunctionKind::indicator_affine: return "indicator_affine";
    case FunctionKind::zero: return "zero";
    case FunctionKind::separable_exp: return "separable_exp";
    case FunctionKind::linear: return "linear";
  }
  return "unknown";
}

/// Parameters of a catalog member. Only the fields relevant to `kind` are set.
struct FunctionData {
  FunctionKind kind = FunctionKind::zero;
  Index dim = 0;
  Matrix a;         // quadratic: A; indicator_affine: C
  Vector b;         // quadratic: b; linear: c; indicator_affine: d; ball: center
  double c = 0.0;   // quadratic: constant term
  double lambda = 0.0;  // l1 weight; ball radius
  Vector lo, hi;    // box bounds
  Index index = 0;  // separable_exp coordinate
  // derived caches
  Matrix a_pinv;    // quadratic: A^+; affine: C^+
  Vector x0;        // affine: C^+ d
  Matrix ker_proj;  // affine: projector onto ker C
};

namespace detail {

constexpr double kInf = std::numeric_limits<double>::infinity();

inline double soft(double v, double t) {
  return v > t ? v - t : (v < -t ? v + t : 0.0);
}

/// Root of p + gamma * exp(p) = x (strictly increasing and convex in p).
/// Newton from the right of the root is monotone; bisection guards the bracket.
inline double exp_prox_scalar(double gamma, double x) {
  double hi = x;
  if (x > 0.0) hi = std::min(x, std::max(0.0, std::log(x / gamma)));
  double lo = x - gamma * std::exp(hi);
  auto h = [&](double p) { return p + gamma * std::exp(p) - x; };
  double p = hi;
  for (int it = 0; it < 200; ++it) {
    const double hp = h(p);
    if (hp == 0.0) return p;
    if (hp > 0.0) hi = p; else lo = p;
    double next = p - hp / (1.0 + gamma * std::exp(p));
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - p) <= 1e-16 * std::max(1.0, std::abs(p))) return next;
    p = next;
  }
  return p;
}

inline double exp_conjugate(double v) {
  if (v > 0.0) return v * (std::log(v) - 1.0);
  if (v == 0.0) return 0.0;
  return kInf;
}

inline double set_tol(double scale) { return 1e-9 * std::max(1.0, scale); }

}  // namespace detail

/// Handle on a catalog function or on its conjugate. Copies share parameters.
class ConvexFunction {
 public:
  explicit ConvexFunction(FunctionData data)
      : data_(std::make_shared<const FunctionData>(std::move(data))) {}

  Index dim() const { return data_->dim; }
  FunctionKind kind() const { return data_->kind; }
  bool is_conjugate() const { return conjugate_; }
  const FunctionData& data() const { return *data_; }

  std::string name() const {
    return conjugate_ ? std::string(to_string(kind())) + "*" : to_string(kind());
  }

  /// Fenchel conjugate. conjugate().conjugate() is this function again.
  ConvexFunction conjugate() const {
    ConvexFunction g(*this);
    g.conjugate_ = !conjugate_;
    return g;
  }

  double value(const Vector& x) const {
    require_dims(x.size() == dim(), "ConvexFunction::value: dimension mismatch");
    return conjugate_ ? dual_value(x) : primal_value(x);
  }

  /// prox_{gamma f}(x).
  Vector prox(double gamma, const Vector& x) const {
    require_dims(x.size() == dim(), "ConvexFunction::prox: dimension mismatch");
    if (!(gamma > 0.0)) throw InvalidParameter("prox: gamma must be positive");
    return conjugate_ ? dual_prox(gamma, x) : primal_prox(gamma, x);
  }

  bool is_separable() const {
    switch (kind()) {
      case FunctionKind::l1:
      case FunctionKind::indicator_box:
      case FunctionKind::zero:
      case FunctionKind::linear:
      case FunctionKind::separable_exp: return true;
      default: return false;
    }
  }

  /// Componentwise prox with one step per coordinate; separable kinds only.
  Vector prox_separable(const Vector& gammas, const Vector& x) const {
    if (!is_separable()) throw Unsupported("prox_separable: " + name() + " is not separable");
    require_dims(x.size() == dim() && gammas.size() == dim(), "prox_separable: dimension mismatch");
    Vector out(x.size());
    if (!conjugate_) {
      for (Index i = 0; i < x.size(); ++i) out(i) = primal_prox_coord(i, gammas(i), x(i));
    } else {
      // prox_{g f*}(x) = x - g prox_{f/g}(x/g), coordinate by coordinate
      for (Index i = 0; i < x.size(); ++i)
        out(i) = x(i) - gammas(i) * primal_prox_coord(i, 1.0 / gammas(i), x(i) / gammas(i));
    }
    return out;
  }

  bool is_differentiable() const {
    if (conjugate_) return false;
    switch (kind()) {
      case FunctionKind::quadratic:
      case FunctionKind::zero:
      case FunctionKind::linear:
      case FunctionKind::separable_exp: return true;
      default: return false;
    }
  }

  Vector gradient(const Vector& x) const {
    if (!is_differentiable()) throw Unsupported("gradient: " + name() + " is not differentiable");
    const FunctionData& d = *data_;
    switch (kind()) {
      case FunctionKind::quadratic: return d.a * x - d.b;
      case FunctionKind::zero: return Vector::Zero(dim());
      case FunctionKind::linear: return d.b;
      case FunctionKind::separable_exp: {
        Vector g = Vector::Zero(dim());
        g(d.index) = std::exp(x(d.index));
        return g;
      }
      default: break;
    }
    throw Unsupported("gradient");
  }

 private:
  double primal_value(const Vector& x) const {
    const FunctionData& d = *data_;
    switch (d.kind) {
      case FunctionKind::quadratic: return 0.5 * x.dot(d.a * x) - d.b.dot(x) + d.c;
      case FunctionKind::l1: return d.lambda * x.lpNorm<1>();
      case FunctionKind::indicator_box:
        for (Index i = 0; i < x.size(); ++i)
          if (!(x(i) >= d.lo(i) && x(i) <= d.hi(i))) return detail::kInf;
        return 0.0;
      case FunctionKind::indicator_ball:
        return (x - d.b).norm() <= d.lambda + detail::set_tol(d.lambda) ? 0.0 : detail::kInf;
      case FunctionKind::indicator_affine:
        return (d.a * x - d.b).norm() <= detail::set_tol(d.b.norm()) ? 0.0 : detail::kInf;
      case FunctionKind::zero: return 0.0;
      case FunctionKind::separable_exp: return std::exp(x(d.index));
      case FunctionKind::linear: return d.b.dot(x);
    }
    return detail::kInf;
  }

  double dual_value(const Vector& y) const {
    const FunctionData& d = *data_;
    switch (d.kind) {
      case FunctionKind::quadratic: {
        const Vector z = y + d.b;
        const Vector w = d.a_pinv * z;
        if ((d.a * w - z).norm() > detail::set_tol(z.norm())) return detail::kInf;
        return 0.5 * z.dot(w) - d.c;
      }
      case FunctionKind::l1:
        return y.lpNorm<Eigen::Infinity>() <= d.lambda * (1.0 + 1e-12) + 1e-15 ? 0.0 : detail::kInf;
      case FunctionKind::indicator_box: {
        // rounding residue from the Moreau-based prox counts as zero
        const double tiny = 1e-12 * std::max(1.0, y.lpNorm<Eigen::Infinity>());
        double s = 0.0;
        for (Index i = 0; i < y.size(); ++i) {
          if (y(i) > tiny) s += std::isinf(d.hi(i)) ? detail::kInf : d.hi(i) * y(i);
          else if (y(i) < -tiny) s += std::isinf(d.lo(i)) ? detail::kInf : d.lo(i) * y(i);
        }
        return s;
      }
      case FunctionKind::indicator_ball: return d.b.dot(y) + d.lambda * y.norm();
      case FunctionKind::indicator_affine:
        if ((d.ker_proj * y).norm() > detail::set_tol(y.norm())) return detail::kInf;
        return d.x0.dot(y);
      case FunctionKind::zero: return y.norm() <= 1e-12 ? 0.0 : detail::kInf;
      case FunctionKind::separable_exp: {
        for (Index i = 0; i < y.size(); ++i)
          if (i != d.index && std::abs(y(i)) > 1e-12) return detail::kInf;
        return detail::exp_conjugate(y(d.index));
      }
      case FunctionKind::linear:
        return (y - d.b).norm() <= detail::set_tol(d.b.norm()) * 1e-3 ? 0.0 : detail::kInf;
    }
    return detail::kInf;
  }

  double primal_prox_coord(Index i, double gamma, double v) const {
    const FunctionData& d = *data_;
    switch (d.kind) {
      case FunctionKind::l1: return detail::soft(v, gamma * d.lambda);
      case FunctionKind::indicator_box: return std::clamp(v, d.lo(i), d.hi(i));
      case FunctionKind::zero: return v;
      case FunctionKind::linear: return v - gamma * d.b(i);
      case FunctionKind::separable_exp: return i == d.index ? detail::exp_prox_scalar(gamma, v) : v;
      default: break;
    }
    throw Unsupported("primal_prox_coord");
  }

  Vector primal_prox(double gamma, const Vector& x) const {
    const FunctionData& d = *data_;
    switch (d.kind) {
      case FunctionKind::quadratic: {
        const Matrix sys = Matrix::Identity(dim(), dim()) + gamma * d.a;
        return sys.ldlt().solve(x + gamma * d.b);
      }
      case FunctionKind::indicator_ball: {
        const Vector r = x - d.b;
        const double n = r.norm();
        return n <= d.lambda ? x : Vector(d.b + (d.lambda / n) * r);
      }
      case FunctionKind::indicator_affine: return x - d.a_pinv * (d.a * x - d.b);
      default: {
        Vector out(x.size());
        for (Index i = 0; i < x.size(); ++i) out(i) = primal_prox_coord(i, gamma, x(i));
        return out;
      }
    }
  }

  Vector dual_prox(double gamma, const Vector& y) const {
    const FunctionData& d = *data_;
    switch (d.kind) {
      case FunctionKind::quadratic: {
        const Matrix sys = d.a + gamma * Matrix::Identity(dim(), dim());
        return sys.ldlt().solve(d.a * y - gamma * d.b);
      }
      case FunctionKind::l1:
        return y.cwiseMax(-d.lambda).cwiseMin(d.lambda);
      case FunctionKind::zero: return Vector::Zero(dim());
      case FunctionKind::linear: return d.b;
      default:
        // Moreau: prox_{g f*}(y) = y - g prox_{f/g}(y/g)
        return y - gamma * primal_prox(1.0 / gamma, y / gamma);
    }
  }

  std::shared_ptr<const FunctionData> data_;
  bool conjugate_ = false;
};

// ---------------------------------------------------------------- catalog

/// f(x) = 1/2 x'Ax - b'x + c with A symmetric PSD.
inline ConvexFunction quadratic(const Matrix& a, const Vector& b, double c = 0.0,
                                const ToleranceConfig& cfg = {}) {
  if (a.rows() != a.cols() || a.rows() != b.size())
    throw DimensionMismatch("quadratic: A must be square and match b");
  if (!is_symmetric(a, 1e-10)) throw InvalidParameter("quadratic: A must be symmetric");
  const Matrix sym = 0.5 * (a + a.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(sym, Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() < -cfg.monotone_floor * std::max(1.0, sym.norm()))
    throw InvalidParameter("quadratic: A must be positive semidefinite");
  FunctionData d;
  d.kind = FunctionKind::quadratic;
  d.dim = a.rows();
  d.a = sym;
  d.b = b;
  d.c = c;
  d.a_pinv = pseudoinverse(svd(sym, -1.0, cfg));
  return ConvexFunction(std::move(d));
}

/// 1/2 ||x - b||^2 as a quadratic.
inline ConvexFunction squared_distance(const Vector& b) {
  return quadratic(Matrix::Identity(b.size(), b.size()), b, 0.5 * b.squaredNorm());
}

inline ConvexFunction l1(Index dim, double lambda) {
  if (dim <= 0) throw InvalidParameter("l1: dimension must be positive");
  if (!(lambda >= 0.0)) throw InvalidParameter("l1: lambda must be nonnegative");
  FunctionData d;
  d.kind = FunctionKind::l1;
  d.dim = dim;
  d.lambda = lambda;
  return ConvexFunction(std::move(d));
}

inline ConvexFunction indicator_box(const Vector& lo, const Vector& hi) {
  if (lo.size() != hi.size() || lo.size() == 0)
    throw DimensionMismatch("indicator_box: bounds must have equal positive size");
  for (Index i = 0; i < lo.size(); ++i)
    if (!(lo(i) <= hi(i)) || std::isnan(lo(i)) || std::isnan(hi(i)))
      throw InvalidParameter("indicator_box: lo must be <= hi componentwise");
  FunctionData d;
  d.kind = FunctionKind::indicator_box;
  d.dim = lo.size();
  d.lo = lo;
  d.hi = hi;
  return ConvexFunction(std::move(d));
}

inline ConvexFunction indicator_ball(const Vector& center, double radius) {
  if (center.size() == 0) throw InvalidParameter("indicator_ball: empty center");
  if (!(radius > 0.0)) throw InvalidParameter("indicator_ball: radius must be positive");
  FunctionData d;
  d.kind = FunctionKind::indicator_ball;
  d.dim = center.size();
  d.b = center;
  d.lambda = radius;
  return ConvexFunction(std::move(d));
}

/// Indicator of {x : C x = d}; the set must be nonempty.
inline ConvexFunction indicator_affine(const Matrix& c_map, const Vector& rhs,
                                       const ToleranceConfig& cfg = {}) {
  if (c_map.rows() != rhs.size() || c_map.cols() == 0)
    throw DimensionMismatch("indicator_affine: C rows must match d");
  FunctionData d;
  d.kind = FunctionKind::indicator_affine;
  d.dim = c_map.cols();
  d.a = c_map;
  d.b = rhs;
  d.a_pinv = pseudoinverse(svd(c_map, -1.0, cfg));
  d.x0 = d.a_pinv * rhs;
  if ((c_map * d.x0 - rhs).norm() > detail::set_tol(rhs.norm()))
    throw InvalidParameter("indicator_affine: C x = d has no solution");
  d.ker_proj = Matrix::Identity(d.dim, d.dim) - d.a_pinv * c_map;
  return ConvexFunction(std::move(d));
}

inline ConvexFunction zero(Index dim) {
  if (dim <= 0) throw InvalidParameter("zero: dimension must be positive");
  FunctionData d;
  d.kind = FunctionKind::zero;
  d.dim = dim;
  return ConvexFunction(std::move(d));
}

/// f(x) = exp(x_index); the other coordinates are free.
inline ConvexFunction separable_exp(Index dim, Index index) {
  if (dim <= 0 || index < 0 || index >= dim)
    throw InvalidParameter("separable_exp: index out of range");
  FunctionData d;
  d.kind = FunctionKind::separable_exp;
  d.dim = dim;
  d.index = index;
  return ConvexFunction(std::move(d));
}

inline ConvexFunction linear(const Vector& c) {
  if (c.size() == 0) throw InvalidParameter("linear: empty coefficient vector");
  FunctionData d;
  d.kind = FunctionKind::linear;
  d.dim = c.size();
  d.b = c;
  return ConvexFunction(std::move(d));
}

// ---------------------------------------------------------------- metric prox

/// prox^U_f(x): exact for scalar U, for diagonal U with separable f, and for
/// quadratics and affine indicators; FISTA on the strongly convex objective
/// otherwise.
inline Vector prox_metric(const ConvexFunction& f, const Metric& u, const Vector& x,
                          const ToleranceConfig& cfg = {}) {
  require_dims(f.dim() == u.dim() && x.size() == u.dim(), "prox_metric: dimension mismatch");
  if (u.is_scalar()) return f.prox(1.0 / u.scalar_value(), x);
  if (u.is_diagonal() && f.is_separable())
    return f.prox_separable(u.diagonal_entries().cwiseInverse(), x);

  const FunctionData& d = f.data();
  if (!f.is_conjugate() && f.kind() == FunctionKind::quadratic) {
    // (A + U) y = U x + b
    return (d.a + u.matrix()).ldlt().solve(u.apply(x) + d.b);
  }
  if (!f.is_conjugate() && f.kind() == FunctionKind::indicator_affine) {
    const Matrix cui = d.a * u.inverse_matrix();
    const Matrix gram = cui * d.a.transpose();
    const Vector lambda = pseudoinverse(svd(gram, -1.0, cfg)) * (d.a * x - d.b);
    return x - u.inverse_matrix() * (d.a.transpose() * lambda);
  }

  SmoothPart smooth;
  smooth.value = [&](const Vector& y) { return 0.5 * u.norm_sq(y - x); };
  smooth.gradient = [&](const Vector& y) { return u.apply(y - x); };
  smooth.lipschitz = u.lambda_max();
  auto prox = [&](double step, const Vector& z) { return f.prox(step, z); };
  auto value = [&](const Vector& z) { return f.value(z); };
  FistaResult r = fista(smooth, prox, value, x, cfg);
  if (r.status != SolveStatus::converged)
    throw InnerSolverDiverged("prox_metric: FISTA did not converge for " + f.name(), r.iterations,
                              r.residual);
  return r.x;
}

/// prox^{U^{-1}}_{f*}(x) = U (x' - prox^U_f x') with x' = U^{-1} x.
inline Vector conjugate_prox_metric(const ConvexFunction& f, const Metric& u, const Vector& x,
                                    const ToleranceConfig& cfg = {}) {
  require_dims(f.dim() == u.dim() && x.size() == u.dim(),
               "conjugate_prox_metric: dimension mismatch");
  const Vector xp = u.apply_inverse(x);
  return u.apply(xp - prox_metric(f, u, xp, cfg));
}

}  // namespace monoprox
