#pragma once

// Set-valued maximally monotone operators presented through resolvent
// oracles, operator inversion, and resolvents of U A for an SPD metric U.

#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "monoprox/config.hpp"
#include "monoprox/convex.hpp"
#include "monoprox/errors.hpp"
#include "monoprox/linalg.hpp"

namespace monoprox {

enum class OperatorKind { affine, subdifferential, normal_cone, inverse_of, custom };

inline const char* to_string(OperatorKind k) {
  switch (k) {
    case OperatorKind::affine: return "affine";
    case OperatorKind::subdifferential: return "subdifferential";
    case OperatorKind::normal_cone: return "normal_cone";
    case OperatorKind::inverse_of: return "inverse_of";
    case OperatorKind::custom: return "custom";
  }
  return "unknown";
}

/// A maximally monotone A : R^n -> 2^{R^n}. Maximality is asserted by the
/// constructor's caller; the resolvent oracle computes J_{gamma A}.
class MonotoneOperator {
 public:
  using Resolvent = std::function<Vector(double gamma, const Vector& x)>;
  using Forward = std::function<Vector(const Vector& x)>;

  MonotoneOperator(Index dim, OperatorKind kind, Resolvent resolvent, Forward forward = {},
                   std::string label = {})
  {
    if (dim <= 0) throw InvalidParameter("MonotoneOperator: dimension must be positive");
    auto s = std::make_shared<State>();
    s->dim = dim;
    s->kind = kind;
    s->resolvent = std::move(resolvent);
    s->forward = std::move(forward);
    s->label = label.empty() ? to_string(kind) : std::move(label);
    s_ = std::move(s);
  }

  Index dim() const { return s_->dim; }
  OperatorKind kind() const { return s_->kind; }
  const std::string& label() const { return s_->label; }

  /// J_{gamma A}(x).
  Vector resolvent(double gamma, const Vector& x) const {
    require_dims(x.size() == dim(), "resolvent: dimension mismatch for " + label());
    if (!(gamma > 0.0)) throw InvalidParameter("resolvent: gamma must be positive");
    return s_->resolvent(gamma, x);
  }

  bool has_forward() const { return static_cast<bool>(s_->forward); }
  Vector forward(const Vector& x) const {
    if (!has_forward()) throw Unsupported("forward: operator " + label() + " is not single-valued");
    require_dims(x.size() == dim(), "forward: dimension mismatch for " + label());
    return s_->forward(x);
  }

  /// A x = M x + b when kind() == affine.
  const std::optional<Matrix>& affine_matrix() const { return s_->a_mat; }
  const Vector& affine_offset() const { return s_->offset; }
  /// f when the operator is the subdifferential of a catalog function.
  const std::optional<ConvexFunction>& function() const { return s_->function; }
  /// A when this operator is A^{-1}.
  std::optional<MonotoneOperator> base() const {
    if (!s_->base) return std::nullopt;
    return MonotoneOperator(s_->base);
  }

  // construction helpers for the catalog constructors below
  MonotoneOperator with_affine(Matrix m, Vector b) const {
    MonotoneOperator out(*this);
    out.mutable_state().a_mat = std::move(m);
    out.mutable_state().offset = std::move(b);
    return out;
  }
  MonotoneOperator with_function(ConvexFunction f) const {
    MonotoneOperator out(*this);
    out.mutable_state().function = std::move(f);
    return out;
  }
  MonotoneOperator with_base(const MonotoneOperator& a) const {
    MonotoneOperator out(*this);
    out.mutable_state().base = a.s_;
    return out;
  }

 private:
  struct State {
    Index dim = 0;
    OperatorKind kind = OperatorKind::custom;
    Resolvent resolvent;
    Forward forward;
    std::string label;
    std::optional<Matrix> a_mat;
    Vector offset;
    std::optional<ConvexFunction> function;
    std::shared_ptr<const State> base;
  };

  explicit MonotoneOperator(std::shared_ptr<const State> s) : s_(std::move(s)) {}

  State& mutable_state() {
    auto copy = std::make_shared<State>(*s_);
    s_ = copy;
    return *copy;
  }

  std::shared_ptr<const State> s_;
};

// ---------------------------------------------------------------- constructors

/// x -> A x + b. Monotone iff the symmetric part of A is PSD.
inline MonotoneOperator affine_operator(const Matrix& a, const Vector& b,
                                        const ToleranceConfig& cfg = {}) {
  if (a.rows() != a.cols() || a.rows() != b.size())
    throw DimensionMismatch("affine_operator: A must be square and match b");
  const Matrix sym = 0.5 * (a + a.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(sym, Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() < -cfg.monotone_floor)
    throw NotMonotone("affine_operator: symmetric part has eigenvalue " +
                      std::to_string(eig.eigenvalues().minCoeff()));
  const Index n = a.rows();
  auto res = [a, b, n](double gamma, const Vector& x) -> Vector {
    const Matrix sys = Matrix::Identity(n, n) + gamma * a;
    return sys.partialPivLu().solve(x - gamma * b);
  };
  auto fwd = [a, b](const Vector& x) -> Vector { return a * x + b; };
  return MonotoneOperator(n, OperatorKind::affine, res, fwd).with_affine(a, b);
}

inline MonotoneOperator zero_operator(Index n) {
  return affine_operator(Matrix::Zero(n, n), Vector::Zero(n));
}

inline MonotoneOperator scaled_identity(Index n, double c) {
  return affine_operator(c * Matrix::Identity(n, n), Vector::Zero(n));
}

/// The subdifferential of a catalog function; J_{gamma df} = prox_{gamma f}.
inline MonotoneOperator subdifferential(const ConvexFunction& f) {
  const bool indicator = !f.is_conjugate() && (f.kind() == FunctionKind::indicator_box ||
                                              f.kind() == FunctionKind::indicator_ball ||
                                              f.kind() == FunctionKind::indicator_affine);
  auto res = [f](double gamma, const Vector& x) { return f.prox(gamma, x); };
  MonotoneOperator::Forward fwd;
  if (f.is_differentiable()) fwd = [f](const Vector& x) { return f.gradient(x); };
  return MonotoneOperator(f.dim(), indicator ? OperatorKind::normal_cone : OperatorKind::subdifferential,
                          res, fwd, "d(" + f.name() + ")")
      .with_function(f);
}

/// A^{-1}, with J_{gamma A^{-1}}(x) = x - gamma J_{A/gamma}(x/gamma).
inline MonotoneOperator inverse_operator(const MonotoneOperator& a) {
  auto res = [a](double gamma, const Vector& x) -> Vector {
    return x - gamma * a.resolvent(1.0 / gamma, x / gamma);
  };
  return MonotoneOperator(a.dim(), OperatorKind::inverse_of, res, {}, "(" + a.label() + ")^-1")
      .with_base(a);
}

inline MonotoneOperator custom_operator(Index dim, MonotoneOperator::Resolvent resolvent,
                                        MonotoneOperator::Forward forward = {},
                                        std::string label = "custom") {
  return MonotoneOperator(dim, OperatorKind::custom, std::move(resolvent), std::move(forward),
                          std::move(label));
}

/// (x, y) -> B x  x  C y on the product space.
inline MonotoneOperator product_operator(const MonotoneOperator& b, const MonotoneOperator& c) {
  const Index nb = b.dim(), nc = c.dim();
  if (b.affine_matrix() && c.affine_matrix()) {
    Matrix a = Matrix::Zero(nb + nc, nb + nc);
    a.topLeftCorner(nb, nb) = *b.affine_matrix();
    a.bottomRightCorner(nc, nc) = *c.affine_matrix();
    Vector off(nb + nc);
    off << b.affine_offset(), c.affine_offset();
    return affine_operator(a, off);
  }
  auto res = [b, c, nb, nc](double gamma, const Vector& x) -> Vector {
    Vector out(nb + nc);
    out << b.resolvent(gamma, x.head(nb)), c.resolvent(gamma, x.tail(nc));
    return out;
  };
  MonotoneOperator::Forward fwd;
  if (b.has_forward() && c.has_forward()) {
    fwd = [b, c, nb, nc](const Vector& x) -> Vector {
      Vector out(nb + nc);
      out << b.forward(x.head(nb)), c.forward(x.tail(nc));
      return out;
    };
  }
  return custom_operator(nb + nc, res, fwd, b.label() + " x " + c.label());
}

// ---------------------------------------------------------------- metric resolvent

/// Outcome of an iterative inclusion solve.
struct IterationReport {
  int iterations = 0;
  double residual = 0.0;
  SolveStatus status = SolveStatus::converged;
};

/// J_{UA} x by forward-backward on 0 in A p + U^{-1}(p - x) with the step
/// 2 / (lambda_min + lambda_max) of U^{-1}, a contraction.
inline Vector metric_resolvent_iterative(const MonotoneOperator& a, const Metric& u,
                                         const Vector& x, const ToleranceConfig& cfg = {},
                                         IterationReport* report = nullptr) {
  const double gamma = 2.0 / (1.0 / u.lambda_max() + 1.0 / u.mu());
  Vector p = x;
  IterationReport rep;
  for (int k = 1; k <= cfg.max_iter; ++k) {
    Vector next = a.resolvent(gamma, p - gamma * u.apply_inverse(p - x));
    rep.iterations = k;
    rep.residual = (next - p).norm();
    p = std::move(next);
    if (!p.allFinite() || p.norm() > cfg.divergence_norm) {
      rep.status = SolveStatus::not_found;
      if (report) *report = rep;
      throw NotFound("metric_resolvent: iterates diverged for " + a.label());
    }
    if (rep.residual <= cfg.tol_fix) {
      if (report) *report = rep;
      return p;
    }
  }
  rep.status = SolveStatus::diverged;
  if (report) *report = rep;
  throw InnerSolverDiverged("metric_resolvent: forward-backward did not converge for " + a.label(),
                            rep.iterations, rep.residual);
}

/// J_{UA} x. Closed form for affine A and scalar U, delegates to prox^{U^{-1}}_f
/// for subdifferentials, and iterates otherwise.
inline Vector metric_resolvent(const MonotoneOperator& a, const Metric& u, const Vector& x,
                               const ToleranceConfig& cfg = {}) {
  require_dims(a.dim() == u.dim() && x.size() == a.dim(), "metric_resolvent: dimension mismatch");
  if (a.kind() == OperatorKind::affine) {
    // (Id + U M) p = x - U b
    const Matrix sys = Matrix::Identity(a.dim(), a.dim()) + u.matrix() * *a.affine_matrix();
    return sys.partialPivLu().solve(x - u.apply(a.affine_offset()));
  }
  if (u.is_scalar()) return a.resolvent(u.scalar_value(), x);
  if (a.function()) return prox_metric(*a.function(), u.inverse(), x, cfg);
  return metric_resolvent_iterative(a, u, x, cfg);
}

}  // namespace monoprox
