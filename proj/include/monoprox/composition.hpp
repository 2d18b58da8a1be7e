#pragma once

// Resolvents of U M* B M and of the parallel composition U (L |> A), where
// L |> A = (L A^{-1} L*)^{-1}. Every formula has several algebraic routes;
// all of them are exposed so they can be cross-checked.

#include <cmath>
#include <limits>
#include <string>

#include "monoprox/config.hpp"
#include "monoprox/errors.hpp"
#include "monoprox/linalg.hpp"
#include "monoprox/operators.hpp"

namespace monoprox {

enum class Route {
  general,       ///< only maximal monotonicity is used
  closed_range,  ///< via a Moore-Penrose inverse and a warped resolvent
  full_range,    ///< via an invertible M U M* (or L* U^{-1} L)
  automatic,     ///< full_range when the rank permits, closed_range otherwise
};

inline const char* to_string(Route r) {
  switch (r) {
    case Route::general: return "general";
    case Route::closed_range: return "closed_range";
    case Route::full_range: return "full_range";
    case Route::automatic: return "auto";
  }
  return "unknown";
}

/// Data of a composed resolvent.
///
/// For U M* B M: `op` is B on H, `map` is M : G -> H, `metric` is U on G.
/// For U (L |> A): `op` is A on H, `map` is L : H -> G, `metric` is U on G.
/// Maximal monotonicity of M* B M (resp. L A^{-1} L*) is the caller's assertion.
struct CompositionProblem {
  MonotoneOperator op;
  LinearMap map;
  Metric metric;
  Route route = Route::automatic;
};

/// Report of the inner inclusion rhs in N v + A v.
struct InnerSolveReport {
  int iterations = 0;
  double final_residual = 0.0;
  Vector v;
  SolveStatus status = SolveStatus::converged;
};

struct CompositionResult {
  Vector value;
  Route route = Route::general;
  InnerSolveReport report;
  /// Distance between the two full-range formulas when both were evaluated.
  double self_check = std::numeric_limits<double>::quiet_NaN();
};

/// Forward-backward for rhs in N v + A v, N symmetric PSD:
///   v+ = J_{gA}(v - g (N v - rhs)),  g = 0.9 / ||N||  (g = 1 when N = 0).
inline InnerSolveReport forward_backward_linear(const MonotoneOperator& a, const Matrix& n,
                                                const Vector& rhs, Vector start,
                                                const ToleranceConfig& cfg = {}) {
  require_dims(n.rows() == a.dim() && n.cols() == a.dim() && rhs.size() == a.dim() &&
                   start.size() == a.dim(),
               "forward_backward_linear: dimension mismatch");
  const double lip = operator_norm(n, cfg);
  const double gamma = lip > 0.0 ? 0.9 / lip : 1.0;
  InnerSolveReport r;
  Vector v = std::move(start);
  for (int it = 1; it <= cfg.max_iter; ++it) {
    Vector next = a.resolvent(gamma, v - gamma * (n * v - rhs));
    r.iterations = it;
    r.final_residual = (next - v).norm();
    v = std::move(next);
    if (!v.allFinite() || v.norm() > cfg.divergence_norm) {
      r.status = SolveStatus::not_found;
      r.v = v;
      return r;
    }
    if (r.final_residual <= cfg.tol_fix) {
      r.status = SolveStatus::converged;
      r.v = v;
      return r;
    }
  }
  r.status = SolveStatus::diverged;
  r.v = v;
  return r;
}

namespace detail {

inline void raise_on_failure(const InnerSolveReport& r, const std::string& where) {
  if (r.status == SolveStatus::not_found)
    throw NotFound(where + ": inner iterates diverged");
  if (r.status == SolveStatus::diverged)
    throw InnerSolverDiverged(where + ": inner solve did not converge", r.iterations,
                              r.final_residual);
}

inline void check_composed_chain(const CompositionProblem& p) {
  require_dims(p.map.rows() == p.op.dim(), "composition: M must map into the space of B");
  require_dims(p.map.cols() == p.metric.dim(), "composition: U must act on the domain of M");
}

inline void check_parallel_chain(const MonotoneOperator& a, const LinearMap& l, const Metric& u) {
  require_dims(l.cols() == a.dim(), "parallel composition: L must act on the space of A");
  require_dims(l.rows() == u.dim(), "parallel composition: U must act on the range space of L");
}

}  // namespace detail

/// v with rhs in M U M* v + B^{-1} v (M : G -> H, B on H, U on G), from v0 = 0
/// unless `start` is given. J_{gB^{-1}} comes from inverse_operator(B).
/// When v is not unique, M* v still is.
inline InnerSolveReport solve_inner_inclusion(const MonotoneOperator& b, const LinearMap& m,
                                              const Metric& u, const Vector& rhs,
                                              const ToleranceConfig& cfg = {},
                                              const Vector* start = nullptr) {
  require_dims(m.rows() == b.dim() && m.cols() == u.dim() && rhs.size() == b.dim(),
               "solve_inner_inclusion: dimension mismatch");
  const Matrix mut = u.matrix() * m.matrix().transpose();
  const Matrix n = m.matrix() * mut;
  return forward_backward_linear(inverse_operator(b), n, rhs,
                                 start ? *start : Vector::Zero(b.dim()), cfg);
}

/// J_{U M* B M} x = x - U M* v,  v in (M U M* + B^{-1})^{-1} M x.
inline CompositionResult resolvent_composed(const CompositionProblem& p, const Vector& x,
                                            const ToleranceConfig& cfg = {}) {
  detail::check_composed_chain(p);
  require_dims(x.size() == p.metric.dim(), "resolvent_composed: point dimension mismatch");
  CompositionResult out;
  out.route = Route::general;
  out.report = solve_inner_inclusion(p.op, p.map, p.metric, p.map.apply(x), cfg);
  detail::raise_on_failure(out.report, "resolvent_composed");
  out.value = x - p.metric.apply(p.map.apply_adjoint(out.report.v));
  return out;
}

/// J_{U M* B M} = Id - U M* J_{B^{-1}}^{M U M*} (sqrt(U) M*)^+ sqrt(U)^{-1}.
inline CompositionResult resolvent_composed_closed_range(const CompositionProblem& p,
                                                         const Vector& x,
                                                         const ToleranceConfig& cfg = {}) {
  detail::check_composed_chain(p);
  require_dims(x.size() == p.metric.dim(), "resolvent_composed_closed_range: dimension mismatch");
  const Matrix& mm = p.map.matrix();
  const Matrix w = p.metric.sqrt_matrix() * mm.transpose();  // sqrt(U) M*
  const Vector y = pseudoinverse(svd(w, -1.0, cfg)) * (p.metric.inv_sqrt_matrix() * x);
  const Matrix n = mm * p.metric.matrix() * mm.transpose();
  // warped resolvent of B^{-1} with kernel M U M*, evaluated at y
  CompositionResult out;
  out.route = Route::closed_range;
  out.report = forward_backward_linear(inverse_operator(p.op), n, n * y, Vector::Zero(p.op.dim()), cfg);
  detail::raise_on_failure(out.report, "resolvent_composed_closed_range");
  out.value = x - p.metric.apply(mm.transpose() * out.report.v);
  return out;
}

/// ran M = H. Returns
///   Id - U M* J_{(MUM*)^{-1} B^{-1}} (MUM*)^{-1} M
/// and records its distance to P^{U^{-1}}_{ker M} + U M* (MUM*)^{-1} J_{MUM* B} M
/// in `self_check`.
inline CompositionResult resolvent_composed_full_range(const CompositionProblem& p,
                                                       const Vector& x,
                                                       const ToleranceConfig& cfg = {}) {
  detail::check_composed_chain(p);
  require_dims(x.size() == p.metric.dim(), "resolvent_composed_full_range: dimension mismatch");
  const Matrix& mm = p.map.matrix();
  if (numerical_rank(mm, cfg) != mm.rows())
    throw RankDeficient("resolvent_composed_full_range: ran M is not the whole space");
  const Matrix n = mm * p.metric.matrix() * mm.transpose();
  const Metric n_metric = spd_sqrt(0.5 * (n + n.transpose()), cfg);
  const Vector mx = mm * x;

  CompositionResult out;
  out.route = Route::full_range;
  const Vector w = metric_resolvent(inverse_operator(p.op), n_metric.inverse(),
                                    n_metric.apply_inverse(mx), cfg);
  out.report.v = w;
  out.value = x - p.metric.apply(mm.transpose() * w);

  const Vector q = metric_resolvent(p.op, n_metric, mx, cfg);
  const Vector second = project_kernel_metric(p.map, p.metric, x, cfg) +
                        p.metric.apply(mm.transpose() * n_metric.apply_inverse(q));
  out.self_check = (out.value - second).norm();
  return out;
}

/// Dispatches on `p.route`.
inline CompositionResult resolve_composed(const CompositionProblem& p, const Vector& x,
                                          const ToleranceConfig& cfg = {}) {
  Route r = p.route;
  if (r == Route::automatic)
    r = numerical_rank(p.map.matrix(), cfg) == p.map.rows() ? Route::full_range
                                                           : Route::closed_range;
  switch (r) {
    case Route::general: return resolvent_composed(p, x, cfg);
    case Route::closed_range: return resolvent_composed_closed_range(p, x, cfg);
    case Route::full_range: return resolvent_composed_full_range(p, x, cfg);
    case Route::automatic: break;
  }
  throw InvalidParameter("resolve_composed: unknown route");
}

/// J_{U (L |> A)} x with L : H -> G, A on H, U on G.
///
///   general:      L w,  0 in A w + L* U^{-1} L w - L* U^{-1} x
///   closed_range: L J_A^{L* U^{-1} L} (sqrt(U)^{-1} L)^+ sqrt(U)^{-1} x
///   full_range:   L J_{(L* U^{-1} L)^{-1} A} (L* U^{-1} L)^{-1} L* U^{-1} x  (ran L* = H)
inline CompositionResult resolvent_parallel_composition(const MonotoneOperator& a,
                                                        const LinearMap& l, const Metric& u,
                                                        const Vector& x,
                                                        Route route = Route::automatic,
                                                        const ToleranceConfig& cfg = {}) {
  detail::check_parallel_chain(a, l, u);
  require_dims(x.size() == u.dim(), "resolvent_parallel_composition: point dimension mismatch");
  const Matrix& lm = l.matrix();
  const Matrix uil = u.inverse_matrix() * lm;
  const Matrix n = lm.transpose() * uil;  // L* U^{-1} L
  if (route == Route::automatic)
    route = numerical_rank(lm, cfg) == lm.cols() ? Route::full_range : Route::closed_range;

  CompositionResult out;
  out.route = route;
  switch (route) {
    case Route::general: {
      const Vector rhs = uil.transpose() * x;
      out.report = forward_backward_linear(a, n, rhs, Vector::Zero(a.dim()), cfg);
      detail::raise_on_failure(out.report, "resolvent_parallel_composition");
      break;
    }
    case Route::closed_range: {
      const Matrix w = u.inv_sqrt_matrix() * lm;
      const Vector y = pseudoinverse(svd(w, -1.0, cfg)) * (u.inv_sqrt_matrix() * x);
      out.report = forward_backward_linear(a, n, n * y, Vector::Zero(a.dim()), cfg);
      detail::raise_on_failure(out.report, "resolvent_parallel_composition");
      break;
    }
    case Route::full_range: {
      if (numerical_rank(lm, cfg) != lm.cols())
        throw RankDeficient("resolvent_parallel_composition: ran L* is not the whole space");
      const Metric n_metric = spd_sqrt(0.5 * (n + n.transpose()), cfg);
      const Vector z = n_metric.apply_inverse(uil.transpose() * x);
      out.report.v = metric_resolvent(a, n_metric.inverse(), z, cfg);
      break;
    }
    case Route::automatic: break;
  }
  out.value = lm * out.report.v;
  return out;
}

/// J_{B [] C} x for the parallel sum B [] C = (B^{-1} + C^{-1})^{-1}, realized as
/// L |> A with A = B x C on H (+) H and L (x, y) = x + y.
inline CompositionResult parallel_sum_resolvent(const MonotoneOperator& b, const MonotoneOperator& c,
                                                const Vector& x, const ToleranceConfig& cfg = {}) {
  require_dims(b.dim() == c.dim() && x.size() == b.dim(),
               "parallel_sum_resolvent: operators must share the dimension of x");
  const Index n = b.dim();
  Matrix sum(n, 2 * n);
  sum << Matrix::Identity(n, n), Matrix::Identity(n, n);
  return resolvent_parallel_composition(product_operator(b, c), LinearMap(sum),
                                        Metric::identity(n), x, Route::automatic, cfg);
}

}  // namespace monoprox
