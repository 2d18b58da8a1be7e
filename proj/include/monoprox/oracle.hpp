#pragma once

// Brute-force reference solvers. They only use function values, forward
// evaluations and dense Eigen solves, never the engines they are meant to check.

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "monoprox/config.hpp"
#include "monoprox/convex.hpp"
#include "monoprox/errors.hpp"
#include "monoprox/linalg.hpp"
#include "monoprox/operators.hpp"

namespace monoprox {

struct OracleConfig {
  double grid_radius = 4.0;
  int grid_points_per_axis = 41;  ///< odd, at most 201
  int refine_rounds = 3;          ///< each round shrinks the radius by 10 around the incumbent
  int subgradient_iters = 200;    ///< budget of the 1-D bisections
  double tol = 1e-12;
};

/// Spacing of the finest grid.
inline double grid_resolution(const OracleConfig& cfg) {
  return 2.0 * cfg.grid_radius / (cfg.grid_points_per_axis - 1) / std::pow(10.0, cfg.refine_rounds);
}

namespace detail {

inline void check_oracle_config(const OracleConfig& cfg) {
  if (cfg.grid_points_per_axis < 3 || cfg.grid_points_per_axis > 201)
    throw InvalidParameter("OracleConfig: grid_points_per_axis must lie in [3, 201]");
  if (!(cfg.grid_radius > 0.0)) throw InvalidParameter("OracleConfig: grid_radius must be positive");
  if (cfg.refine_rounds < 0) throw InvalidParameter("OracleConfig: refine_rounds must be >= 0");
}

/// One pass over the cube grid of half-width `radius` around `origin`. Updates
/// the incumbent and keeps the `keep` lowest grid points in `pool`. Returns
/// whether the incumbent found in this pass sits on the grid boundary.
template <class Objective>
bool grid_pass(const Objective& objective, const Vector& origin, double radius, int m, Vector& best,
               double& best_value, std::vector<std::pair<double, Vector>>* pool, std::size_t keep) {
  const Index n = origin.size();
  const double h = 2.0 * radius / (m - 1);
  std::vector<int> idx(static_cast<std::size_t>(n), 0);
  bool on_boundary = false;
  Vector p(n);
  while (true) {
    for (Index i = 0; i < n; ++i) p(i) = origin(i) - radius + h * idx[static_cast<std::size_t>(i)];
    const double v = objective(p);
    if (v < best_value) {
      best_value = v;
      best = p;
      on_boundary = std::any_of(idx.begin(), idx.end(), [m](int j) { return j == 0 || j == m - 1; });
    }
    if (pool && std::isfinite(v) && (pool->size() < keep || v < pool->back().first)) {
      auto at = std::upper_bound(pool->begin(), pool->end(), v,
                                 [](double a, const std::pair<double, Vector>& b) { return a < b.first; });
      pool->insert(at, {v, p});
      if (pool->size() > keep) pool->pop_back();
    }
    Index i = 0;
    while (i < n && ++idx[static_cast<std::size_t>(i)] == m) idx[static_cast<std::size_t>(i++)] = 0;
    if (i == n) break;
  }
  return on_boundary;
}

/// Minimizes `objective` over a cube grid around `center`, then refines.
/// While the incumbent lies on the boundary of the coarse grid, the grid is
/// re-centered on it with twice the radius, so a minimizer far from `center` is
/// still bracketed. Each refinement round then shrinks the radius by 10 (and is
/// repeated around the incumbent if it lands on the boundary) until the
/// configured finest spacing is reached. The lowest few coarse points are all
/// refined, since one incumbent can sit in the wrong arm of a flat valley.
template <class Objective>
Vector grid_minimize(const Objective& objective, const Vector& center, const OracleConfig& cfg) {
  check_oracle_config(cfg);
  const Index n = center.size();
  if (n > 3) throw DimensionTooLarge("grid oracle: dimension " + std::to_string(n) + " > 3");
  const int m = cfg.grid_points_per_axis;
  constexpr int max_expansions = 60;
  constexpr int max_recenters = 50;
  constexpr std::size_t candidates = 3;

  Vector best = center;
  double best_value = objective(center);
  double radius = cfg.grid_radius;
  std::vector<std::pair<double, Vector>> pool;
  for (int r = 0;; ++r) {
    pool.clear();
    const bool edge = grid_pass(objective, Vector(best), radius, m, best, best_value, &pool, candidates);
    if (!edge || r == max_expansions) break;
    radius *= 2.0;
  }
  if (pool.empty()) pool.push_back({best_value, best});

  const double finest = cfg.grid_radius / std::pow(10.0, cfg.refine_rounds);
  Vector overall = best;
  double overall_value = best_value;
  for (const auto& cand : pool) {
    Vector b = cand.second;
    double bv = cand.first;
    double rad = radius / 10.0;
    int recenters = 0;
    while (rad >= finest * (1.0 - 1e-12)) {
      if (grid_pass(objective, Vector(b), rad, m, b, bv, nullptr, 0) && recenters < max_recenters) {
        ++recenters;
        continue;
      }
      rad /= 10.0;
    }
    if (bv < overall_value) {
      overall_value = bv;
      overall = b;
    }
  }
  return overall;
}

}  // namespace detail

namespace detail {

/// Radial retraction onto the ball for ball indicators, identity otherwise.
/// Searching over x and evaluating at retract(x) lets the grid reach points of
/// the curved boundary, which a cube grid only approaches like sqrt(spacing).
inline Vector retract_to_domain(const ConvexFunction& f, const Vector& x) {
  if (f.is_conjugate()) return x;
  const FunctionData& d = f.data();
  if (d.kind == FunctionKind::indicator_ball) {
    const Vector off = x - d.b;
    const double nrm = off.norm();
    return nrm <= d.lambda ? x : Vector(d.b + off * (d.lambda / nrm));
  }
  return x;
}

}  // namespace detail

/// Grid minimizer of f(x) + 1/2 ||L x - u||_U^2 over H (dim H <= 3), centered
/// at the least-squares solution of L x = u.
inline Vector brute_prox(const ConvexFunction& f, const LinearMap& l, const Metric& u,
                         const Vector& point, const OracleConfig& cfg = {}) {
  if (f.dim() > 3) throw DimensionTooLarge("brute_prox: dim H must be <= 3");
  require_dims(l.cols() == f.dim() && l.rows() == u.dim() && point.size() == u.dim(),
               "brute_prox: dimension mismatch");
  const Matrix& lm = l.matrix();
  const Matrix& um = u.matrix();
  // the distance term vanishes on dom f, so the minimizer is unchanged, and it
  // keeps the objective from being flat outside the ball
  auto objective = [&](const Vector& y) {
    const Vector x = detail::retract_to_domain(f, y);
    const Vector r = lm * x - point;
    return f.value(x) + 0.5 * r.dot(um * r) + 0.5 * (y - x).squaredNorm();
  };
  Vector center = lm.completeOrthogonalDecomposition().solve(point);
  if (!(objective(center) <= objective(Vector::Zero(center.size())))) center.setZero();
  return detail::retract_to_domain(f, detail::grid_minimize(objective, center, cfg));
}

/// (L |> f)(u) = inf { f(x) : L x = u } by a grid over the fiber, dim ker L <= 3.
/// +inf when u is outside ran L.
inline double brute_postcomposition_value(const ConvexFunction& f, const LinearMap& l,
                                          const Vector& point, const OracleConfig& cfg = {}) {
  const Matrix& lm = l.matrix();
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(lm);
  const Vector x0 = cod.solve(point);
  if ((lm * x0 - point).norm() > 1e-9 * std::max(1.0, point.norm()))
    return std::numeric_limits<double>::infinity();
  Eigen::FullPivLU<Matrix> lu(lm);
  const Matrix kernel = lu.kernel();
  if (lu.rank() == lm.cols()) return f.value(x0);
  const Matrix q = kernel.householderQr().householderQ() * Matrix::Identity(lm.cols(), kernel.cols());
  auto objective = [&](const Vector& z) { return f.value(x0 + q * z); };
  const Vector z = detail::grid_minimize(objective, Vector::Zero(q.cols()), cfg);
  return objective(z);
}

/// Grid prox of a 1-D or 2-D function given only by its values:
/// argmin_v phi(v) + 1/2 ||v - point||^2.
template <class Value>
Vector brute_prox_of_values(const Value& phi, const Vector& point, const OracleConfig& cfg = {}) {
  auto objective = [&](const Vector& v) { return phi(v) + 0.5 * (v - point).squaredNorm(); };
  return detail::grid_minimize(objective, point, cfg);
}

/// J_{gamma A} x by an independent route: full-pivot LU for affine A,
/// bisection on p + gamma A p = x in 1-D, grid search on ||p + gamma A p - x||
/// in 2-D. Non-affine A needs a forward oracle.
inline Vector brute_resolvent(const MonotoneOperator& a, const Vector& x, double gamma = 1.0,
                              const OracleConfig& cfg = {}) {
  require_dims(x.size() == a.dim(), "brute_resolvent: dimension mismatch");
  if (a.kind() == OperatorKind::affine) {
    const Index n = a.dim();
    const Matrix sys = Matrix::Identity(n, n) + gamma * *a.affine_matrix();
    return sys.fullPivLu().solve(x - gamma * a.affine_offset());
  }
  if (!a.has_forward() || a.dim() > 2)
    throw Unsupported("brute_resolvent: needs an affine operator or a forward oracle in dim <= 2");
  auto residual = [&](const Vector& p) -> Vector { return p + gamma * a.forward(p) - x; };
  if (a.dim() == 1) {
    // p -> p + gamma A p is strictly increasing
    double lo = x(0) - 1.0, hi = x(0) + 1.0;
    Vector p(1);
    auto h = [&](double t) {
      p(0) = t;
      return residual(p)(0);
    };
    for (int k = 0; k < 200 && h(lo) > 0.0; ++k) lo -= 2.0 * (hi - lo);
    for (int k = 0; k < 200 && h(hi) < 0.0; ++k) hi += 2.0 * (hi - lo);
    for (int k = 0; k < std::max(cfg.subgradient_iters, 200) && hi - lo > cfg.tol; ++k) {
      const double mid = 0.5 * (lo + hi);
      (h(mid) > 0.0 ? hi : lo) = mid;
    }
    return Vector::Constant(1, 0.5 * (lo + hi));
  }
  return detail::grid_minimize([&](const Vector& p) { return residual(p).norm(); }, x, cfg);
}

}  // namespace monoprox
