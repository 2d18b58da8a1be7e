#pragma once

// Warped resolvents J_A^K = (K + A)^{-1} K and sampling diagnostics for
// their domain and single-valuedness.

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "monoprox/config.hpp"
#include "monoprox/errors.hpp"
#include "monoprox/linalg.hpp"
#include "monoprox/operators.hpp"

namespace monoprox {

/// The kernel K of a warped resolvent.
struct WarpedKernel {
  Index dim = 0;
  std::function<Vector(const Vector&)> map;
  bool is_linear = false;
  std::optional<Matrix> linear_form;
  double lipschitz = 0.0;  ///< Lipschitz constant of map, used for the step size

  Vector apply(const Vector& x) const {
    require_dims(x.size() == dim, "WarpedKernel::apply: dimension mismatch");
    return map(x);
  }
};

inline WarpedKernel linear_kernel(const Matrix& k) {
  if (k.rows() != k.cols() || k.rows() == 0)
    throw DimensionMismatch("linear_kernel: K must be square");
  WarpedKernel w;
  w.dim = k.rows();
  w.map = [k](const Vector& x) -> Vector { return k * x; };
  w.is_linear = true;
  w.linear_form = k;
  w.lipschitz = operator_norm(k);
  return w;
}

/// Componentwise median med{-1, x, 1}, the projection onto [-1, 1]^n.
inline WarpedKernel median_kernel(Index dim = 1) {
  WarpedKernel w;
  w.dim = dim;
  w.map = [](const Vector& x) -> Vector { return x.cwiseMax(-1.0).cwiseMin(1.0); };
  w.lipschitz = 1.0;
  return w;
}

/// alpha * med{-1, ., 1} as a maximally monotone operator on R^dim.
inline MonotoneOperator scaled_median_operator(double alpha, Index dim = 1) {
  if (!(alpha > 0.0)) throw InvalidParameter("scaled_median_operator: alpha must be positive");
  // p + g a med(p) = x: linear branch while |x| <= 1 + g a, shifted branch outside
  auto scalar = [alpha](double gamma, double x) {
    const double s = gamma * alpha;
    if (std::abs(x) <= 1.0 + s) return x / (1.0 + s);
    return x > 0.0 ? x - s : x + s;
  };
  auto res = [scalar](double gamma, const Vector& x) -> Vector {
    Vector p(x.size());
    for (Index i = 0; i < x.size(); ++i) p(i) = scalar(gamma, x(i));
    return p;
  };
  auto fwd = [alpha](const Vector& x) -> Vector {
    return alpha * x.cwiseMax(-1.0).cwiseMin(1.0);
  };
  return custom_operator(dim, res, fwd, "alpha*med");
}

struct WarpedResult {
  Vector value;
  int iterations = 0;
  double residual = 0.0;  ///< ||K x - K p - a|| for the a in A p produced by the last step
  SolveStatus status = SolveStatus::converged;
};

/// Forward-backward for target in (K + A) p:
///   p+ = J_{gA}(p - g (K p - target)),  g = 0.9 / Lip(K).
/// Never throws on failure; the status tells what happened.
inline WarpedResult solve_warped_inclusion(const MonotoneOperator& a, const WarpedKernel& k,
                                           const Vector& target, Vector start,
                                           const ToleranceConfig& cfg = {}) {
  const double gamma = k.lipschitz > 0.0 ? 0.9 / k.lipschitz : 1.0;
  WarpedResult r;
  Vector p = std::move(start);
  Vector kp = k.apply(p);
  // escape test per window: the iterates travel in a straight line without
  // the step shrinking, so they leave every bounded set
  Vector window_origin = p;
  double window_path = 0.0, window_first_step = -1.0;
  for (int it = 1; it <= cfg.max_iter; ++it) {
    Vector next = a.resolvent(gamma, p - gamma * (kp - target));
    Vector k_next = k.apply(next);
    r.iterations = it;
    const double step = (next - p).norm();
    window_path += step;
    if (window_first_step < 0.0) window_first_step = step;
    if (it % cfg.stagnation_window == 0) {
      const double travelled = (next - window_origin).norm();
      if (step > cfg.tol_fix * 100.0 && step >= 0.5 * window_first_step &&
          travelled >= 0.99 * window_path) {
        r.value = next;
        r.status = SolveStatus::not_found;
        return r;
      }
      window_origin = next;
      window_path = 0.0;
      window_first_step = -1.0;
    }
    // a = (p - next)/g - (K p - target) lies in A(next)
    r.residual = ((kp - k_next) - (p - next) / gamma).norm();
    p = std::move(next);
    kp = std::move(k_next);
    if (!p.allFinite() || p.norm() > cfg.divergence_norm) {
      r.value = p;
      r.status = SolveStatus::not_found;
      return r;
    }
    if (step <= cfg.tol_fix) {
      r.value = p;
      r.status = SolveStatus::converged;
      return r;
    }
  }
  r.value = p;
  r.status = SolveStatus::diverged;
  return r;
}

/// One value of J_A^K x.
///
/// Linear K with affine A is a dense solve; SPD K goes through the metric
/// resolvent J_{K^{-1} A}; anything else iterates on K x in (K + A) p.
/// Throws NotFound when x lies outside the domain and InnerSolverDiverged when
/// the iteration stalls.
inline WarpedResult warped_resolvent(const MonotoneOperator& a, const WarpedKernel& k,
                                     const Vector& x, const ToleranceConfig& cfg = {}) {
  require_dims(a.dim() == k.dim && x.size() == k.dim, "warped_resolvent: dimension mismatch");
  bool invertible = false;
  if (k.is_linear) invertible = numerical_rank(*k.linear_form, cfg) == k.dim;
  if (!a.has_forward() && !invertible)
    throw Unsupported("warped_resolvent: needs a single-valued A or an invertible linear K");

  const Vector kx = k.apply(x);
  if (k.is_linear && a.kind() == OperatorKind::affine) {
    const Matrix sys = *k.linear_form + *a.affine_matrix();
    const Vector rhs = kx - a.affine_offset();
    Eigen::CompleteOrthogonalDecomposition<Matrix> cod(sys);
    WarpedResult r;
    r.value = cod.solve(rhs);
    r.residual = (sys * r.value - rhs).norm();
    if (r.residual > 1e-8 * std::max(1.0, rhs.norm()))
      throw NotFound("warped_resolvent: K x is outside ran(K + A)");
    return r;
  }
  if (invertible && is_symmetric(*k.linear_form, cfg.symmetry)) {
    std::optional<Metric> km;
    try {
      km = spd_sqrt(*k.linear_form, cfg);
    } catch (const NotPositiveDefinite&) {
    }
    if (km) {
      WarpedResult r;
      r.value = metric_resolvent(a, km->inverse(), x, cfg);
      if (a.has_forward()) r.residual = (kx - k.apply(r.value) - a.forward(r.value)).norm();
      return r;
    }
  }

  WarpedResult r = solve_warped_inclusion(a, k, kx, x, cfg);
  if (r.status == SolveStatus::not_found)
    throw NotFound("warped_resolvent: iterates diverged, x is outside dom J_A^K");
  if (r.status == SolveStatus::diverged)
    throw InnerSolverDiverged("warped_resolvent: iteration stalled", r.iterations, r.residual);
  return r;
}

/// Two distinct points whose (K + A)-images contain the same point K z.
struct WarpedWitness {
  Vector x, y, z;
};

/// Two distinct points with equal (K + A)-images.
struct InjectivityWitness {
  Vector x, y, image;
};

struct WarpedDiagnostics {
  int sampled_domain_hits = 0;
  /// Violations of injectivity on ran K: J_A^K z is not single-valued.
  std::vector<WarpedWitness> injectivity_violations;
  /// Violations of injectivity on the whole space, found by comparing images
  /// of every probed point. These do not affect J_A^K when the common image
  /// lies outside ran K.
  std::vector<InjectivityWitness> global_injectivity_violations;
};

/// Sampling certificate for dom J_A^K and single-valuedness. For every sample
/// z the inclusion K z in (K + A) p is solved from each start (z and 0 when
/// `starts` is empty). Absence of witnesses proves nothing.
inline WarpedDiagnostics warped_diagnostics(const MonotoneOperator& a, const WarpedKernel& k,
                                            const std::vector<Vector>& samples,
                                            const std::vector<Vector>& starts = {},
                                            const ToleranceConfig& cfg = {}) {
  if (!a.has_forward()) throw Unsupported("warped_diagnostics: A must be single-valued");
  auto image = [&](const Vector& p) -> Vector { return k.apply(p) + a.forward(p); };
  auto distinct = [&](const Vector& p, const Vector& q) {
    return (p - q).norm() > cfg.witness_separation;
  };

  WarpedDiagnostics d;
  std::vector<Vector> probed;
  auto remember = [&](const Vector& p) {
    for (const Vector& q : probed)
      if (!distinct(p, q)) return;
    probed.push_back(p);
  };

  for (const Vector& z : samples) {
    require_dims(z.size() == k.dim, "warped_diagnostics: sample dimension mismatch");
    remember(z);
    const Vector target = k.apply(z);
    std::vector<Vector> local_starts = starts;
    if (local_starts.empty()) local_starts = {z, Vector::Zero(k.dim)};

    std::vector<Vector> solutions;
    for (const Vector& s : local_starts) {
      remember(s);
      const WarpedResult r = solve_warped_inclusion(a, k, target, s, cfg);
      if (r.status != SolveStatus::converged) continue;
      if ((image(r.value) - target).norm() > cfg.witness_image * 100.0) continue;
      remember(r.value);
      bool fresh = true;
      for (const Vector& q : solutions) {
        if (!distinct(r.value, q)) {
          fresh = false;
          continue;
        }
        d.injectivity_violations.push_back({q, r.value, z});
      }
      if (fresh) solutions.push_back(r.value);
    }
    if (!solutions.empty()) ++d.sampled_domain_hits;
  }

  std::vector<Vector> images;
  images.reserve(probed.size());
  for (const Vector& p : probed) images.push_back(image(p));
  for (std::size_t i = 0; i < probed.size(); ++i)
    for (std::size_t j = i + 1; j < probed.size(); ++j)
      if ((images[i] - images[j]).norm() <= cfg.witness_image) {
        const auto [lo, hi] = probed[i](0) <= probed[j](0) ? std::pair{i, j} : std::pair{j, i};
        d.global_injectivity_violations.push_back({probed[lo], probed[hi], images[i]});
      }
  return d;
}

}  // namespace monoprox
