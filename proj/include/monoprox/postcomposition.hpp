#pragma once

// Generalized proximity operator of an infimal postcomposition,
//   prox_{f,L}^U u = argmin_x f(x) + 1/2 ||L x - u||_U^2,
// its single-valued projections, the derived prox operators of f* o L* and
// L |> f, and a qualification test for full domain.

#include <optional>
#include <string>
#include <vector>

#include "monoprox/composition.hpp"
#include "monoprox/config.hpp"
#include "monoprox/convex.hpp"
#include "monoprox/errors.hpp"
#include "monoprox/fista.hpp"
#include "monoprox/linalg.hpp"
#include "monoprox/operators.hpp"

namespace monoprox {

/// Outcome of a generalized prox evaluation.
///
/// `representative` is one minimizer and is not unique when ker L != {0};
/// `image` (= L x) and `kernel_complement` (= P_{(ker L)^perp} x) are the same
/// for every minimizer.
struct ProxResult {
  std::optional<Vector> representative;
  Vector image;
  Vector kernel_complement;
  bool attained = false;
  InnerSolveReport report;
  std::string explanation;
};

/// Prepared (f, L, U) triple; reuses the factorizations across evaluations.
class InfimalPostcomposition {
 public:
  InfimalPostcomposition(ConvexFunction f, LinearMap l, Metric u, ToleranceConfig cfg = {})
      : f_(std::move(f)), l_(std::move(l)), u_(std::move(u)), cfg_(cfg) {
    require_dims(l_.cols() == f_.dim(), "prox_infcomp: L must act on the space of f");
    require_dims(l_.rows() == u_.dim(), "prox_infcomp: U must act on the range space of L");
    const Matrix& lm = l_.matrix();
    q_ = lm.transpose() * u_.matrix() * lm;
    q_ = 0.5 * (q_ + q_.transpose());
    lipschitz_ = operator_norm(q_, cfg_);
    const SvdFactors sv = svd(lm, -1.0, cfg_);
    rank_ = sv.rank();
    const Matrix v = sv.right.leftCols(rank_);
    kernel_complement_ = v * v.transpose();
  }

  const ConvexFunction& function() const { return f_; }
  const LinearMap& map() const { return l_; }
  const Metric& metric() const { return u_; }
  Index rank() const { return rank_; }

  /// FISTA on the composite objective; `start` defaults to 0.
  ProxResult prox(const Vector& u, const Vector* start = nullptr) const {
    require_dims(u.size() == l_.rows(), "prox_infcomp: u must live in the range space of L");
    const Matrix& lm = l_.matrix();
    const Vector ltu = lm.transpose() * u_.apply(u);
    SmoothPart smooth;
    smooth.value = [&](const Vector& x) { return 0.5 * u_.norm_sq(lm * x - u); };
    smooth.gradient = [&](const Vector& x) -> Vector { return q_ * x - ltu; };
    smooth.lipschitz = lipschitz_;
    return run(smooth, start);
  }

  /// prox_f^{L* U L} (sqrt(U) L)^+ sqrt(U) u. The degenerate metric L* U L is
  /// only inverted when ker L = {0}; otherwise the same FISTA runs on
  /// f(x) + 1/2 <Q (x - z), x - z> with the lifted point z.
  ProxResult prox_pinv_route(const Vector& u, const Vector* start = nullptr) const {
    require_dims(u.size() == l_.rows(), "prox_infcomp_pinv_route: dimension mismatch");
    const Matrix& lm = l_.matrix();
    if (rank_ == lm.cols()) {
      const Metric qm = spd_sqrt(q_, cfg_);
      const Vector z = qm.apply_inverse(lm.transpose() * u_.apply(u));
      ProxResult r;
      try {
        r.representative = prox_metric(f_, qm, z, cfg_);
      } catch (const InnerSolverDiverged& e) {
        r.attained = false;
        r.report.status = SolveStatus::diverged;
        r.explanation = e.what();
        return r;
      }
      return finish(std::move(r));
    }
    const Matrix w = u_.sqrt_matrix() * lm;
    const Vector z = pseudoinverse(svd(w, -1.0, cfg_)) * (u_.sqrt_matrix() * u);
    SmoothPart smooth;
    smooth.value = [&](const Vector& x) { return 0.5 * (x - z).dot(q_ * (x - z)); };
    smooth.gradient = [&](const Vector& x) -> Vector { return q_ * (x - z); };
    smooth.lipschitz = lipschitz_;
    return run(smooth, start);
  }

  /// The composite objective f(x) + 1/2 ||L x - u||_U^2.
  double objective(const Vector& x, const Vector& u) const {
    return f_.value(x) + 0.5 * u_.norm_sq(l_.apply(x) - u);
  }

 private:
  ProxResult run(const SmoothPart& smooth, const Vector* start) const {
    auto prox = [&](double step, const Vector& z) { return f_.prox(step, z); };
    auto value = [&](const Vector& z) { return f_.value(z); };
    Vector x0 = start ? *start : Vector::Zero(f_.dim());
    require_dims(x0.size() == f_.dim(), "prox_infcomp: start has the wrong dimension");
    // L*UL may be singular or badly conditioned, so only the adaptive restart
    // is used: a fixed restart period far below sqrt(condition) stalls FISTA
    ToleranceConfig cfg = cfg_;
    cfg.fista_restart = 0;
    const FistaResult fr = fista(smooth, prox, value, std::move(x0), cfg, true);
    ProxResult r;
    r.report.iterations = fr.iterations;
    r.report.final_residual = fr.residual;
    r.report.status = fr.status;
    r.explanation = fr.explanation;
    if (fr.status != SolveStatus::converged) {
      r.attained = false;
      return r;
    }
    r.representative = fr.x;
    return finish(std::move(r));
  }

  ProxResult finish(ProxResult r) const {
    r.attained = true;
    r.report.status = SolveStatus::converged;
    r.image = l_.apply(*r.representative);
    r.kernel_complement = kernel_complement_ * *r.representative;
    return r;
  }

  ConvexFunction f_;
  LinearMap l_;
  Metric u_;
  ToleranceConfig cfg_;
  Matrix q_;
  double lipschitz_ = 0.0;
  Index rank_ = 0;
  Matrix kernel_complement_;
};

/// prox_{f,L}^U u. Non-attainment is reported through `attained`, not thrown.
inline ProxResult prox_infcomp(const ConvexFunction& f, const LinearMap& l, const Metric& u,
                               const Vector& point, const ToleranceConfig& cfg = {},
                               const Vector* start = nullptr) {
  return InfimalPostcomposition(f, l, u, cfg).prox(point, start);
}

inline ProxResult prox_infcomp_pinv_route(const ConvexFunction& f, const LinearMap& l,
                                          const Metric& u, const Vector& point,
                                          const ToleranceConfig& cfg = {},
                                          const Vector* start = nullptr) {
  return InfimalPostcomposition(f, l, u, cfg).prox_pinv_route(point, start);
}

namespace detail {

inline const Vector& attained_image(const ProxResult& r, const std::string& where) {
  if (!r.attained) {
    if (r.report.status == SolveStatus::diverged)
      throw InnerSolverDiverged(where + ": " + r.explanation, r.report.iterations,
                                r.report.final_residual);
    throw NotAttained(where + ": minimum not attained (" + r.explanation + ")");
  }
  return r.image;
}

}  // namespace detail

/// prox^{U^{-1}}_{f* o L*} x = x - U L prox_{f,L}^U (U^{-1} x), through the
/// single-valued image L prox_{f,L}^U.
inline Vector prox_conjugate_composite(const ConvexFunction& f, const LinearMap& l, const Metric& u,
                                       const Vector& x, const ToleranceConfig& cfg = {}) {
  const ProxResult r = prox_infcomp(f, l, u, u.apply_inverse(x), cfg);
  return x - u.apply(detail::attained_image(r, "prox_conjugate_composite"));
}

/// prox^U_{L |> f} u = L prox_{f,L}^U u.
inline Vector prox_postcomposition(const ConvexFunction& f, const LinearMap& l, const Metric& u,
                                   const Vector& point, const ToleranceConfig& cfg = {}) {
  const ProxResult r = prox_infcomp(f, l, u, point, cfg);
  return detail::attained_image(r, "prox_postcomposition");
}

/// Max over samples of || P(x) + U L prox_{f,L}^U (U^{-1} x) - x || where P is
/// prox^{U^{-1}}_{f* o L*} evaluated independently as the resolvent of
/// U L (df*) L* (inner forward-backward on the conjugate). Throws NotAttained
/// when a generalized prox has no minimizer.
inline double verify_generalized_moreau(const ConvexFunction& f, const LinearMap& l,
                                        const Metric& u, const std::vector<Vector>& samples,
                                        const ToleranceConfig& cfg = {}) {
  const InfimalPostcomposition ip(f, l, u, cfg);
  const CompositionProblem conj{subdifferential(f.conjugate()), l.adjoint(), u, Route::general};
  double worst = 0.0;
  for (const Vector& x : samples) {
    const ProxResult r = ip.prox(u.apply_inverse(x));
    const Vector& image = detail::attained_image(r, "verify_generalized_moreau");
    const Vector direct = resolvent_composed(conj, x, cfg).value;
    worst = std::max(worst, (direct + u.apply(image) - x).norm());
  }
  return worst;
}

// ---------------------------------------------------------------- qualification

enum class Qualification { satisfied, violated, unknown };

inline const char* to_string(Qualification q) {
  switch (q) {
    case Qualification::satisfied: return "satisfied";
    case Qualification::violated: return "violated";
    case Qualification::unknown: return "unknown";
  }
  return "unknown";
}

namespace detail {

/// Orthonormal basis of ran A (columns).
inline Matrix range_basis(const Matrix& a, const ToleranceConfig& cfg) {
  const SvdFactors f = svd(a, -1.0, cfg);
  return f.left.leftCols(f.rank());
}

inline bool in_span(const Matrix& basis, const Vector& v) {
  const Vector resid = v - basis * (basis.transpose() * v);
  return resid.norm() <= 1e-9 * std::max(1.0, v.norm());
}

/// dom f* = prod D_i with D_i one of R, {0}, or a closed half-line. Decides
/// whether ri(dom f*) meets S = ran L*, which is 0 in ri(dom f* - ran L*).
inline Qualification sign_pattern_test(const Matrix& s_basis, const std::vector<Index>& zero_coords,
                                       const std::vector<Index>& sign_coords,
                                       const ToleranceConfig& cfg) {
  if (sign_coords.empty()) return Qualification::satisfied;
  if (sign_coords.size() > 1) return Qualification::unknown;
  // S' = { s in S : s_Z = 0 }; need some s in S' with s_i != 0
  Matrix restricted = s_basis;
  if (!zero_coords.empty() && s_basis.cols() > 0) {
    Matrix rows(zero_coords.size(), s_basis.cols());
    for (std::size_t r = 0; r < zero_coords.size(); ++r) rows.row(r) = s_basis.row(zero_coords[r]);
    const SvdFactors f = svd(rows, -1.0, cfg);
    // null space of `rows` from the full right factor
    Eigen::JacobiSVD<Matrix> full(rows, Eigen::ComputeFullV);
    const Index r = f.rank();
    restricted = s_basis * full.matrixV().rightCols(s_basis.cols() - r);
  }
  const Index i = sign_coords.front();
  for (Index c = 0; c < restricted.cols(); ++c)
    if (std::abs(restricted(i, c)) > 1e-9) return Qualification::satisfied;
  return Qualification::violated;
}

}  // namespace detail

/// Decides 0 in sri(dom f* - ran L*) for catalog functions whose dom f* is
/// polyhedral with a simple structure; `unknown` otherwise.
inline Qualification qualification_hint(const ConvexFunction& f, const LinearMap& l,
                                        const ToleranceConfig& cfg = {}) {
  require_dims(l.cols() == f.dim(), "qualification_hint: L must act on the space of f");
  if (f.is_conjugate()) return Qualification::unknown;
  const FunctionData& d = f.data();
  const Matrix s_basis = detail::range_basis(l.matrix().transpose(), cfg);  // ran L*
  switch (f.kind()) {
    case FunctionKind::l1:
    case FunctionKind::indicator_ball:
    case FunctionKind::indicator_affine:
    case FunctionKind::zero:
      return Qualification::satisfied;
    case FunctionKind::quadratic: {
      // dom f* = ran A - b
      Matrix joint(f.dim(), d.a.cols() + s_basis.cols());
      joint << d.a, s_basis;
      return detail::in_span(detail::range_basis(joint, cfg), d.b) ? Qualification::satisfied
                                                                    : Qualification::violated;
    }
    case FunctionKind::linear:
      // dom f* = {c}
      return detail::in_span(s_basis, d.b) ? Qualification::satisfied : Qualification::violated;
    case FunctionKind::indicator_box: {
      std::vector<Index> zeros, signs;
      for (Index i = 0; i < f.dim(); ++i) {
        const bool lo_inf = std::isinf(d.lo(i)), hi_inf = std::isinf(d.hi(i));
        if (lo_inf && hi_inf) zeros.push_back(i);
        else if (lo_inf || hi_inf) signs.push_back(i);
      }
      return detail::sign_pattern_test(s_basis, zeros, signs, cfg);
    }
    case FunctionKind::separable_exp: {
      // dom f* = {0} x ... x [0, +inf) x ... x {0}
      std::vector<Index> zeros;
      for (Index i = 0; i < f.dim(); ++i)
        if (i != d.index) zeros.push_back(i);
      return detail::sign_pattern_test(s_basis, zeros, {d.index}, cfg);
    }
  }
  return Qualification::unknown;
}

}  // namespace monoprox
