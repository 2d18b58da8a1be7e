#pragma once

// Scaled ADMM for min_x f(x) + g(L x) in the metric U:
//   x+ in prox_{f,L}^U (z - w)
//   z+ = prox^U_g (L x+ + w)
//   w+ = w + L x+ - z+
// Only the single-valued image L x+ drives the z and w updates.

#include <chrono>
#include <string>
#include <vector>

#include "monoprox/config.hpp"
#include "monoprox/convex.hpp"
#include "monoprox/errors.hpp"
#include "monoprox/linalg.hpp"
#include "monoprox/postcomposition.hpp"

namespace monoprox {

struct AdmmRecord {
  int iteration = 0;
  double x_norm = 0.0;
  double z_norm = 0.0;
  double primal_residual = 0.0;  ///< ||L x - z||
  double dual_residual = 0.0;    ///< ||L* U (z+ - z)||
  bool attained = true;
  int inner_iterations = 0;
};

struct RunReport {
  std::string task;
  std::vector<AdmmRecord> records;
  Vector x;
  Vector z;
  Vector w;
  double final_objective = 0.0;
  int iterations = 0;
  bool converged = false;
  bool all_updates_attained = true;
  Qualification qualification = Qualification::unknown;
  std::vector<std::string> warnings;
  double wall_time_seconds = 0.0;
  ToleranceConfig tolerances;
};

/// f(x) + g(L x).
inline double composite_objective(const ConvexFunction& f, const ConvexFunction& g, const LinearMap& l,
                                  const Vector& x) {
  return f.value(x) + g.value(l.apply(x));
}

/// Throws NotAttained when an x-update has no minimizer and MaxIterations when
/// the residuals do not reach tol_admm within admm_max_iter iterations.
/// `on_failure`, when given, receives the partial report before the throw.
inline RunReport admm_solve(const ConvexFunction& f, const ConvexFunction& g, const LinearMap& l,
                            const Metric& u, const ToleranceConfig& cfg = {},
                            RunReport* on_failure = nullptr) {
  require_dims(l.cols() == f.dim(), "admm_solve: L must act on the space of f");
  require_dims(l.rows() == g.dim() && u.dim() == g.dim(),
               "admm_solve: g and U must live on the range space of L");
  const auto start_time = std::chrono::steady_clock::now();
  RunReport rep;
  rep.task = "solve";
  rep.tolerances = cfg;
  rep.qualification = qualification_hint(f, l, cfg);
  if (rep.qualification == Qualification::unknown)
    rep.warnings.push_back("qualification condition could not be decided for " + f.name());
  else if (rep.qualification == Qualification::violated)
    rep.warnings.push_back("qualification condition fails for " + f.name() + "; x-updates may have no minimizer");

  const InfimalPostcomposition xstep(f, l, u, cfg);
  Vector x = Vector::Zero(f.dim());
  Vector z = Vector::Zero(g.dim());
  Vector w = Vector::Zero(g.dim());

  auto finish = [&] {
    rep.x = x;
    rep.z = z;
    rep.w = w;
    rep.final_objective = composite_objective(f, g, l, x);
    rep.wall_time_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_time).count();
  };

  for (int k = 1; k <= cfg.admm_max_iter; ++k) {
    const ProxResult px = xstep.prox(z - w, &x);
    AdmmRecord rec;
    rec.iteration = k;
    rec.attained = px.attained;
    rec.inner_iterations = px.report.iterations;
    rep.iterations = k;
    if (!px.attained) {
      rep.all_updates_attained = false;
      rep.records.push_back(rec);
      finish();
      if (on_failure) *on_failure = rep;
      throw NotAttained("admm_solve: x-update " + std::to_string(k) + " has no minimizer (" +
                        px.explanation + ")");
    }
    x = *px.representative;
    const Vector& lx = px.image;
    const Vector z_next = prox_metric(g, u, lx + w, cfg);
    w += lx - z_next;
    rec.primal_residual = (lx - z_next).norm();
    rec.dual_residual = l.apply_adjoint(u.apply(z_next - z)).norm();
    z = z_next;
    rec.x_norm = x.norm();
    rec.z_norm = z.norm();
    rep.records.push_back(rec);
    if (std::max(rec.primal_residual, rec.dual_residual) <= cfg.tol_admm) {
      rep.converged = true;
      finish();
      return rep;
    }
  }
  finish();
  if (on_failure) *on_failure = rep;
  throw MaxIterations("admm_solve: residuals above tol_admm after " + std::to_string(cfg.admm_max_iter) +
                      " iterations");
}

}  // namespace monoprox
