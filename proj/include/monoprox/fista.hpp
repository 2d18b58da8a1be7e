#pragma once

// Accelerated proximal gradient (FISTA) with scheduled and adaptive restart,
// plus the divergence / non-attainment detector used by generalized prox
// evaluations.

#include <cmath>
#include <deque>
#include <functional>
#include <limits>
#include <string>
#include <utility>

#include "monoprox/config.hpp"

namespace monoprox {

enum class SolveStatus { converged, diverged, not_found };

inline const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::converged: return "converged";
    case SolveStatus::diverged: return "diverged";
    case SolveStatus::not_found: return "not_found";
  }
  return "unknown";
}

/// Differentiable part of a composite objective.
struct SmoothPart {
  std::function<double(const Vector&)> value;
  std::function<Vector(const Vector&)> gradient;
  double lipschitz = 0.0;
};

struct FistaResult {
  Vector x;
  int iterations = 0;
  double residual = 0.0;  ///< ||x_k - y_{k-1}||, the fixed-point residual of the last step
  SolveStatus status = SolveStatus::diverged;
  std::string explanation;
};

namespace detail {

inline double cosine(const Vector& a, const Vector& b) {
  const double na = a.norm(), nb = b.norm();
  if (na == 0.0 || nb == 0.0) return 0.0;
  return a.dot(b) / (na * nb);
}

/// True when the objective is non-increasing along x + t d for t = 1, 10, ...,
/// 1e6 and strictly below its value at x for t = 1.
template <class Objective>
bool descends_along_ray(const Objective& objective, const Vector& x, const Vector& direction) {
  const double f0 = objective(x);
  if (!std::isfinite(f0)) return false;
  double prev = f0;
  double t = 1.0;
  for (int i = 0; i <= 6; ++i, t *= 10.0) {
    const double ft = objective(x + t * direction);
    if (!(ft <= prev)) return false;
    if (i == 0 && !(ft < f0)) return false;
    prev = ft;
  }
  return true;
}

}  // namespace detail

/// Minimizes smooth(x) + g(x) where `prox(step, z)` evaluates prox_{step g}(z)
/// and `g_value` evaluates g. With `detect_non_attainment` the solver watches
/// for minimizing sequences that escape to infinity and reports not_found.
template <class Prox, class Value>
FistaResult fista(const SmoothPart& smooth, const Prox& prox, const Value& g_value, Vector start,
                  const ToleranceConfig& cfg, bool detect_non_attainment = false) {
  const double step = smooth.lipschitz > 0.0 ? 1.0 / (smooth.lipschitz * (1.0 + 1e-9)) : 1.0;
  auto objective = [&](const Vector& z) { return smooth.value(z) + g_value(z); };

  FistaResult out;
  Vector x = std::move(start);
  Vector y = x;
  double t = 1.0;

  Vector checkpoint = x;
  double checkpoint_value = std::numeric_limits<double>::quiet_NaN();
  std::deque<Vector> displacements;

  for (int k = 1; k <= cfg.max_iter; ++k) {
    Vector x_new = prox(step, y - step * smooth.gradient(y));
    out.residual = (x_new - y).norm();
    out.iterations = k;

    if (!x_new.allFinite()) {
      out.x = x;
      out.status = SolveStatus::diverged;
      out.explanation = "non-finite iterate";
      return out;
    }
    if (x_new.norm() > cfg.divergence_norm) {
      out.x = x_new;
      out.status = SolveStatus::not_found;
      out.explanation = "iterate norm exceeded divergence threshold";
      return out;
    }

    const double t_new = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    const bool scheduled = cfg.fista_restart > 0 && k % cfg.fista_restart == 0;
    const bool adaptive = (y - x_new).dot(x_new - x) > 0.0;
    if (scheduled || adaptive) {
      t = 1.0;
      y = x_new;
    } else {
      y = x_new + ((t - 1.0) / t_new) * (x_new - x);
      t = t_new;
    }
    x = std::move(x_new);

    if (out.residual <= cfg.tol_fix) {
      out.x = x;
      out.status = SolveStatus::converged;
      return out;
    }

    if (detect_non_attainment && cfg.stagnation_window > 0 && k % cfg.stagnation_window == 0) {
      const double value = objective(x);
      const Vector disp = x - checkpoint;
      // stagnating objective while the iterates keep growing
      if (std::isfinite(checkpoint_value)) {
        const double decrease = checkpoint_value - value;
        if (decrease < cfg.stagnation_decrease * std::max(1.0, std::abs(value)) &&
            out.residual > 100.0 * cfg.tol_fix && x.norm() > checkpoint.norm()) {
          out.x = x;
          out.status = SolveStatus::not_found;
          out.explanation = "objective stagnates while iterates grow";
          return out;
        }
      }
      // sustained drift along one direction on which the objective keeps decreasing
      displacements.push_back(disp);
      if (static_cast<int>(displacements.size()) > cfg.escape_windows) displacements.pop_front();
      if (static_cast<int>(displacements.size()) == cfg.escape_windows) {
        bool drifting = true;
        Vector total = Vector::Zero(x.size());
        for (std::size_t i = 0; i < displacements.size() && drifting; ++i) {
          const Vector& d = displacements[i];
          total += d;
          if (d.norm() <= 1e3 * cfg.tol_fix) drifting = false;
          if (i > 0) {
            const Vector& prev = displacements[i - 1];
            if (detail::cosine(prev, d) < 0.99 || d.norm() < 0.5 * prev.norm()) drifting = false;
          }
        }
        if (drifting && detail::descends_along_ray(objective, x, total.normalized())) {
          out.x = x;
          out.status = SolveStatus::not_found;
          out.explanation = "minimizing sequence escapes along a direction of descent";
          return out;
        }
      }
      checkpoint = x;
      checkpoint_value = value;
    }
  }
  out.x = x;
  out.status = SolveStatus::diverged;
  out.explanation = "iteration budget exhausted";
  return out;
}

}  // namespace monoprox
