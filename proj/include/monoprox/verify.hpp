#pragma once

// Seeded identity suite: random instance generation and one residual check per
// identity of the library. The same checks back the `verify` subcommand and the
// acceptance run.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "monoprox/composition.hpp"
#include "monoprox/config.hpp"
#include "monoprox/convex.hpp"
#include "monoprox/linalg.hpp"
#include "monoprox/operators.hpp"
#include "monoprox/oracle.hpp"
#include "monoprox/postcomposition.hpp"
#include "monoprox/warped.hpp"

namespace monoprox {

/// Deterministic pseudo-random instances.
class InstanceGenerator {
 public:
  explicit InstanceGenerator(std::uint64_t seed) : gen_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(gen_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(gen_); }
  double gaussian() { return std::normal_distribution<double>(0.0, 1.0)(gen_); }

  Vector vector(Index n, double scale = 1.0) {
    Vector v(n);
    for (Index i = 0; i < n; ++i) v(i) = scale * gaussian();
    return v;
  }
  Matrix matrix(Index r, Index c) {
    Matrix m(r, c);
    for (Index j = 0; j < c; ++j)
      for (Index i = 0; i < r; ++i) m(i, j) = gaussian();
    return m;
  }
  Matrix matrix_of_rank(Index r, Index c, Index rank) {
    if (rank == 0) return Matrix::Zero(r, c);
    return matrix(r, rank) * matrix(rank, c);
  }
  Matrix psd(Index n, Index rank) {
    const Matrix b = matrix(n, rank);
    return b * b.transpose();
  }
  /// Symmetric with spectrum in [lo, hi].
  Matrix spd(Index n, double lo = 0.5, double hi = 3.0) {
    const Matrix q = matrix(n, n).householderQr().householderQ();
    Vector d(n);
    for (Index i = 0; i < n; ++i) d(i) = uniform(lo, hi);
    const Matrix u = q * d.asDiagonal() * q.transpose();
    return 0.5 * (u + u.transpose());
  }
  Matrix monotone(Index n) {
    const Matrix s = matrix(n, n);
    return psd(n, n) / static_cast<double>(n) + 0.5 * (s - s.transpose());
  }
  Metric metric(Index n) { return spd_sqrt(spd(n)); }
  Metric diagonal_metric(Index n) {
    Vector d(n);
    for (Index i = 0; i < n; ++i) d(i) = uniform(0.3, 3.0);
    return Metric::diagonal(d);
  }

  /// Catalog functions whose qualification condition holds for every L.
  ConvexFunction qualified_function(Index n, int which) {
    switch (which % 5) {
      case 0: return l1(n, uniform(0.2, 1.5));
      case 1: return quadratic(spd(n, 0.2, 2.0), vector(n));
      case 2: return indicator_ball(vector(n), uniform(0.5, 2.0));
      case 3: {
        Vector lo(n), hi(n);
        for (Index i = 0; i < n; ++i) {
          lo(i) = uniform(-2.0, -0.1);
          hi(i) = uniform(0.1, 2.0);
        }
        return indicator_box(lo, hi);
      }
      default: return zero(n);
    }
  }

  /// Separable catalog functions (closed-form prox for diagonal metrics).
  ConvexFunction separable_function(Index n, int which) {
    const double inf = std::numeric_limits<double>::infinity();
    switch (which % 5) {
      case 0: return l1(n, uniform(0.2, 1.5));
      case 1: {
        Vector lo(n), hi(n);
        for (Index i = 0; i < n; ++i) {
          lo(i) = uniform(-2.0, 0.0);
          hi(i) = i % 2 ? inf : lo(i) + uniform(0.2, 2.0);
        }
        return indicator_box(lo, hi);
      }
      case 2: return separable_exp(n, integer(0, static_cast<int>(n) - 1));
      case 3: return linear(vector(n));
      default: return zero(n);
    }
  }

  MonotoneOperator monotone_operator(Index n, int which) {
    switch (which % 4) {
      case 0: return affine_operator(monotone(n), vector(n));
      case 1: return subdifferential(l1(n, uniform(0.3, 1.5)));
      case 2: return subdifferential(quadratic(psd(n, n), vector(n)));
      default: {
        Vector lo(n), hi(n);
        for (Index i = 0; i < n; ++i) {
          lo(i) = -uniform(0.2, 2.0);
          hi(i) = uniform(0.2, 2.0);
        }
        return subdifferential(indicator_box(lo, hi));
      }
    }
  }

 private:
  std::mt19937_64 gen_;
};

/// Max residual of one identity over a batch of instances.
struct IdentityCheck {
  std::string name;
  int instances = 0;
  double max_residual = 0.0;
  double tolerance = 0.0;
  std::string error;  ///< set when an instance raised instead of producing a residual

  bool passed() const { return error.empty() && max_residual <= tolerance; }
  void record(double r) {
    ++instances;
    if (std::isnan(r)) r = std::numeric_limits<double>::infinity();
    max_residual = std::max(max_residual, r);
  }
};

struct SuiteReport {
  std::uint64_t seed = 0;
  int count = 0;
  std::vector<IdentityCheck> checks;

  bool all_passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const IdentityCheck& c) { return c.passed(); });
  }
};

namespace detail {

/// Runs `body` for each instance, converting library errors into a failed check.
inline IdentityCheck run_check(const std::string& name, double tolerance, int count,
                               const std::function<void(int, IdentityCheck&)>& body) {
  IdentityCheck c;
  c.name = name;
  c.tolerance = tolerance;
  for (int k = 0; k < count; ++k) {
    try {
      body(k, c);
    } catch (const std::exception& e) {
      c.error = "instance " + std::to_string(k) + ": " + e.what();
      c.max_residual = std::numeric_limits<double>::infinity();
      return c;
    }
  }
  return c;
}

/// x -> J_{gamma A} x for an operator whose structure is hidden from the
/// dispatching code, which forces the iterative paths.
inline MonotoneOperator opaque(const MonotoneOperator& a) {
  return custom_operator(a.dim(), [a](double g, const Vector& x) { return a.resolvent(g, x); }, {},
                         "opaque " + a.label());
}

inline double firm_defect(const std::function<Vector(const Vector&)>& t, const Matrix& w,
                          InstanceGenerator& gen, int pairs) {
  double worst = 0.0;
  const Index n = w.rows();
  for (int k = 0; k < pairs; ++k) {
    const Vector x = gen.vector(n, 2.0), y = gen.vector(n, 2.0);
    const Vector d = t(x) - t(y);
    worst = std::max(worst, d.dot(w * d) - (x - y).dot(w * d));
  }
  return worst;
}

}  // namespace detail

// ---------------------------------------------------------------- checks

/// J_{UA} + U J_{U^{-1} A^{-1}} U^{-1} = Id. Closed-form instances (affine A
/// with its explicit affine inverse under dense U; separable f with diagonal U)
/// and iterative instances (opaque operators under dense U).
inline std::vector<IdentityCheck> check_metric_moreau(InstanceGenerator& gen, int count,
                                                      const ToleranceConfig& cfg = {}) {
  IdentityCheck closed;
  closed.name = "metric_moreau_closed_form";
  closed.tolerance = 1e-8;
  IdentityCheck iterative;
  iterative.name = "metric_moreau_iterative";
  iterative.tolerance = 1e-5;
  for (int k = 0; k < count; ++k) {
    const Index n = gen.integer(1, 5);
    const Vector x = gen.vector(n, 2.0);
    IdentityCheck& target = k % 3 == 2 ? iterative : closed;
    try {
      double r = 0.0;
      if (k % 3 == 0) {
        const Metric u = gen.metric(n);
        const Matrix a = gen.monotone(n) + 0.3 * Matrix::Identity(n, n);
        const Vector b = gen.vector(n);
        const Matrix ai = a.inverse();
        const MonotoneOperator op = affine_operator(a, b, cfg);
        const MonotoneOperator inv = affine_operator(ai, -ai * b, cfg);
        r = (metric_resolvent(op, u, x, cfg) +
             u.apply(metric_resolvent(inv, u.inverse(), u.apply_inverse(x), cfg)) - x)
                .norm();
      } else if (k % 3 == 1) {
        const Metric u = gen.diagonal_metric(n);
        const ConvexFunction f = gen.separable_function(n, k / 3);
        r = (metric_resolvent(subdifferential(f), u, x, cfg) +
             u.apply(metric_resolvent(subdifferential(f.conjugate()), u.inverse(), u.apply_inverse(x), cfg)) -
             x)
                .norm();
      } else {
        const Metric u = gen.metric(n);
        const MonotoneOperator a = detail::opaque(gen.monotone_operator(n, k / 3));
        r = (metric_resolvent(a, u, x, cfg) +
             u.apply(metric_resolvent(inverse_operator(a), u.inverse(), u.apply_inverse(x), cfg)) - x)
                .norm();
      }
      target.record(r);
    } catch (const std::exception& e) {
      target.error = e.what();
      target.max_residual = std::numeric_limits<double>::infinity();
    }
  }
  return {closed, iterative};
}

/// prox^U_f = Id - U^{-1} prox^{U^{-1}}_{f*} U with both sides from the
/// catalog's own prox machinery.
inline IdentityCheck check_prox_decomposition(InstanceGenerator& gen, int count,
                                              const ToleranceConfig& cfg = {}) {
  return detail::run_check("prox_moreau_decomposition", 1e-8, count, [&](int k, IdentityCheck& c) {
    const Index n = gen.integer(1, 4);
    const Metric u = k % 2 ? gen.metric(n) : gen.diagonal_metric(n);
    const ConvexFunction f = k % 4 < 2 ? gen.qualified_function(n, k / 4) : gen.separable_function(n, k / 4);
    const Vector x = gen.vector(n, 2.0);
    const Vector dual = prox_metric(f.conjugate(), u.inverse(), u.apply(x), cfg);
    c.record((prox_metric(f, u, x, cfg) - (x - u.apply_inverse(dual))).norm());
  });
}

/// P_ker + P_ran = Id, kernel part in ker M, U^{-1}-orthogonality.
inline IdentityCheck check_metric_projections(InstanceGenerator& gen, int count,
                                              const ToleranceConfig& cfg = {}) {
  return detail::run_check("metric_projection_split", 1e-8, count, [&](int, IdentityCheck& c) {
    const Index g = gen.integer(1, 6), h = gen.integer(1, 6);
    const LinearMap m(gen.matrix_of_rank(h, g, gen.integer(0, static_cast<int>(std::min(g, h)))));
    const Metric u = gen.metric(g);
    const Vector x = gen.vector(g);
    const MetricSplit s = split_metric(m, u, x, cfg);
    const Vector again = project_kernel_metric(m, u, s.kernel_part, cfg);
    c.record(std::max({(s.kernel_part + s.range_part - x).norm(), m.apply(s.kernel_part).norm(),
                       (again - s.kernel_part).norm(),
                       std::abs(s.kernel_part.dot(u.apply_inverse(s.range_part)))}));
  });
}

inline IdentityCheck check_moore_penrose(InstanceGenerator& gen, int count,
                                         const ToleranceConfig& cfg = {}) {
  return detail::run_check("moore_penrose", 1e-8, count, [&](int, IdentityCheck& c) {
    const Index r = gen.integer(1, 7), cc = gen.integer(1, 7);
    const Matrix m = gen.matrix_of_rank(r, cc, gen.integer(0, static_cast<int>(std::min(r, cc))));
    const Matrix p = pseudoinverse(LinearMap(m), -1.0, cfg).matrix();
    const double scale = std::max(1.0, m.norm() * p.norm());
    c.record(std::max({(m * p * m - m).norm(), (p * m * p - p).norm(),
                       ((m * p).transpose() - m * p).norm(), ((p * m).transpose() - p * m).norm()}) /
             scale);
  });
}

/// Routes (i), (iv), (v) of the composed resolvent agree; ran M = H so all apply.
inline IdentityCheck check_composed_routes(InstanceGenerator& gen, int count,
                                          const ToleranceConfig& cfg = {}) {
  return detail::run_check("composed_resolvent_routes", 2e-5, count, [&](int k, IdentityCheck& c) {
    const Index g = gen.integer(2, 5), h = gen.integer(1, static_cast<int>(g));
    const CompositionProblem p{gen.monotone_operator(h, k), LinearMap(gen.matrix(h, g)), gen.metric(g)};
    const Vector x = gen.vector(g, 2.0);
    const Vector a = resolvent_composed(p, x, cfg).value;
    const Vector b = resolvent_composed_closed_range(p, x, cfg).value;
    const CompositionResult full = resolvent_composed_full_range(p, x, cfg);
    c.record(std::max({(a - b).norm(), (a - full.value).norm(), full.self_check}));
  });
}

/// With B = df: J_{U M* df M} = prox^{U^{-1}}_{f o M}, where f o M stays in
/// the catalog (quadratics under any M; l1 and boxes under c * signed permutation).
inline IdentityCheck check_composed_ground_truth(InstanceGenerator& gen, int count,
                                                const ToleranceConfig& cfg = {}) {
  return detail::run_check("composed_resolvent_vs_prox", 2e-5, count, [&](int k, IdentityCheck& c) {
    const Index g = gen.integer(1, 4);
    const Metric u = gen.metric(g);
    const Vector x = gen.vector(g, 2.0);
    if (k % 2 == 0) {
      const Index h = gen.integer(1, 4);
      const Matrix a = gen.psd(h, gen.integer(1, static_cast<int>(h)));
      const Vector b = gen.vector(h);
      const Matrix m = gen.matrix(h, g);
      const CompositionProblem p{subdifferential(quadratic(a, b)), LinearMap(m), u};
      const Vector truth = prox_metric(quadratic(m.transpose() * a * m, m.transpose() * b), u.inverse(), x, cfg);
      c.record((resolvent_composed(p, x, cfg).value - truth).norm());
      return;
    }
    // M = s P with P a signed permutation
    std::vector<int> perm(static_cast<std::size_t>(g));
    for (int i = 0; i < g; ++i) perm[static_cast<std::size_t>(i)] = i;
    for (int i = static_cast<int>(g) - 1; i > 0; --i) std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(gen.integer(0, i))]);
    const double s = gen.uniform(0.5, 2.0);
    Matrix m = Matrix::Zero(g, g);
    Vector sign(g);
    for (Index i = 0; i < g; ++i) {
      sign(i) = gen.uniform(-1.0, 1.0) < 0.0 ? -1.0 : 1.0;
      m(i, perm[static_cast<std::size_t>(i)]) = s * sign(i);
    }
    ConvexFunction f = l1(g, 1.0);
    ConvexFunction composed = l1(g, 1.0);
    if (k % 4 == 1) {
      const double lam = gen.uniform(0.3, 1.5);
      f = l1(g, lam);
      composed = l1(g, lam * s);
    } else {
      Vector lo(g), hi(g), clo(g), chi(g);
      for (Index i = 0; i < g; ++i) {
        lo(i) = -gen.uniform(0.1, 2.0);
        hi(i) = gen.uniform(0.1, 2.0);
      }
      // (M x)_i = s sign_i x_{perm(i)} in [lo_i, hi_i]
      for (Index i = 0; i < g; ++i) {
        const Index j = perm[static_cast<std::size_t>(i)];
        const double a = lo(i) / (s * sign(i)), b = hi(i) / (s * sign(i));
        clo(j) = std::min(a, b);
        chi(j) = std::max(a, b);
      }
      f = indicator_box(lo, hi);
      composed = indicator_box(clo, chi);
    }
    const CompositionProblem p{subdifferential(f), LinearMap(m), u};
    const Vector truth = prox_metric(composed, u.inverse(), x, cfg);
    c.record((resolvent_composed(p, x, cfg).value - truth).norm());
  });
}

/// J_{U (L |> A)} = Id - U J_{U^{-1} L A^{-1} L*} U^{-1}, the right side through
/// the composed resolvent with (B, M) = (A^{-1}, L*).
inline IdentityCheck check_parallel_duality(InstanceGenerator& gen, int count,
                                            const ToleranceConfig& cfg = {}) {
  return detail::run_check("parallel_composition_duality", 2e-5, count, [&](int k, IdentityCheck& c) {
    const Index h = gen.integer(1, 4), g = gen.integer(1, 4);
    const LinearMap l(k % 2 ? gen.matrix(g, h)
                            : gen.matrix_of_rank(g, h, gen.integer(1, static_cast<int>(std::min(g, h)))));
    const Metric u = gen.metric(g);
    const MonotoneOperator a = gen.monotone_operator(h, k / 2);
    const Vector x = gen.vector(g, 2.0);
    const Vector direct = resolvent_parallel_composition(a, l, u, x, Route::general, cfg).value;
    const CompositionProblem dual{inverse_operator(a), l.adjoint(), u.inverse()};
    const Vector via = x - u.apply(resolvent_composed(dual, u.apply_inverse(x), cfg).value);
    c.record((direct - via).norm());
  });
}

/// Routes of the parallel-composition resolvent agree where they apply.
inline IdentityCheck check_parallel_routes(InstanceGenerator& gen, int count,
                                           const ToleranceConfig& cfg = {}) {
  return detail::run_check("parallel_composition_routes", 2e-5, count, [&](int k, IdentityCheck& c) {
    const Index h = gen.integer(1, 4), g = gen.integer(static_cast<int>(h), 5);
    const LinearMap l(k % 2 ? gen.matrix(g, h)
                            : gen.matrix_of_rank(g, h, gen.integer(1, static_cast<int>(h))));
    const Metric u = gen.metric(g);
    const MonotoneOperator a = gen.monotone_operator(h, k / 2);
    const Vector x = gen.vector(g, 2.0);
    const Vector direct = resolvent_parallel_composition(a, l, u, x, Route::general, cfg).value;
    double r = (resolvent_parallel_composition(a, l, u, x, Route::closed_range, cfg).value - direct).norm();
    if (numerical_rank(l.matrix(), cfg) == h)
      r = std::max(r, (resolvent_parallel_composition(a, l, u, x, Route::full_range, cfg).value - direct).norm());
    c.record(r);
  });
}

/// B = 2 Id, C = 3 Id gives x / 2.2; B [] 0 = 0.
inline std::vector<IdentityCheck> check_parallel_sum(const ToleranceConfig& cfg = {}) {
  IdentityCheck scalar;
  scalar.name = "parallel_sum_scalar";
  scalar.tolerance = 1e-6;
  IdentityCheck zero_sum;
  zero_sum.name = "parallel_sum_with_zero";
  zero_sum.tolerance = 1e-8;
  try {
    for (double x : {-3.0, 0.0, 1.0, 2.2, 10.0}) {
      const Vector v = Vector::Constant(1, x);
      scalar.record(std::abs(
          parallel_sum_resolvent(scaled_identity(1, 2.0), scaled_identity(1, 3.0), v, cfg).value(0) - x / 2.2));
      zero_sum.record(std::abs(parallel_sum_resolvent(scaled_identity(1, 2.0), zero_operator(1), v, cfg).value(0) - x));
    }
  } catch (const std::exception& e) {
    scalar.error = zero_sum.error = e.what();
  }
  return {scalar, zero_sum};
}

/// Spread of image and kernel_complement over random FISTA starts on
/// rank-deficient L.
inline std::vector<IdentityCheck> check_singleton_projections(InstanceGenerator& gen, int count,
                                                              int starts = 10,
                                                              const ToleranceConfig& cfg = {}) {
  IdentityCheck image;
  image.name = "prox_image_spread";
  image.tolerance = 1e-6;
  IdentityCheck kc;
  kc.name = "prox_kernel_complement_spread";
  kc.tolerance = 1e-6;
  for (int k = 0; k < count; ++k) {
    try {
      const Index h = gen.integer(2, 5), g = gen.integer(1, 4);
      const Index rank = gen.integer(1, static_cast<int>(std::min(h - 1, g)));
      const LinearMap l(gen.matrix_of_rank(g, h, rank));
      const ConvexFunction f = gen.qualified_function(h, k);
      const InfimalPostcomposition ip(f, l, gen.metric(g), cfg);
      const Vector point = gen.vector(g, 2.0);
      std::vector<ProxResult> runs;
      for (int s = 0; s < starts; ++s) {
        const Vector start = gen.vector(h, 3.0);
        runs.push_back(ip.prox(point, &start));
        if (!runs.back().attained) throw NotAttained("singleton check: " + runs.back().explanation);
      }
      double si = 0.0, sk = 0.0;
      for (const ProxResult& r : runs) {
        si = std::max(si, (r.image - runs.front().image).norm());
        sk = std::max(sk, (r.kernel_complement - runs.front().kernel_complement).norm());
      }
      image.record(si);
      kc.record(sk);
    } catch (const std::exception& e) {
      image.error = kc.error = e.what();
      image.max_residual = kc.max_residual = std::numeric_limits<double>::infinity();
    }
  }
  return {image, kc};
}

inline IdentityCheck check_generalized_moreau(InstanceGenerator& gen, int count,
                                              const ToleranceConfig& cfg = {}) {
  return detail::run_check("generalized_moreau", 2e-5, count, [&](int k, IdentityCheck& c) {
    const Index h = gen.integer(1, 4), g = gen.integer(1, 4);
    const ConvexFunction f = gen.qualified_function(h, k);
    const LinearMap l(k % 3 ? gen.matrix(g, h)
                            : gen.matrix_of_rank(g, h, gen.integer(1, static_cast<int>(std::min(g, h)))));
    if (qualification_hint(f, l, cfg) != Qualification::satisfied)
      throw InvalidParameter("generated instance is not qualified");
    const Metric u = gen.metric(g);
    std::vector<Vector> samples;
    for (int s = 0; s < 2; ++s) samples.push_back(gen.vector(g, 2.0));
    c.record(verify_generalized_moreau(f, l, u, samples, cfg));
  });
}

/// L brute_prox vs the image field of prox_infcomp, dim H <= 3.
inline IdentityCheck check_oracle_agreement(InstanceGenerator& gen, int count,
                                            const OracleConfig& ocfg = {},
                                            const ToleranceConfig& cfg = {}) {
  const double tol = std::max(1e-3, 2.0 * grid_resolution(ocfg));
  return detail::run_check("oracle_agreement", tol, count, [&](int k, IdentityCheck& c) {
    const Index h = gen.integer(1, k % 4 == 3 ? 3 : 2), g = gen.integer(1, 3);
    const ConvexFunction f = gen.qualified_function(h, k);
    const LinearMap l(gen.matrix(g, h));
    const Metric u = gen.metric(g);
    const Vector point = gen.vector(g);
    const ProxResult r = prox_infcomp(f, l, u, point, cfg);
    if (!r.attained) throw NotAttained("oracle agreement: " + r.explanation);
    c.record((l.apply(brute_prox(f, l, u, point, ocfg)) - r.image).norm());
  });
}

/// ||Tx - Ty||_W^2 <= <x - y, Tx - Ty>_W for every exposed resolvent and prox
/// map, each in its own geometry W.
inline std::vector<IdentityCheck> check_firm_nonexpansiveness(InstanceGenerator& gen, int pairs,
                                                              const ToleranceConfig& cfg = {}) {
  std::vector<IdentityCheck> out;
  auto add = [&](const std::string& name, const std::function<double()>& body) {
    IdentityCheck c;
    c.name = "firm_nonexpansive_" + name;
    c.tolerance = 1e-6;
    try {
      c.instances = pairs;
      c.max_residual = std::max(0.0, body());
    } catch (const std::exception& e) {
      c.error = e.what();
      c.max_residual = std::numeric_limits<double>::infinity();
    }
    out.push_back(c);
  };
  const Index n = 3;
  const Matrix id = Matrix::Identity(n, n);
  const Metric u = gen.metric(n);

  add("affine_resolvent", [&] {
    const MonotoneOperator a = affine_operator(gen.monotone(n), gen.vector(n), cfg);
    return detail::firm_defect([&](const Vector& x) { return a.resolvent(0.7, x); }, id, gen, pairs);
  });
  add("inverse_resolvent", [&] {
    const MonotoneOperator a = inverse_operator(subdifferential(l1(n, 0.8)));
    return detail::firm_defect([&](const Vector& x) { return a.resolvent(1.3, x); }, id, gen, pairs);
  });
  add("catalog_prox", [&] {
    double worst = 0.0;
    for (int k = 0; k < 5; ++k) {
      const ConvexFunction f = k < 4 ? gen.qualified_function(n, k) : separable_exp(n, 0);
      worst = std::max(worst, detail::firm_defect([&](const Vector& x) { return f.prox(0.9, x); }, id, gen,
                                                  pairs / 5));
    }
    return worst;
  });
  add("metric_resolvent", [&] {
    const MonotoneOperator a = affine_operator(gen.monotone(n), gen.vector(n), cfg);
    return detail::firm_defect([&](const Vector& x) { return metric_resolvent(a, u, x, cfg); },
                               u.inverse_matrix(), gen, pairs);
  });
  add("metric_resolvent_iterative", [&] {
    const MonotoneOperator a = detail::opaque(subdifferential(l1(n, 0.6)));
    return detail::firm_defect([&](const Vector& x) { return metric_resolvent(a, u, x, cfg); },
                               u.inverse_matrix(), gen, pairs);
  });
  add("prox_metric", [&] {
    const ConvexFunction f = l1(n, 0.7);
    return detail::firm_defect([&](const Vector& x) { return prox_metric(f, u, x, cfg); }, u.matrix(), gen,
                               pairs);
  });
  add("conjugate_prox_metric", [&] {
    const ConvexFunction f = indicator_ball(gen.vector(n), 1.0);
    return detail::firm_defect([&](const Vector& x) { return conjugate_prox_metric(f, u, x, cfg); },
                               u.inverse_matrix(), gen, pairs);
  });
  add("warped_resolvent_spd_kernel", [&] {
    const Matrix k = gen.spd(n);
    const MonotoneOperator a = subdifferential(l1(n, 0.5));
    const WarpedKernel kernel = linear_kernel(k);
    return detail::firm_defect([&](const Vector& x) { return warped_resolvent(a, kernel, x, cfg).value; }, k,
                               gen, pairs);
  });
  add("composed_resolvent", [&] {
    const LinearMap m(gen.matrix_of_rank(2, n, 2));
    const CompositionProblem p{subdifferential(l1(2, 0.9)), m, u};
    return detail::firm_defect([&](const Vector& x) { return resolvent_composed(p, x, cfg).value; },
                               u.inverse_matrix(), gen, pairs);
  });
  add("parallel_composition_resolvent", [&] {
    const LinearMap l(gen.matrix(n, 2));
    const MonotoneOperator a = gen.monotone_operator(2, 3);
    return detail::firm_defect(
        [&](const Vector& x) { return resolvent_parallel_composition(a, l, u, x, Route::automatic, cfg).value; },
        u.inverse_matrix(), gen, pairs);
  });
  add("parallel_sum_resolvent", [&] {
    const MonotoneOperator b = subdifferential(l1(n, 0.5));
    const MonotoneOperator c = affine_operator(gen.psd(n, n), Vector::Zero(n), cfg);
    return detail::firm_defect([&](const Vector& x) { return parallel_sum_resolvent(b, c, x, cfg).value; }, id,
                               gen, pairs);
  });
  add("prox_postcomposition", [&] {
    const ConvexFunction f = gen.qualified_function(4, 0);
    const LinearMap l(gen.matrix_of_rank(n, 4, 2));
    return detail::firm_defect([&](const Vector& x) { return prox_postcomposition(f, l, u, x, cfg); },
                               u.matrix(), gen, pairs);
  });
  add("prox_conjugate_composite", [&] {
    const ConvexFunction f = gen.qualified_function(2, 1);
    const LinearMap l(gen.matrix(n, 2));
    return detail::firm_defect([&](const Vector& x) { return prox_conjugate_composite(f, l, u, x, cfg); },
                               u.inverse_matrix(), gen, pairs);
  });
  return out;
}

/// Median kernel with A = alpha med: the pair (1, 2) has the common image 1 + alpha.
/// Residual: distance of the closest reported witness to (1, 2).
inline IdentityCheck check_median_example(double alpha = 1.0, const ToleranceConfig& cfg = {}) {
  IdentityCheck c;
  c.name = "median_kernel_witness";
  c.tolerance = 1e-6;
  c.instances = 1;
  c.max_residual = std::numeric_limits<double>::infinity();
  try {
    const Vector one = Vector::Constant(1, 1.0), two = Vector::Constant(1, 2.0);
    const WarpedDiagnostics d =
        warped_diagnostics(scaled_median_operator(alpha), median_kernel(), {one}, {one, two}, cfg);
    for (const InjectivityWitness& w : d.global_injectivity_violations)
      c.max_residual = std::min(c.max_residual, std::max(std::abs(w.x(0) - 1.0), std::abs(w.y(0) - 2.0)));
  } catch (const std::exception& e) {
    c.error = e.what();
  }
  return c;
}

/// f(x, y) = exp(y), L(x, y) = x: residual 0 when the prox is reported as not
/// attained and the qualification test says violated, 1 otherwise.
inline IdentityCheck check_exponential_example(const ToleranceConfig& cfg = {}) {
  IdentityCheck c;
  c.name = "exponential_non_attainment";
  c.tolerance = 0.0;
  try {
    const ConvexFunction f = separable_exp(2, 1);
    Matrix lm(1, 2);
    lm << 1.0, 0.0;
    const LinearMap l(lm);
    const bool violated = qualification_hint(f, l, cfg) == Qualification::violated;
    for (double u : {-1.0, 0.0, 1.0}) {
      const ProxResult r = prox_infcomp(f, l, Metric::identity(1), Vector::Constant(1, u), cfg);
      c.record(!r.attained && violated ? 0.0 : 1.0);
    }
  } catch (const std::exception& e) {
    c.error = e.what();
    c.max_residual = 1.0;
  }
  return c;
}

/// Every identity over `count` seeded instances, plus the fixed fixtures.
/// `count` = 0 gives an empty report.
inline SuiteReport check_identity_suite(std::uint64_t seed, int count, const ToleranceConfig& cfg = {}) {
  SuiteReport rep;
  rep.seed = seed;
  rep.count = count;
  if (count <= 0) return rep;
  InstanceGenerator gen(seed);
  auto append = [&](std::vector<IdentityCheck> v) {
    for (auto& c : v) rep.checks.push_back(std::move(c));
  };
  append(check_metric_moreau(gen, count, cfg));
  rep.checks.push_back(check_prox_decomposition(gen, count, cfg));
  rep.checks.push_back(check_metric_projections(gen, count, cfg));
  rep.checks.push_back(check_moore_penrose(gen, count, cfg));
  rep.checks.push_back(check_composed_routes(gen, count, cfg));
  rep.checks.push_back(check_composed_ground_truth(gen, count, cfg));
  rep.checks.push_back(check_parallel_duality(gen, count, cfg));
  rep.checks.push_back(check_parallel_routes(gen, count, cfg));
  append(check_parallel_sum(cfg));
  append(check_singleton_projections(gen, std::max(1, count / 5), 10, cfg));
  rep.checks.push_back(check_generalized_moreau(gen, count, cfg));
  rep.checks.push_back(check_oracle_agreement(gen, std::max(1, count / 5), {}, cfg));
  append(check_firm_nonexpansiveness(gen, 100, cfg));
  rep.checks.push_back(check_median_example(1.0, cfg));
  rep.checks.push_back(check_exponential_example(cfg));
  return rep;
}

}  // namespace monoprox
