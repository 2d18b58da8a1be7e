#include <gtest/gtest.h>

#include "monoprox/composition.hpp"
#include "monoprox/convex.hpp"
#include "support.hpp"

using namespace monoprox;
using monoprox::test::Rng;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(v.size());
  Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

Matrix row(std::initializer_list<double> v) { return vec(v).transpose(); }

MonotoneOperator random_operator(Index n, Rng& rng, int which) {
  switch (which % 4) {
    case 0: return affine_operator(rng.monotone(n), rng.vector(n));
    case 1: return subdifferential(l1(n, rng.uniform(0.3, 1.5)));
    case 2: return subdifferential(quadratic(rng.psd(n, n), rng.vector(n)));
    default: {
      const Vector lo = -rng.vector(n).cwiseAbs().array() - 0.2;
      const Vector hi = rng.vector(n).cwiseAbs().array() + 0.2;
      return subdifferential(indicator_box(lo, hi));
    }
  }
}

}  // namespace

TEST(InnerInclusion, Examples) {
  const Vector x = vec({1, -3});
  const InnerSolveReport r = solve_inner_inclusion(scaled_identity(2, 1.0), LinearMap::identity(2),
                                                   Metric::identity(2), x);
  EXPECT_EQ(r.status, SolveStatus::converged);
  EXPECT_LE((r.v - x / 2).norm(), 1e-9);

  // M = [1 1] as a map R^2 -> R, U = Id: M U M* = 2, 2 v + v / 2 = 1
  const InnerSolveReport s = solve_inner_inclusion(scaled_identity(1, 2.0), LinearMap(row({1, 1})),
                                                   Metric::identity(2), vec({1}));
  EXPECT_NEAR(s.v(0), 0.4, 1e-9);
  EXPECT_LE(s.final_residual, ToleranceConfig{}.tol_fix);
}

TEST(ResolventComposed, Examples) {
  const Vector x = vec({2, -0.4});
  const CompositionProblem id{scaled_identity(2, 1.0), LinearMap::identity(2), Metric::identity(2)};
  EXPECT_LE((resolvent_composed(id, x).value - x / 2).norm(), 1e-9);

  const CompositionProblem zero_map{scaled_identity(3, 4.0), LinearMap::zero(3, 2), Metric::identity(2)};
  EXPECT_LE((resolvent_composed(zero_map, x).value - x).norm(), 1e-12);

  const CompositionProblem l1p{subdifferential(l1(2, 1.0)), LinearMap::identity(2), Metric::identity(2)};
  EXPECT_LE((resolvent_composed(l1p, x).value - l1(2, 1.0).prox(1.0, x)).norm(), 1e-9);
}

TEST(ResolventComposed, RoutesAgreeOnFixtures) {
  std::vector<CompositionProblem> fixtures = {
      {scaled_identity(2, 1.0), LinearMap::identity(2), Metric::identity(2)},
      {subdifferential(l1(2, 1.0)), LinearMap::identity(2), Metric::identity(2)},
      {scaled_identity(1, 1.0), LinearMap(row({1, 1})), Metric::identity(2)},
  };
  Rng rng(1);
  for (const auto& p : fixtures) {
    const Vector x = rng.vector(p.metric.dim(), 2.0);
    const Vector a = resolvent_composed(p, x).value;
    EXPECT_LE((resolvent_composed_closed_range(p, x).value - a).norm(), 2e-8);
    const CompositionResult full = resolvent_composed_full_range(p, x);
    EXPECT_LE((full.value - a).norm(), 2e-8);
    EXPECT_LE(full.self_check, 2e-8);
  }
  // M = Id, U = Id: Id - J_{B^{-1}} = J_B
  const MonotoneOperator b = subdifferential(quadratic(rng.psd(2, 2), rng.vector(2)));
  const Vector x = rng.vector(2);
  const CompositionProblem p{b, LinearMap::identity(2), Metric::identity(2)};
  EXPECT_LE((resolvent_composed_full_range(p, x).value - b.resolvent(1.0, x)).norm(), 1e-9);
}

TEST(ResolventComposed, KernelPointIsFixed) {
  // M x = 0 and B = Id force M* v = 0
  const CompositionProblem p{scaled_identity(1, 1.0), LinearMap(row({1, 1})), Metric::identity(2)};
  const Vector x = vec({1, -1});
  EXPECT_LE((resolvent_composed(p, x).value - x).norm(), 1e-12);
  EXPECT_LE((resolvent_composed_closed_range(p, x).value - x).norm(), 1e-12);
}

TEST(ResolventComposed, FullRowRankReducesToNormalEquations) {
  // U = Id: (M*)^+ = (M M*)^{-1} M, so the closed-range route equals route (v)
  Rng rng(2);
  for (int k = 0; k < 10; ++k) {
    const LinearMap m(rng.matrix(2, 4));
    const CompositionProblem p{random_operator(2, rng, k), m, Metric::identity(4)};
    const Vector x = rng.vector(4);
    const Matrix mm = m.matrix();
    const Matrix normal = (mm * mm.transpose()).inverse() * mm;
    const Matrix pinv = pseudoinverse(m.adjoint()).matrix();
    EXPECT_LE((normal - pinv).norm(), 1e-10);
    EXPECT_LE((resolvent_composed_closed_range(p, x).value -
               resolvent_composed_full_range(p, x).value).norm(),
              2e-5);
  }
}

TEST(ResolventComposed, FullRangeRejectsRankDeficientMap) {
  Rng rng(3);
  const CompositionProblem p{scaled_identity(3, 1.0), LinearMap(rng.matrix_of_rank(3, 4, 2)),
                             Metric::identity(4)};
  EXPECT_THROW(resolvent_composed_full_range(p, rng.vector(4)), RankDeficient);
}

TEST(ResolventComposed, RandomRouteEquivalence) {
  Rng rng(4);
  for (int k = 0; k < 24; ++k) {
    const Index g = rng.integer(2, 5), h = rng.integer(1, static_cast<int>(g));
    const LinearMap m(rng.matrix(h, g));
    const Metric u = spd_sqrt(rng.spd(g));
    const CompositionProblem p{random_operator(h, rng, k), m, u};
    const Vector x = rng.vector(g, 2.0);
    const Vector a = resolvent_composed(p, x).value;
    EXPECT_LE((resolvent_composed_closed_range(p, x).value - a).norm(), 2e-5) << k;
    const CompositionResult full = resolvent_composed_full_range(p, x);
    EXPECT_LE((full.value - a).norm(), 2e-5) << k;
    EXPECT_LE(full.self_check, 2e-5) << k;
    EXPECT_LE((resolve_composed(p, x).value - a).norm(), 2e-5) << k;
  }
}

TEST(ResolventComposed, SquareInvertibleMapDiagonalMetric) {
  Rng rng(5);
  for (int k = 0; k < 5; ++k) {
    const LinearMap m(rng.matrix(3, 3));
    const Matrix bm = rng.psd(3, 3);
    const CompositionProblem p{affine_operator(bm, rng.vector(3)), m, Metric::scaled(3, 2.0)};
    const Vector x = rng.vector(3);
    const Vector a = resolvent_composed(p, x).value;
    EXPECT_LE((resolvent_composed_closed_range(p, x).value - a).norm(), 2e-5);
    EXPECT_LE((resolvent_composed_full_range(p, x).value - a).norm(), 2e-5);
  }
}

TEST(ResolventComposed, MatchesProxOfComposedQuadratic) {
  // B = grad f with f quadratic: J_{U M* B M} = prox^{U^{-1}}_{f o M}
  Rng rng(6);
  for (int k = 0; k < 15; ++k) {
    const Index g = rng.integer(1, 5), h = rng.integer(1, 5);
    const Matrix a = rng.psd(h, rng.integer(1, static_cast<int>(h)));
    const Vector b = rng.vector(h);
    const Matrix mm = rng.matrix(h, g);
    const Metric u = spd_sqrt(rng.spd(g));
    const CompositionProblem p{subdifferential(quadratic(a, b)), LinearMap(mm), u};
    const Vector x = rng.vector(g);
    const Vector truth = prox_metric(quadratic(mm.transpose() * a * mm, mm.transpose() * b),
                                     u.inverse(), x);
    EXPECT_LE((resolvent_composed(p, x).value - truth).norm(), 2e-5);
  }
}

TEST(ResolventComposed, FirmlyNonexpansiveInInverseMetric) {
  Rng rng(7);
  for (int k = 0; k < 4; ++k) {
    const LinearMap m(rng.matrix_of_rank(3, 4, 2 + k % 2));
    const Metric u = spd_sqrt(rng.spd(4));
    const CompositionProblem p{random_operator(3, rng, k), m, u};
    auto t = [&](const Vector& x) { return resolvent_composed(p, x).value; };
    EXPECT_LE(test::firm_nonexpansive_defect(t, 4, u.inverse_matrix(), rng), 1e-6);
  }
}

TEST(ResolventComposed, AdjointOfDualPointIsUnique) {
  Rng rng(8);
  for (int k = 0; k < 10; ++k) {
    // ker M* nontrivial so v itself can move
    const LinearMap m(rng.matrix_of_rank(4, 3, 2));
    const Metric u = spd_sqrt(rng.spd(3));
    const MonotoneOperator b = random_operator(4, rng, k);
    const Vector x = rng.vector(3);
    const Vector start = rng.vector(4, 3.0);
    const InnerSolveReport r0 = solve_inner_inclusion(b, m, u, m.apply(x));
    const InnerSolveReport r1 = solve_inner_inclusion(b, m, u, m.apply(x), {}, &start);
    EXPECT_LE((m.apply_adjoint(r0.v) - m.apply_adjoint(r1.v)).norm(), 1e-6);
  }
}

TEST(ParallelComposition, Examples) {
  // A = Id, L = [1 1]: L (Id + L* L)^{-1} L* = 2/3
  const LinearMap l(row({1, 1}));
  const MonotoneOperator id = scaled_identity(2, 1.0);
  for (Route r : {Route::general, Route::closed_range})
    EXPECT_NEAR(resolvent_parallel_composition(id, l, Metric::identity(1), vec({1.5}), r).value(0),
                1.0, 1e-9);

  Rng rng(9);
  const MonotoneOperator a = random_operator(3, rng, 1);
  const Vector x = rng.vector(3);
  EXPECT_LE((resolvent_parallel_composition(a, LinearMap::identity(3), Metric::identity(3), x).value -
             a.resolvent(1.0, x)).norm(),
            1e-9);
}

TEST(ParallelComposition, FullRangeRejectsRankDeficientMap) {
  const LinearMap l(row({1, 1}));
  EXPECT_THROW(resolvent_parallel_composition(scaled_identity(2, 1.0), l, Metric::identity(1),
                                              vec({1}), Route::full_range),
               RankDeficient);
}

TEST(ParallelComposition, RoutesAgreeAndMatchDuality) {
  Rng rng(10);
  for (int k = 0; k < 20; ++k) {
    const Index h = rng.integer(1, 4), g = rng.integer(1, 4);
    const bool full = k % 2 == 0;
    const LinearMap l(full && g >= h ? rng.matrix(g, h)
                                     : rng.matrix_of_rank(g, h, rng.integer(1, static_cast<int>(std::min(g, h)))));
    const Metric u = spd_sqrt(rng.spd(g));
    const MonotoneOperator a = random_operator(h, rng, k);
    const Vector x = rng.vector(g, 2.0);
    const Vector direct = resolvent_parallel_composition(a, l, u, x, Route::general).value;
    EXPECT_LE((resolvent_parallel_composition(a, l, u, x, Route::closed_range).value - direct).norm(),
              2e-5);
    if (numerical_rank(l.matrix()) == h)
      EXPECT_LE((resolvent_parallel_composition(a, l, u, x, Route::full_range).value - direct).norm(),
                2e-5);
    // J_{U (L |> A)} = Id - U J_{U^{-1} L A^{-1} L*} U^{-1}
    const CompositionProblem dual{inverse_operator(a), l.adjoint(), u.inverse()};
    const Vector via = x - u.apply(resolvent_composed(dual, u.apply_inverse(x)).value);
    EXPECT_LE((via - direct).norm(), 2e-5) << k;
  }
}

TEST(ParallelSum, Examples) {
  const Vector x = vec({2.2});
  EXPECT_NEAR(parallel_sum_resolvent(scaled_identity(1, 2.0), scaled_identity(1, 3.0), x).value(0),
              1.0, 1e-6);
  const Vector y = vec({1.7, -3});
  EXPECT_LE((parallel_sum_resolvent(scaled_identity(2, 2.0), zero_operator(2), y).value - y).norm(),
            1e-8);
  EXPECT_LE((parallel_sum_resolvent(scaled_identity(2, 1.0), scaled_identity(2, 1.0), y).value -
             y / 1.5).norm(),
            1e-8);
}

TEST(ParallelSum, QuadraticsMatchInfimalConvolution) {
  // a/2 |x|^2 [] b/2 |x|^2 = (ab/(a+b))/2 |x|^2
  Rng rng(11);
  for (int k = 0; k < 10; ++k) {
    const double a = rng.uniform(0.1, 4.0), b = rng.uniform(0.1, 4.0);
    const double c = a * b / (a + b);
    const Vector x = rng.vector(2);
    const MonotoneOperator qa = subdifferential(quadratic(a * Matrix::Identity(2, 2), Vector::Zero(2)));
    const MonotoneOperator qb = subdifferential(quadratic(b * Matrix::Identity(2, 2), Vector::Zero(2)));
    const Vector got = parallel_sum_resolvent(qa, qb, x).value;
    EXPECT_LE((got - x / (1.0 + c)).norm(), 1e-8);
  }
}
