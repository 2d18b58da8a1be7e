#include <gtest/gtest.h>

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

/// A mixed bag of catalog members on R^n, all with nonempty interior or
/// nontrivial structure.
std::vector<ConvexFunction> catalog(Index n, Rng& rng) {
  Vector lo(n), hi(n);
  for (Index i = 0; i < n; ++i) {
    lo(i) = rng.uniform(-2.0, 0.0);
    hi(i) = i % 2 == 0 ? lo(i) + rng.uniform(0.1, 2.0) : std::numeric_limits<double>::infinity();
  }
  std::vector<ConvexFunction> out = {
      quadratic(rng.psd(n, std::max<Index>(1, n - 1)), rng.vector(n), 0.3),
      l1(n, rng.uniform(0.2, 1.5)),
      indicator_box(lo, hi),
      indicator_ball(rng.vector(n), rng.uniform(0.5, 2.0)),
      zero(n),
      separable_exp(n, n - 1),
      linear(rng.vector(n)),
  };
  if (n >= 2) out.push_back(indicator_affine(rng.matrix(1, n), rng.vector(1)));
  return out;
}

}  // namespace

TEST(Catalog, ProxExamples) {
  EXPECT_LE((prox_metric(l1(3, 1.0), Metric::identity(3), vec({2, -0.5, 0})) - vec({1, 0, 0})).norm(),
            1e-15);
  const Vector x = vec({0.3, -7});
  EXPECT_EQ(prox_metric(zero(2), Metric::identity(2), x), x);
  // 1-D stationarity 2 (y - 2) + 1 = 0
  EXPECT_NEAR(prox_metric(l1(1, 1.0), Metric::scaled(1, 2.0), vec({2}))(0), 1.5, 1e-14);
}

TEST(Catalog, ConstructorExamples) {
  const Vector x = vec({1, -2, 0.5});
  EXPECT_LE((quadratic(Matrix::Identity(3, 3), Vector::Zero(3)).prox(0.7, x) - x / 1.7).norm(), 1e-14);
  const Vector inf = Vector::Constant(3, std::numeric_limits<double>::infinity());
  EXPECT_EQ(indicator_box(Vector::Zero(3), inf).prox(1.0, x), x.cwiseMax(0.0));

  // p + e^p = 0
  const double p = separable_exp(1, 0).prox(1.0, vec({0}))(0);
  EXPECT_NEAR(p, -0.5671432904097838, 1e-12);
  EXPECT_LE(std::abs(p + std::exp(p)), 1e-12);
}

TEST(Catalog, ConstructorValidation) {
  EXPECT_THROW(quadratic(-Matrix::Identity(2, 2), Vector::Zero(2)), InvalidParameter);
  EXPECT_THROW(indicator_ball(Vector::Zero(2), 0.0), InvalidParameter);
  EXPECT_THROW(indicator_box(vec({1, 0}), vec({0, 1})), InvalidParameter);
  EXPECT_THROW(separable_exp(2, 2), InvalidParameter);
  EXPECT_THROW(l1(2, -1.0), InvalidParameter);
}

TEST(Catalog, ExpConjugateFormula) {
  const ConvexFunction g = separable_exp(2, 1).conjugate();
  EXPECT_EQ(g.value(vec({0, 0})), 0.0);
  EXPECT_NEAR(g.value(vec({0, 2})), 2.0 * (std::log(2.0) - 1.0), 1e-15);
  EXPECT_TRUE(std::isinf(g.value(vec({0, -1}))));
  EXPECT_TRUE(std::isinf(g.value(vec({1, 1}))));
}

TEST(Catalog, ExpProxIsAccurateAcrossScales) {
  for (double gamma : {1e-3, 0.5, 1.0, 10.0, 1e3})
    for (double x : {-50.0, -3.0, 0.0, 0.5, 4.0, 40.0, 700.0}) {
      const double p = detail::exp_prox_scalar(gamma, x);
      EXPECT_LE(std::abs(p + gamma * std::exp(p) - x), 1e-10 * std::max(1.0, std::abs(x)))
          << gamma << " " << x;
    }
}

TEST(Catalog, ProxBeatsRandomCompetitors) {
  Rng rng(1);
  for (Index n : {1, 2, 4}) {
    for (const ConvexFunction& f0 : catalog(n, rng)) {
      for (const ConvexFunction& f : {f0, f0.conjugate()}) {
        const double g = rng.uniform(0.2, 2.0);
        const Vector x = rng.vector(n, 2.0);
        const Vector p = f.prox(g, x);
        const double best = f.value(p) + (x - p).squaredNorm() / (2 * g);
        ASSERT_TRUE(std::isfinite(best)) << f.name() << " n=" << n;
        for (int k = 0; k < 100; ++k) {
          // competitors near p, and feasible by projection through the prox itself
          const Vector q = k % 2 ? Vector(p + rng.vector(n, 0.5)) : f.prox(g, rng.vector(n, 2.0));
          const double fq = f.value(q);
          if (!std::isfinite(fq)) continue;
          EXPECT_LE(best, fq + (x - q).squaredNorm() / (2 * g) + 1e-8) << f.name();
        }
      }
    }
  }
}

TEST(Catalog, FenchelYoungEqualityAtProx) {
  // p = prox_f x  =>  f(p) + f*(x - p) = <p, x - p>
  Rng rng(2);
  for (Index n : {1, 3}) {
    for (const ConvexFunction& f : catalog(n, rng)) {
      if (f.kind() == FunctionKind::linear) continue;  // dom f* is a point, equality is exact but x - p = c
      for (int k = 0; k < 20; ++k) {
        const Vector x = rng.vector(n, 2.0);
        const Vector p = f.prox(1.0, x);
        const double lhs = f.value(p) + f.conjugate().value(x - p);
        EXPECT_NEAR(lhs, p.dot(x - p), 1e-7 * std::max(1.0, std::abs(lhs))) << f.name();
        // and the inequality at random points
        const Vector y = rng.vector(n);
        const Vector z = f.prox(1.0, rng.vector(n, 2.0));
        const double fy = f.conjugate().value(y);
        if (std::isfinite(fy)) {
          EXPECT_GE(f.value(z) + fy, z.dot(y) - 1e-8) << f.name();
        }
      }
    }
  }
}

TEST(Catalog, BiconjugationIsInvolutive) {
  Rng rng(3);
  for (const ConvexFunction& f : catalog(3, rng)) {
    const ConvexFunction ff = f.conjugate().conjugate();
    EXPECT_FALSE(ff.is_conjugate());
    for (int k = 0; k < 20; ++k) {
      const Vector x = f.prox(1.0, rng.vector(3, 2.0));
      EXPECT_NEAR(ff.value(x), f.value(x), 1e-8);
    }
  }
}

TEST(MetricProx, IdentityMetricMatchesClosedForm) {
  Rng rng(4);
  for (const ConvexFunction& f0 : catalog(3, rng))
    for (const ConvexFunction& f : {f0, f0.conjugate()}) {
      const Vector x = rng.vector(3, 2.0);
      EXPECT_LE((prox_metric(f, Metric::identity(3), x) - f.prox(1.0, x)).norm(), 1e-10) << f.name();
    }
}

TEST(MetricProx, MoreauDecompositionWithDirectConjugateProx) {
  // prox^U_f = Id - U^{-1} prox^{U^{-1}}_{f*} U, with the right side evaluated
  // through the conjugate's own prox machinery
  Rng rng(5);
  int checked = 0;
  for (int k = 0; k < 15; ++k) {
    const Index n = rng.integer(1, 4);
    const Metric u = k % 3 == 0 ? Metric::diagonal(rng.vector(n).cwiseAbs().array() + 0.3)
                                : spd_sqrt(rng.spd(n));
    for (const ConvexFunction& f : catalog(n, rng)) {
      const Vector x = rng.vector(n, 2.0);
      const Vector lhs = prox_metric(f, u, x);
      const Vector dual = prox_metric(f.conjugate(), u.inverse(), u.apply(x));
      EXPECT_LE((lhs - (x - u.apply_inverse(dual))).norm(), 1e-8) << f.name();
      EXPECT_LE((conjugate_prox_metric(f, u, x) - prox_metric(f.conjugate(), u.inverse(), x)).norm(),
                1e-8)
          << f.name();
      ++checked;
    }
  }
  EXPECT_GE(checked, 100);
}

TEST(MetricProx, ConjugateExamples) {
  const Vector x = vec({2, -0.5});
  const Metric id = Metric::identity(2);
  EXPECT_LE((conjugate_prox_metric(squared_distance(Vector::Zero(2)), id, x) - x / 2).norm(), 1e-14);
  EXPECT_LE(conjugate_prox_metric(zero(2), id, x).norm(), 1e-15);
  EXPECT_LE((conjugate_prox_metric(l1(2, 1.0), id, x) - vec({1, -0.5})).norm(), 1e-15);
}

TEST(MetricProx, FirmlyNonexpansiveInMetric) {
  Rng rng(6);
  for (int k = 0; k < 5; ++k) {
    const Metric u = spd_sqrt(rng.spd(3));
    for (const ConvexFunction& f : catalog(3, rng)) {
      auto t = [&](const Vector& x) { return prox_metric(f, u, x); };
      EXPECT_LE(test::firm_nonexpansive_defect(t, 3, u.matrix(), rng), 1e-8) << f.name();
    }
  }
}

TEST(MetricProx, ChangeOfVariablesForQuadratics) {
  // prox^U_f = U^{-1/2} prox_{f o U^{-1/2}} U^{1/2}
  Rng rng(7);
  for (int k = 0; k < 20; ++k) {
    const Index n = rng.integer(1, 5);
    const Metric u = spd_sqrt(rng.spd(n));
    const Matrix a = rng.psd(n, rng.integer(1, static_cast<int>(n)));
    const Vector b = rng.vector(n);
    const Matrix s = u.inv_sqrt_matrix();
    const ConvexFunction fs = quadratic(s * a * s, s * b);
    const Vector x = rng.vector(n);
    const Vector via = s * fs.prox(1.0, u.sqrt_matrix() * x);
    EXPECT_LE((via - prox_metric(quadratic(a, b), u, x)).norm(), 1e-6);
  }
}
