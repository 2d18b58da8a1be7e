#include <gtest/gtest.h>

#include <sstream>

#include "monoprox/linalg.hpp"
#include "monoprox/matrix_io.hpp"
#include "support.hpp"

using namespace monoprox;
using monoprox::test::Rng;

namespace {

Matrix mat(std::initializer_list<std::initializer_list<double>> rows) {
  Matrix m(rows.size(), rows.begin()->size());
  Index i = 0;
  for (auto r : rows) {
    Index j = 0;
    for (double v : r) m(i, j++) = v;
    ++i;
  }
  return m;
}

Vector vec(std::initializer_list<double> v) {
  Vector out(v.size());
  Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

void expect_moore_penrose(const Matrix& m, const Matrix& p, double tol) {
  EXPECT_LE((m * p * m - m).norm(), tol);
  EXPECT_LE((p * m * p - p).norm(), tol);
  EXPECT_LE(((m * p).transpose() - m * p).norm(), tol);
  EXPECT_LE(((p * m).transpose() - p * m).norm(), tol);
}

}  // namespace

TEST(SpdSqrt, DiagonalAndIdentity) {
  const Metric d = spd_sqrt(Vector(vec({4, 9})).asDiagonal().toDenseMatrix());
  EXPECT_EQ(d.sqrt_matrix(), Matrix(vec({2, 3}).asDiagonal()));
  EXPECT_DOUBLE_EQ(d.mu(), 4.0);
  const Metric id = spd_sqrt(Matrix::Identity(3, 3));
  EXPECT_EQ(id.sqrt_matrix(), Matrix::Identity(3, 3));
  EXPECT_DOUBLE_EQ(id.mu(), 1.0);
}

TEST(SpdSqrt, TwoByTwoCachesAreConsistent) {
  const Matrix u = mat({{2, 1}, {1, 2}});
  const Metric m = spd_sqrt(u);
  EXPECT_NEAR(m.mu(), 1.0, 1e-12);
  EXPECT_LE((m.sqrt_matrix() * m.sqrt_matrix() - u).norm(), 1e-10);
  EXPECT_LE((u * m.inverse_matrix() - Matrix::Identity(2, 2)).norm(), 1e-10);
  EXPECT_LE((m.inv_sqrt_matrix() * m.sqrt_matrix() - Matrix::Identity(2, 2)).norm(), 1e-10);
}

TEST(SpdSqrt, Rejections) {
  EXPECT_THROW(spd_sqrt(mat({{1, 2}, {0, 1}})), NotSymmetric);
  EXPECT_THROW(spd_sqrt(mat({{1, 0}, {0, 0}})), NotPositiveDefinite);
  EXPECT_THROW(spd_sqrt(mat({{1, 2}, {2, 1}})), NotPositiveDefinite);
}

TEST(SpdSqrt, RandomSquareRootsAreSymmetricPsd) {
  Rng rng(7);
  for (int k = 0; k < 50; ++k) {
    const Index n = rng.integer(1, 8);
    const Matrix u = rng.spd(n, 0.1, 10.0);
    const Metric m = spd_sqrt(u);
    const Matrix& s = m.sqrt_matrix();
    EXPECT_LE((s - s.transpose()).norm(), 1e-10);
    Eigen::SelfAdjointEigenSolver<Matrix> eig(s);
    EXPECT_GE(eig.eigenvalues().minCoeff(), 0.0);
    EXPECT_LE((s * s - u).norm(), 1e-10 * u.norm());
    const Metric inv = m.inverse();
    EXPECT_LE((inv.matrix() * u - Matrix::Identity(n, n)).norm(), 1e-9);
  }
}

TEST(Pseudoinverse, Examples) {
  const Matrix p = mat({{1, 0}, {0, 0}});
  EXPECT_LE((pseudoinverse(LinearMap(p)).matrix() - p).norm(), 1e-14);
  EXPECT_NEAR(pseudoinverse(LinearMap(mat({{2}}))).matrix()(0, 0), 0.5, 1e-15);
  const Matrix l = mat({{1, 1}});
  const Matrix lp = pseudoinverse(LinearMap(l)).matrix();
  EXPECT_LE((lp - mat({{0.5}, {0.5}})).norm(), 1e-12);
  expect_moore_penrose(l, lp, 1e-8);
}

TEST(Pseudoinverse, RandomRanksSatisfyMoorePenrose) {
  Rng rng(11);
  for (int k = 0; k < 60; ++k) {
    const Index r = rng.integer(1, 7), c = rng.integer(1, 7);
    const Index rank = rng.integer(0, std::min(r, c));
    const Matrix m = rng.matrix_of_rank(r, c, rank);
    const Matrix p = pseudoinverse(LinearMap(m)).matrix();
    expect_moore_penrose(m, p, 1e-8 * std::max(1.0, m.norm() * p.norm()));
    EXPECT_EQ(numerical_rank(m), rank);
    if (rank == c) {
      const Matrix normal = (m.transpose() * m).inverse() * m.transpose();
      EXPECT_LE((p - normal).norm(), 1e-8 * std::max(1.0, p.norm()));
    }
  }
}

TEST(Svd, ReconstructionAndDescendingValues) {
  Rng rng(3);
  const Matrix m = rng.matrix(5, 3);
  const SvdFactors f = svd(m);
  EXPECT_LE((f.left * f.singular_values.asDiagonal() * f.right.transpose() - m).norm(),
            1e-10 * m.norm());
  for (Index i = 1; i < f.singular_values.size(); ++i)
    EXPECT_GE(f.singular_values(i - 1), f.singular_values(i));
}

TEST(MetricProjection, EuclideanExamples) {
  const LinearMap m(mat({{1, 0}, {0, 0}}));
  const Metric id = Metric::identity(2);
  const Vector x = vec({3, -4});
  EXPECT_LE((project_kernel_metric(m, id, x) - vec({0, -4})).norm(), 1e-14);
  EXPECT_LE((project_range_metric(m, id, x) - vec({3, 0})).norm(), 1e-14);

  Rng rng(5);
  const LinearMap inj(rng.matrix(4, 2));
  const Metric u = spd_sqrt(rng.spd(2));
  EXPECT_LE(project_kernel_metric(inj, u, rng.vector(2)).norm(), 1e-10);
  EXPECT_LE(project_range_metric(LinearMap::zero(3, 2), u, rng.vector(2)).norm(), 1e-14);
}

TEST(MetricProjection, WeightedRowVector) {
  // y = x - t U M* with M y = 0: t = (M x) / (M U M*) = 1/5
  const LinearMap m(mat({{1, 1}}));
  const Metric u = Metric::diagonal(vec({1, 4}));
  const Vector x = vec({1, 0});
  const double t = 1.0 / 5.0;
  const Vector expected = x - t * vec({1, 4});
  const Vector y = project_kernel_metric(m, u, x);
  EXPECT_LE((y - expected).norm(), 1e-12);
  EXPECT_NEAR(y.sum(), 0.0, 1e-12);
  EXPECT_LE((project_range_metric(m, u, x) - t * vec({1, 4})).norm(), 1e-12);
}

TEST(MetricProjection, RandomInvariants) {
  Rng rng(17);
  for (int k = 0; k < 40; ++k) {
    const Index g = rng.integer(1, 6), h = rng.integer(1, 6);
    const LinearMap m(rng.matrix_of_rank(h, g, rng.integer(0, std::min(g, h))));
    const Metric u = spd_sqrt(rng.spd(g));
    for (int s = 0; s < 100 / 40 + 2; ++s) {
      const Vector x = rng.vector(g);
      const MetricSplit sp = split_metric(m, u, x);
      EXPECT_LE((sp.kernel_part + sp.range_part - x).norm(), 1e-12 * std::max(1.0, x.norm()));
      EXPECT_LE(m.apply(sp.kernel_part).norm(), 1e-8);
      const Vector twice = project_kernel_metric(m, u, sp.kernel_part);
      EXPECT_LE((twice - sp.kernel_part).norm(), 1e-8);
      EXPECT_NEAR(sp.kernel_part.dot(u.apply_inverse(sp.range_part)), 0.0, 1e-8);
    }
  }
}

TEST(MetricProjection, HundredRandomVectorsSumToIdentity) {
  Rng rng(19);
  const LinearMap m(rng.matrix_of_rank(3, 5, 2));
  const Metric u = spd_sqrt(rng.spd(5));
  for (int k = 0; k < 100; ++k) {
    const Vector x = rng.vector(5);
    EXPECT_LE((project_kernel_metric(m, u, x) + project_range_metric(m, u, x) - x).norm(), 1e-8);
  }
}

TEST(OperatorNorm, Examples) {
  EXPECT_NEAR(operator_norm(mat({{3, 0}, {0, 1}})), 3.0, 1e-8);
  EXPECT_EQ(operator_norm(Matrix::Zero(2, 3)), 0.0);
  EXPECT_NEAR(operator_norm(mat({{1, 1}})), std::sqrt(2.0), 1e-8 * std::sqrt(2.0));
}

TEST(OperatorNorm, MatchesLargestSingularValue) {
  Rng rng(23);
  for (int k = 0; k < 30; ++k) {
    const Matrix m = rng.matrix(rng.integer(1, 8), rng.integer(1, 8));
    const double sigma = svd(m).singular_values(0);
    EXPECT_NEAR(operator_norm(m), sigma, 1e-8 * sigma);
  }
}

TEST(LinearMap, AdjointIsInvolutive) {
  Rng rng(29);
  const LinearMap m(rng.matrix(3, 5));
  EXPECT_EQ(m.adjoint().adjoint().matrix(), m.matrix());
  EXPECT_EQ(m.apply(rng.vector(5)).size(), 3);
  EXPECT_EQ(m.apply_adjoint(rng.vector(3)).size(), 5);
  EXPECT_THROW(m.apply(rng.vector(3)), DimensionMismatch);
}

TEST(MatrixIo, RoundTripAndErrors) {
  Rng rng(31);
  const Matrix m = rng.matrix(3, 4);
  std::stringstream ss;
  write_matrix(ss, m);
  EXPECT_EQ(read_matrix(ss), m);

  std::istringstream bad("2 2\n1 2\n3\n");
  int line = 0;
  try {
    read_matrix(bad, line);
    FAIL() << "expected FormatError";
  } catch (const FormatError& e) {
    EXPECT_EQ(e.line(), 3);
  }
}
