#pragma once

// Seeded random instances and independent checks shared by the test suites.

#include <cmath>
#include <functional>
#include <random>

#include <gtest/gtest.h>

#include "monoprox/config.hpp"
#include "monoprox/linalg.hpp"

namespace monoprox::test {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  double uniform(double lo = -1.0, double hi = 1.0) {
    return std::uniform_real_distribution<double>(lo, hi)(gen_);
  }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(gen_); }
  double gaussian() { return std::normal_distribution<double>(0.0, 1.0)(gen_); }

  Vector vector(Index n, double scale = 1.0) {
    Vector v(n);
    for (Index i = 0; i < n; ++i) v(i) = scale * gaussian();
    return v;
  }
  Matrix matrix(Index r, Index c) {
    Matrix m(r, c);
    for (Index i = 0; i < r; ++i)
      for (Index j = 0; j < c; ++j) m(i, j) = gaussian();
    return m;
  }
  /// r x c matrix of the given rank.
  Matrix matrix_of_rank(Index r, Index c, Index rank) {
    if (rank == 0) return Matrix::Zero(r, c);
    return matrix(r, rank) * matrix(rank, c);
  }
  /// SPD with eigenvalues in [lo, hi].
  Matrix spd(Index n, double lo = 0.5, double hi = 3.0) {
    Eigen::HouseholderQR<Matrix> qr(matrix(n, n));
    const Matrix q = qr.householderQ();
    Vector d(n);
    for (Index i = 0; i < n; ++i) d(i) = uniform(lo, hi);
    Matrix u = q * d.asDiagonal() * q.transpose();
    return 0.5 * (u + u.transpose());
  }
  Matrix psd(Index n, Index rank) {
    const Matrix b = matrix(n, rank);
    return b * b.transpose();
  }
  /// Monotone, not necessarily symmetric: PSD plus skew.
  Matrix monotone(Index n) {
    const Matrix s = matrix(n, n);
    return psd(n, n) / static_cast<double>(n) + (s - s.transpose()) / 2.0;
  }

 private:
  std::mt19937_64 gen_;
};

/// max over pairs of ||Tx - Ty||_W^2 - <x - y, Tx - Ty>_W (<= 0 for firmly
/// nonexpansive T in the W geometry).
inline double firm_nonexpansive_defect(const std::function<Vector(const Vector&)>& t, Index n,
                                       const Matrix& w, Rng& rng, int pairs = 100,
                                       double scale = 2.0) {
  double worst = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < pairs; ++k) {
    const Vector x = rng.vector(n, scale), y = rng.vector(n, scale);
    const Vector d = t(x) - t(y);
    worst = std::max(worst, d.dot(w * d) - (x - y).dot(w * d));
  }
  return worst;
}

}  // namespace monoprox::test
