#pragma once

#include <Eigen/Dense>

namespace monoprox {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

/// Tolerances and iteration budgets shared by every module.
///
/// All engines take a `ToleranceConfig` by const reference; the defaults are
/// the documented ones and any field can be overridden per call.
struct ToleranceConfig {
  // metric / factorization checks
  double symmetry = 1e-12;     ///< relative Frobenius asymmetry allowed for a metric
  double eigen_floor = 1e-10;  ///< smallest admissible metric eigenvalue
  double rank_relative = 1e-12;  ///< numerical-rank factor, cutoff = max(m,n) * smax * factor
  double monotone_floor = 1e-10;  ///< symmetric part of an affine operator must be >= -floor

  // inner iterative solvers (forward-backward, FISTA)
  double tol_fix = 1e-10;  ///< successive-iterate / fixed-point residual target
  int max_iter = 100000;
  int fista_restart = 200;
  double divergence_norm = 1e8;  ///< iterate norm that signals an empty solution set

  // non-attainment detection for generalized prox evaluations
  int stagnation_window = 1000;
  double stagnation_decrease = 1e-14;
  int escape_windows = 5;

  // power iteration
  int power_max_iter = 10000;
  double power_tol = 1e-12;

  // warped-resolvent diagnostics
  double witness_separation = 1e-6;  ///< two solutions closer than this are "equal"
  double witness_image = 1e-8;       ///< images closer than this are "equal"

  // ADMM
  double tol_admm = 1e-8;
  int admm_max_iter = 50000;
};

}  // namespace monoprox
