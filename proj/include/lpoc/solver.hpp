#ifndef LPOC_SOLVER_HPP
#define LPOC_SOLVER_HPP

#include "lpoc/core.hpp"

#include <optional>
#include <vector>

namespace lpoc {

/// Settings for the penalized MAP correlation solve.
///
/// `lambda_eff` multiplies the full-matrix l1 norm ||P * (R - S)||_1, so each
/// off-diagonal pair contributes 2 * lambda_eff * P_ij * |R_ij - S_ij|.
/// Pipeline callers pass lambda / (T - 1).
struct SolverConfig {
  double lambda_eff = 0.0;
  std::optional<MatrixXd> target;  ///< shrinkage target S; zero off-diagonals when absent
  double outer_tol = 1e-7;
  double inner_tol = 1e-8;
  int max_outer = 100;
  int max_inner = 2000;
  double alpha0 = 1.0;
  double beta = 0.5;
  double c1 = 1e-4;
  double pd_floor = kPdFloor;
  /// Minimum step size before an inner solve gives up.
  double min_step = 1e-14;

  void validate() const;
};

struct SolveReport {
  CorrelationMatrix estimate;
  /// Objective at the start point followed by one value per outer iteration.
  std::vector<double> objective_trace;
  std::vector<int> inner_step_counts;
  int outer_iterations = 0;
  bool converged = false;
  /// Set when some inner solve shrank its step below `min_step` without accepting.
  bool step_underflow = false;
  Index exact_zero_count = 0;
};

/// Soft-thresholding S(X, A)_ij = sign(X_ij) * max(|X_ij| - A_ij, 0).
template <typename DerivedX, typename DerivedA>
typename DerivedX::PlainObject soft_threshold(const Eigen::MatrixBase<DerivedX>& x,
                                              const Eigen::MatrixBase<DerivedA>& a) {
  const auto mag = (x.array().abs() - a.array()).cwiseMax(0.0);
  return (x.array().sign() * mag).matrix();
}

/// log det R + tr(R^-1 R~) + lambda_eff * ||P * (R - S)||_1. Throws
/// NotPositiveDefinite when R has no Cholesky factor.
double objective(MatrixRef r, const CorrelationMatrix& r_tilde, const PenaltyMatrix& p,
                 double lambda_eff, const std::optional<MatrixXd>& target = std::nullopt);

/// Smooth part of the convexified problem around the tangent point:
/// tr(R_i^-1 R) + tr(R^-1 R~).
double inner_smooth_objective(MatrixRef r_inverse_at_tangent, MatrixRef r,
                              const SpdFactorization& r_factor, MatrixRef r_tilde);

/// One proximal gradient step for the convexified problem.
///
/// Moves R_current along -(R_i^-1 - R_current^-1 R~ R_current^-1) with step
/// t, soft-thresholds the off-diagonal toward the target by t * lambda_eff * P,
/// pins the diagonal at 1 and symmetrizes. The result is not necessarily
/// positive definite.
MatrixXd prox_step(MatrixRef r_current, MatrixRef r_tangent_inverse, MatrixRef r_tilde,
                   const PenaltyMatrix& p, double lambda_eff, double t,
                   const std::optional<MatrixXd>& target = std::nullopt);

struct InnerResult {
  MatrixXd estimate;
  std::vector<double> objective_trace;  ///< convexified objective after each accepted step
  int steps = 0;                        ///< accepted steps
  int proposals = 0;
  bool converged = false;
  bool step_underflow = false;
};

/// Minimizes tr(R_i^-1 R) + tr(R^-1 R~) + lambda_eff ||P * (R - S)||_1 by
/// proximal gradient with backtracking, starting from `start`.
///
/// Acceptance follows a modified Armijo rule: accept and keep the step when
/// the sufficient-decrease test holds, accept and shrink on plain
/// improvement, reject and shrink otherwise (including non-PD candidates).
InnerResult inner_solve(MatrixRef tangent, MatrixRef start, const CorrelationMatrix& r_tilde,
                        const PenaltyMatrix& p, const SolverConfig& config);

/// Majorize-minimize solve for the penalized MAP correlation estimate.
/// Starts at `start` when given (warm start) and at R~ otherwise.
SolveReport solve_lpoc(const CorrelationMatrix& r_tilde, const PenaltyMatrix& p,
                       const SolverConfig& config,
                       const std::optional<MatrixXd>& start = std::nullopt);

}  // namespace lpoc

#endif  // LPOC_SOLVER_HPP
