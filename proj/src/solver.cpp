#include "lpoc/solver.hpp"

#include <algorithm>
#include <cmath>

namespace lpoc {

void SolverConfig::validate() const {
  auto fail = [](const char* what) { throw Error(ErrorKind::InvalidArgument, what); };
  if (!(lambda_eff >= 0.0) || !std::isfinite(lambda_eff)) fail("lambda_eff must be finite and >= 0");
  if (!(outer_tol > 0.0) || !(inner_tol > 0.0)) fail("tolerances must be positive");
  if (max_outer < 1 || max_inner < 1) fail("iteration caps must be positive");
  if (!(alpha0 > 0.0)) fail("alpha0 must be positive");
  if (!(beta > 0.0 && beta < 1.0)) fail("beta must lie in (0, 1)");
  if (!(c1 > 0.0 && c1 < 1.0)) fail("c1 must lie in (0, 1)");
  if (!(pd_floor >= 0.0)) fail("pd_floor must be >= 0");
  if (!(min_step > 0.0)) fail("min_step must be positive");
}

namespace {

double penalty_term(MatrixRef r, const PenaltyMatrix& p, double lambda_eff,
                    const std::optional<MatrixXd>& target) {
  if (lambda_eff == 0.0) return 0.0;
  MatrixXd diff = r;
  if (target) diff -= *target;
  diff.diagonal().setZero();
  return lambda_eff * (p.values().array() * diff.array().abs()).sum();
}

void check_dims(Index n, const CorrelationMatrix& r_tilde, const PenaltyMatrix& p,
                const std::optional<MatrixXd>& target) {
  if (r_tilde.dim() != n || p.dim() != n ||
      (target && (target->rows() != n || target->cols() != n))) {
    throw Error(ErrorKind::DimensionMismatch, "solver inputs differ in dimension");
  }
}

// Convexified objective around the tangent point, with the factorization of
// R already in hand.
double inner_objective(MatrixRef tangent_inverse, MatrixRef r, const SpdFactorization& f,
                       const CorrelationMatrix& r_tilde, const PenaltyMatrix& p,
                       const SolverConfig& config) {
  return inner_smooth_objective(tangent_inverse, r, f, r_tilde.values()) +
         penalty_term(r, p, config.lambda_eff, config.target);
}

MatrixXd threshold_step(MatrixRef r_current, MatrixRef gradient, const PenaltyMatrix& p,
                        double lambda_eff, double t, const std::optional<MatrixXd>& target) {
  MatrixXd moved = r_current - t * gradient;
  MatrixXd candidate = target ? MatrixXd(*target + soft_threshold(moved - *target,
                                                                    t * lambda_eff * p.values()))
                              : soft_threshold(moved, t * lambda_eff * p.values());
  return with_unit_diagonal(symmetric_part(candidate));
}

}  // namespace

double objective(MatrixRef r, const CorrelationMatrix& r_tilde, const PenaltyMatrix& p,
                 double lambda_eff, const std::optional<MatrixXd>& target) {
  check_dims(r.rows(), r_tilde, p, target);
  const SpdFactorization f = spd_factorize(r);
  const double trace = f.solve(r_tilde.values()).trace();
  return f.log_det() + trace + penalty_term(r, p, lambda_eff, target);
}

double inner_smooth_objective(MatrixRef r_inverse_at_tangent, MatrixRef r,
                              const SpdFactorization& r_factor, MatrixRef r_tilde) {
  // tr(A B) for symmetric A, B is the elementwise inner product.
  return (r_inverse_at_tangent.array() * r.array()).sum() + r_factor.solve(r_tilde).trace();
}

MatrixXd prox_step(MatrixRef r_current, MatrixRef r_tangent_inverse, MatrixRef r_tilde,
                   const PenaltyMatrix& p, double lambda_eff, double t,
                   const std::optional<MatrixXd>& target) {
  const SpdFactorization f = spd_factorize(r_current);
  const MatrixXd r_inv = f.inverse();
  const MatrixXd gradient = r_tangent_inverse - r_inv * r_tilde * r_inv;
  return threshold_step(r_current, gradient, p, lambda_eff, t, target);
}

InnerResult inner_solve(MatrixRef tangent, MatrixRef start, const CorrelationMatrix& r_tilde,
                        const PenaltyMatrix& p, const SolverConfig& config) {
  const Index n = tangent.rows();
  check_dims(n, r_tilde, p, config.target);
  const MatrixXd tangent_inverse = spd_factorize(tangent).inverse();
  const MatrixXd& rt = r_tilde.values();

  InnerResult result;
  result.estimate = start;
  SpdFactorization factor = spd_factorize(result.estimate);
  double f_current = inner_objective(tangent_inverse, result.estimate, factor, r_tilde, p, config);
  double alpha = config.alpha0;

  while (result.proposals < config.max_inner) {
    const MatrixXd r_inv = factor.inverse();
    const MatrixXd gradient = tangent_inverse - r_inv * rt * r_inv;

    MatrixXd candidate =
        threshold_step(result.estimate, gradient, p, config.lambda_eff, alpha, config.target);
    ++result.proposals;

    std::optional<SpdFactorization> candidate_factor;
    if (is_positive_definite(candidate, config.pd_floor)) {
      candidate_factor = try_spd_factorize(candidate);
    }
    if (!candidate_factor) {
      alpha *= config.beta;
      if (alpha < config.min_step) break;
      continue;
    }

    const double f_candidate =
        inner_objective(tangent_inverse, candidate, *candidate_factor, r_tilde, p, config);

    // Sufficient decrease with the nonsmooth direction term replaced by
    // twice the smooth gradient.
    const MatrixXd direction = (candidate - result.estimate) / alpha;
    const double armijo_bound =
        f_current + config.c1 * alpha * direction.squaredNorm() +
        2.0 * config.c1 * alpha * (gradient.array() * direction.array()).sum();

    const bool armijo = f_candidate <= armijo_bound && f_candidate <= f_current;
    const bool improved = f_candidate < f_current;
    if (!armijo && !improved) {
      alpha *= config.beta;
      if (alpha < config.min_step) break;
      continue;
    }

    const double change = std::abs(f_current - f_candidate) / std::max(1.0, std::abs(f_current));
    result.estimate = std::move(candidate);
    factor = std::move(*candidate_factor);
    f_current = f_candidate;
    result.objective_trace.push_back(f_current);
    ++result.steps;
    if (!armijo) alpha *= config.beta;

    if (change < config.inner_tol) {
      result.converged = true;
      break;
    }
    if (alpha < config.min_step) break;
  }

  if (alpha < config.min_step) {
    // A step that cannot shrink further without progress means no descent
    // direction remains from here; only flag it when nothing was accepted.
    result.step_underflow = result.steps == 0;
    result.converged = result.steps > 0;
  }
  return result;
}

SolveReport solve_lpoc(const CorrelationMatrix& r_tilde, const PenaltyMatrix& p,
                       const SolverConfig& config, const std::optional<MatrixXd>& start) {
  config.validate();
  const Index n = r_tilde.dim();
  check_dims(n, r_tilde, p, config.target);
  if (start && (start->rows() != n || start->cols() != n)) {
    throw Error(ErrorKind::DimensionMismatch, "warm start differs in dimension");
  }

  MatrixXd current = start ? *start : r_tilde.values();
  if (!is_positive_definite(current, config.pd_floor)) {
    throw Error(ErrorKind::NotPositiveDefinite, "solver start point is not strictly positive definite");
  }

  SolveReport report;
  double f_current = objective(current, r_tilde, p, config.lambda_eff, config.target);
  report.objective_trace.push_back(f_current);

  for (int outer = 0; outer < config.max_outer; ++outer) {
    InnerResult inner = inner_solve(current, current, r_tilde, p, config);
    report.inner_step_counts.push_back(inner.steps);
    report.step_underflow = report.step_underflow || inner.step_underflow;
    ++report.outer_iterations;

    const double f_next = objective(inner.estimate, r_tilde, p, config.lambda_eff, config.target);
    const double change = std::abs(f_current - f_next) / std::max(1.0, std::abs(f_current));
    current = std::move(inner.estimate);
    f_current = f_next;
    report.objective_trace.push_back(f_current);

    if (change < config.outer_tol) {
      report.converged = !report.step_underflow;
      break;
    }
  }

  report.estimate = validate_correlation(current, true, config.pd_floor)
                        .with_labels(r_tilde.labels());
  report.exact_zero_count = count_off_diagonal_zeros(report.estimate.values());
  return report;
}

}  // namespace lpoc
