#ifndef LPOC_LAMBDA_SELECT_HPP
#define LPOC_LAMBDA_SELECT_HPP

#include "lpoc/core.hpp"
#include "lpoc/solver.hpp"

#include <optional>
#include <vector>

namespace lpoc {

/// Mean shrinkage minus mean inflation of |R^| relative to |R~| over pairs
/// i < j. Pairs with equal magnitudes count in neither set; an empty set
/// contributes 0.
double k_criterion(const CorrelationMatrix& r_tilde, const CorrelationMatrix& r_hat);

struct ShrinkageSummary {
  double mean_shrinkage = 0.0;
  double mean_inflation = 0.0;
  Index shrunk = 0;
  Index inflated = 0;
};
ShrinkageSummary shrinkage_summary(MatrixRef r_tilde, MatrixRef r_hat);

/// Locally weighted linear regression with tricube weights over the
/// floor(span * n) nearest neighbours of each point; no robustness
/// iterations. Requires strictly increasing xs and at least 3 points.
std::vector<double> lowess_smooth(const std::vector<double>& xs, const std::vector<double>& ys,
                                  double span = 2.0 / 3.0);

struct LambdaSelectOptions {
  /// Number of error observations behind R~ (T - 1); lambda_eff = lambda / observations.
  double observations = 1.0;
  bool smoothing = true;
  double span = 2.0 / 3.0;
  /// Start each solve from the previous grid point's estimate.
  bool warm_start = true;
  bool keep_estimates = false;
  /// Worker threads for cold-start scans (0 = hardware concurrency).
  unsigned threads = 1;
};

struct LambdaScan {
  std::vector<double> grid;
  std::vector<double> k_values;  ///< -inf where the solve failed
  std::optional<std::vector<double>> smoothed_k;
  std::vector<bool> converged;
  double chosen_lambda = 0.0;
  std::size_t chosen_index = 0;
  std::optional<std::vector<CorrelationMatrix>> estimates;
};

/// Solves along a grid of lambda values and picks the maximizer of the
/// (optionally smoothed) k criterion, breaking ties toward smaller lambda.
LambdaScan select_lambda(const CorrelationMatrix& r_tilde, const PenaltyMatrix& p,
                         const std::vector<double>& grid, const SolverConfig& base,
                         const LambdaSelectOptions& options);

/// 0, step, 2 step, ..., up to `last` inclusive (within rounding).
std::vector<double> make_grid(double first, double last, double step);

}  // namespace lpoc

#endif  // LPOC_LAMBDA_SELECT_HPP
