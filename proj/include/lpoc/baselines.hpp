#ifndef LPOC_BASELINES_HPP
#define LPOC_BASELINES_HPP

#include "lpoc/core.hpp"
#include "lpoc/empirical.hpp"

#include <string>
#include <vector>

namespace lpoc {

/// Sample correlation of the error rows. Uncentered by default (the error
/// mean is zero by model), which makes it identical to r_tilde_basic.
CorrelationMatrix pearson_estimate(const ErrorPanel& errors, bool centered = false);

struct LedoitWolfResult {
  CorrelationMatrix estimate;
  double intensity = 0.0;
  /// Names the intensity formula, for reports.
  static constexpr const char* kFormula =
      "delta = min(b2, d2) / d2; d2 = ||S - I||_F^2 / C; "
      "b2 = sum_t ||x_t x_t' - S||_F^2 / (n^2 C); x_t rows scaled to unit RMS";
};

/// Shrinks the uncentered sample correlation toward the identity with the
/// analytic Ledoit-Wolf intensity computed from RMS-standardized rows.
LedoitWolfResult ledoit_wolf_estimate(const ErrorPanel& errors);
LedoitWolfResult ledoit_wolf_estimate(MatrixRef errors);

struct CellErrors {
  double mae = 0.0;
  double mse = 0.0;
  Index cells = 0;
};

struct EstimatorErrors {
  std::string name;
  CellErrors all;
  CellErrors zero;     ///< cells where the truth is zero
  CellErrors nonzero;  ///< the remaining off-diagonal cells
};

struct ErrorReport {
  std::vector<EstimatorErrors> estimators;

  const EstimatorErrors& find(const std::string& name) const;
};

struct NamedEstimate {
  std::string name;
  MatrixXd values;
};

/// MAE and MSE over off-diagonal pairs (i < j) against the truth, overall
/// and split by `zero_mask`.
ErrorReport evaluate_estimates(const CorrelationMatrix& truth,
                               const std::vector<NamedEstimate>& estimates,
                               const BoolMatrix& zero_mask);

/// Cells whose true value is exactly zero.
BoolMatrix zero_mask_of(const CorrelationMatrix& truth);

}  // namespace lpoc

#endif  // LPOC_BASELINES_HPP
