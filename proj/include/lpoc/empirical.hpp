#ifndef LPOC_EMPIRICAL_HPP
#define LPOC_EMPIRICAL_HPP

#include "lpoc/core.hpp"

#include <string>
#include <vector>

namespace lpoc {

/// C series observed over T periods (rows = series, columns = periods).
struct SeriesPanel {
  std::vector<std::string> labels;
  MatrixXd values;

  Index series() const noexcept { return values.rows(); }
  Index periods() const noexcept { return values.cols(); }

  /// Throws InvalidArgument unless T >= 3, labels match and entries are finite.
  void validate() const;
};

struct AR1Params {
  VectorXd mu;
  VectorXd phi;    ///< each in [0, 1)
  VectorXd sigma;  ///< each > 0

  Index size() const noexcept { return mu.size(); }
  void validate() const;
};

/// Per-period innovations, one row per series; T - 1 columns for a T-period panel.
struct ErrorPanel {
  std::vector<std::string> labels;
  MatrixXd values;
  VectorXd sigma;

  Index series() const noexcept { return values.rows(); }
  Index observations() const noexcept { return values.cols(); }
};

struct AR1Fit {
  AR1Params params;
  ErrorPanel errors;
  /// Series whose residuals vanished; their sigma was floored at machine epsilon.
  std::vector<Index> constant_series;
};

/// Largest AR coefficient an estimate is projected onto.
inline constexpr double kMaxPhi = 0.999;

/// Conditional least-squares AR(1) fit per series.
///
/// Each series is regressed on its own lag over the T - 1 transitions,
/// g_t = a + b g_{t-1} + e_t. The slope is projected into [0, kMaxPhi]
/// (and the intercept re-fit given the projected slope), mu = a / (1 - phi),
/// and sigma is the residual RMS with denominator T - 1.
///
/// A series with zero residual variance throws ConstantSeries naming it,
/// unless `keep_constant` is set, in which case sigma is floored at machine
/// epsilon and the index is listed in `constant_series`.
AR1Fit fit_ar1(const SeriesPanel& panel, bool keep_constant = false);

/// Uncentered correlation of the error rows; positive semi-definite by
/// construction. Throws ZeroRow for an identically zero row.
CorrelationMatrix r_tilde_basic(const ErrorPanel& errors);
CorrelationMatrix r_tilde_basic(MatrixRef errors);

/// 0.99 * basic + 0.01 * I; smallest eigenvalue at least 0.01.
CorrelationMatrix r_tilde_pd(const CorrelationMatrix& basic);

}  // namespace lpoc

#endif  // LPOC_EMPIRICAL_HPP
