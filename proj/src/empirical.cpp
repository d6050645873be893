#include "lpoc/empirical.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace lpoc {

void SeriesPanel::validate() const {
  if (periods() < 3) {
    throw Error(ErrorKind::InvalidArgument, "series panel needs at least 3 periods");
  }
  if (series() < 1) throw Error(ErrorKind::InvalidArgument, "series panel is empty");
  if (!labels.empty() && static_cast<Index>(labels.size()) != series()) {
    throw Error(ErrorKind::DimensionMismatch, "label count does not match series count");
  }
  for (Index i = 0; i < series(); ++i) {
    for (Index t = 0; t < periods(); ++t) {
      if (!std::isfinite(values(i, t))) {
        throw Error(ErrorKind::InvalidArgument, "non-finite panel entry", i, t);
      }
    }
  }
}

void AR1Params::validate() const {
  if (phi.size() != mu.size() || sigma.size() != mu.size()) {
    throw Error(ErrorKind::DimensionMismatch, "AR(1) parameter vectors differ in length");
  }
  for (Index c = 0; c < mu.size(); ++c) {
    if (!(phi(c) >= 0.0 && phi(c) < 1.0)) {
      throw Error(ErrorKind::InvalidArgument, "phi must lie in [0, 1)", c);
    }
    if (!(sigma(c) >= 0.0) || !std::isfinite(mu(c))) {
      throw Error(ErrorKind::InvalidArgument, "sigma must be >= 0 and mu finite", c);
    }
  }
}

AR1Fit fit_ar1(const SeriesPanel& panel, bool keep_constant) {
  panel.validate();
  const Index C = panel.series();
  const Index n = panel.periods() - 1;

  AR1Fit fit;
  fit.params.mu.resize(C);
  fit.params.phi.resize(C);
  fit.params.sigma.resize(C);
  fit.errors.labels = panel.labels;
  fit.errors.values.resize(C, n);

  for (Index c = 0; c < C; ++c) {
    const VectorXd prev = panel.values.row(c).head(n).transpose();
    const VectorXd next = panel.values.row(c).tail(n).transpose();
    const double mean_prev = prev.mean();
    const double mean_next = next.mean();
    const double sxx = (prev.array() - mean_prev).square().sum();
    const double sxy = ((prev.array() - mean_prev) * (next.array() - mean_next)).sum();

    double slope = sxx > 0.0 ? sxy / sxx : 0.0;
    slope = std::clamp(slope, 0.0, kMaxPhi);
    const double intercept = mean_next - slope * mean_prev;

    const VectorXd resid = next.array() - intercept - slope * prev.array();
    double sigma = std::sqrt(resid.squaredNorm() / static_cast<double>(n));

    const double scale = std::max(1.0, panel.values.row(c).cwiseAbs().maxCoeff());
    if (sigma <= 1e-12 * scale) {
      if (!keep_constant) {
        throw Error(ErrorKind::ConstantSeries, "series has zero residual variance", c);
      }
      fit.constant_series.push_back(c);
      sigma = std::numeric_limits<double>::epsilon();
    }

    fit.params.phi(c) = slope;
    fit.params.mu(c) = intercept / (1.0 - slope);
    fit.params.sigma(c) = sigma;
    fit.errors.values.row(c) = resid.transpose();
  }
  fit.errors.sigma = fit.params.sigma;
  return fit;
}

CorrelationMatrix r_tilde_basic(MatrixRef errors) {
  const Index C = errors.rows();
  VectorXd norms = errors.rowwise().norm();
  for (Index c = 0; c < C; ++c) {
    if (!(norms(c) > 0.0)) throw Error(ErrorKind::ZeroRow, "series has identically zero errors", c);
  }
  const MatrixXd scaled = norms.cwiseInverse().asDiagonal() * errors;
  MatrixXd gram = scaled * scaled.transpose();
  // Rounding can push |entry| a hair past 1 for (anti)parallel rows.
  gram = gram.cwiseMax(-1.0).cwiseMin(1.0);
  return CorrelationMatrix::unchecked(std::move(gram));
}

CorrelationMatrix r_tilde_basic(const ErrorPanel& errors) {
  CorrelationMatrix r = r_tilde_basic(errors.values);
  return errors.labels.empty() ? r : r.with_labels(errors.labels);
}

CorrelationMatrix r_tilde_pd(const CorrelationMatrix& basic) {
  const Index C = basic.dim();
  MatrixXd blended = 0.99 * basic.values() + 0.01 * MatrixXd::Identity(C, C);
  return CorrelationMatrix::unchecked(std::move(blended), true, basic.labels());
}

}  // namespace lpoc
