#include "lpoc/baselines.hpp"

#include <algorithm>
#include <cmath>

namespace lpoc {

CorrelationMatrix pearson_estimate(const ErrorPanel& errors, bool centered) {
  if (!centered) return r_tilde_basic(errors);
  MatrixXd demeaned = errors.values.colwise() - errors.values.rowwise().mean();
  CorrelationMatrix r = r_tilde_basic(demeaned);
  return errors.labels.empty() ? r : r.with_labels(errors.labels);
}

LedoitWolfResult ledoit_wolf_estimate(MatrixRef errors) {
  const Index C = errors.rows();
  const Index n = errors.cols();
  if (n < 2) throw Error(ErrorKind::InvalidArgument, "Ledoit-Wolf needs at least 2 observations");

  const VectorXd rms = (errors.rowwise().squaredNorm() / static_cast<double>(n)).cwiseSqrt();
  for (Index c = 0; c < C; ++c) {
    if (!(rms(c) > 0.0)) throw Error(ErrorKind::ZeroRow, "series has identically zero errors", c);
  }
  const MatrixXd x = rms.cwiseInverse().asDiagonal() * errors;
  MatrixXd s = x * x.transpose() / static_cast<double>(n);
  s.diagonal().setOnes();

  const MatrixXd identity = MatrixXd::Identity(C, C);
  const double d2 = (s - identity).squaredNorm() / static_cast<double>(C);
  double b2 = 0.0;
  for (Index t = 0; t < n; ++t) {
    const VectorXd xt = x.col(t);
    b2 += (xt * xt.transpose() - s).squaredNorm();
  }
  b2 /= static_cast<double>(n) * static_cast<double>(n) * static_cast<double>(C);

  // A sample already at the target needs no shrinkage; report full intensity.
  const double intensity = d2 > 0.0 ? std::clamp(std::min(b2, d2) / d2, 0.0, 1.0) : 1.0;
  MatrixXd shrunk = intensity * identity + (1.0 - intensity) * s;
  return {CorrelationMatrix::unchecked(std::move(shrunk), intensity > 0.0), intensity};
}

LedoitWolfResult ledoit_wolf_estimate(const ErrorPanel& errors) {
  LedoitWolfResult r = ledoit_wolf_estimate(errors.values);
  if (!errors.labels.empty()) r.estimate = r.estimate.with_labels(errors.labels);
  return r;
}

const EstimatorErrors& ErrorReport::find(const std::string& name) const {
  for (const auto& e : estimators) {
    if (e.name == name) return e;
  }
  throw Error(ErrorKind::UnknownLabel, "no estimator named '" + name + "'");
}

BoolMatrix zero_mask_of(const CorrelationMatrix& truth) {
  BoolMatrix mask = truth.values().array() == 0.0;
  mask.diagonal().setConstant(false);
  return mask;
}

ErrorReport evaluate_estimates(const CorrelationMatrix& truth,
                               const std::vector<NamedEstimate>& estimates,
                               const BoolMatrix& zero_mask) {
  const Index C = truth.dim();
  if (zero_mask.rows() != C || zero_mask.cols() != C) {
    throw Error(ErrorKind::DimensionMismatch, "zero mask differs in dimension from the truth");
  }
  ErrorReport report;
  for (const auto& est : estimates) {
    if (est.values.rows() != C || est.values.cols() != C) {
      throw Error(ErrorKind::DimensionMismatch, "estimate '" + est.name + "' differs in dimension");
    }
    EstimatorErrors row{est.name, {}, {}, {}};
    for (Index j = 0; j < C; ++j) {
      for (Index i = 0; i < j; ++i) {
        const double err = est.values(i, j) - truth(i, j);
        CellErrors& cls = zero_mask(i, j) ? row.zero : row.nonzero;
        for (CellErrors* c : {&row.all, &cls}) {
          c->mae += std::abs(err);
          c->mse += err * err;
          ++c->cells;
        }
      }
    }
    for (CellErrors* c : {&row.all, &row.zero, &row.nonzero}) {
      if (c->cells > 0) {
        c->mae /= static_cast<double>(c->cells);
        c->mse /= static_cast<double>(c->cells);
      }
    }
    report.estimators.push_back(std::move(row));
  }
  return report;
}

}  // namespace lpoc
