#include "lpoc/penalty.hpp"

#include "lpoc/empirical.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace lpoc {

// ---------------------------------------------------------------------------
// CovariateTable

CovariateTable::CovariateTable(std::vector<std::string> labels) : labels_(std::move(labels)) {}

void CovariateTable::set(const std::string& name, BoolMatrix indicator) {
  if (indicator.rows() != dim() || indicator.cols() != dim()) {
    throw Error(ErrorKind::DimensionMismatch, "indicator '" + name + "' has the wrong shape");
  }
  BoolMatrix sym = indicator.array() || indicator.transpose().array();
  sym.diagonal().setConstant(false);
  for (auto& [key, value] : indicators_) {
    if (key == name) {
      value = std::move(sym);
      return;
    }
  }
  indicators_.emplace_back(name, std::move(sym));
}

void CovariateTable::mark(const std::string& name, Index i, Index j, bool value) {
  if (i < 0 || j < 0 || i >= dim() || j >= dim()) {
    throw Error(ErrorKind::UnknownLabel, "pair index outside the table", i, j);
  }
  if (!contains(name)) set(name, BoolMatrix::Constant(dim(), dim(), false));
  for (auto& [key, m] : indicators_) {
    if (key == name && i != j) {
      m(i, j) = value;
      m(j, i) = value;
    }
  }
}

const BoolMatrix& CovariateTable::indicator(const std::string& name) const {
  for (const auto& [key, value] : indicators_) {
    if (key == name) return value;
  }
  throw Error(ErrorKind::UnknownCovariateName, "no covariate named '" + name + "'");
}

bool CovariateTable::contains(const std::string& name) const {
  return std::any_of(indicators_.begin(), indicators_.end(),
                     [&](const auto& kv) { return kv.first == name; });
}

std::vector<std::string> CovariateTable::names() const {
  std::vector<std::string> out;
  for (const auto& kv : indicators_) out.push_back(kv.first);
  return out;
}

// ---------------------------------------------------------------------------
// Null distribution

NullCorrelationCdf::NullCorrelationCdf(std::vector<double> xs, std::vector<double> fs, int n)
    : xs_(std::move(xs)), fs_(std::move(fs)), n_(n) {}

NullCorrelationCdf NullCorrelationCdf::analytic(int n, std::size_t cells) {
  if (n < 4) throw Error(ErrorKind::BadSampleSize, "null correlation CDF needs n >= 4");
  cells = std::max<std::size_t>(cells + (cells % 2), 2);
  const double exponent = 0.5 * (n - 4);
  auto density = [exponent](double r) {
    const double base = std::max(0.0, 1.0 - r * r);
    return exponent == 0.0 ? 1.0 : std::pow(base, exponent);
  };

  // Integrate the left half by Simpson's rule per cell and mirror, so that
  // F(-r) = 1 - F(r) holds exactly.
  const std::size_t half = cells / 2;
  const double h = 1.0 / static_cast<double>(half);
  std::vector<double> left(half + 1, 0.0);
  for (std::size_t k = 0; k < half; ++k) {
    const double a = -1.0 + static_cast<double>(k) * h;
    const double b = a + h;
    left[k + 1] = left[k] + h / 6.0 * (density(a) + 4.0 * density(0.5 * (a + b)) + density(b));
  }
  const double total = 2.0 * left[half];

  std::vector<double> xs(cells + 1), fs(cells + 1);
  for (std::size_t k = 0; k <= half; ++k) {
    xs[k] = -1.0 + static_cast<double>(k) * h;
    fs[k] = left[k] / total;
    xs[cells - k] = -xs[k];
    fs[cells - k] = 1.0 - fs[k];
  }
  xs[half] = 0.0;
  fs[half] = 0.5;
  return NullCorrelationCdf(std::move(xs), std::move(fs), n);
}

NullCorrelationCdf NullCorrelationCdf::monte_carlo(int n, Index dim, int replications,
                                                   std::uint64_t seed) {
  if (n < 2 || dim < 2 || replications < 1) {
    throw Error(ErrorKind::BadSampleSize, "Monte Carlo null needs n >= 2, dim >= 2, replications >= 1");
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z;
  std::vector<double> pooled;
  pooled.reserve(static_cast<std::size_t>(replications) * static_cast<std::size_t>(dim * (dim - 1) / 2));
  MatrixXd e(dim, n);
  for (int rep = 0; rep < replications; ++rep) {
    for (Index i = 0; i < dim; ++i)
      for (Index t = 0; t < n; ++t) e(i, t) = z(rng);
    const MatrixXd r = r_tilde_basic(e).values();
    for (Index j = 0; j < dim; ++j)
      for (Index i = 0; i < j; ++i) pooled.push_back(r(i, j));
  }
  std::sort(pooled.begin(), pooled.end());
  const double m = static_cast<double>(pooled.size());
  std::vector<double> xs{-1.0}, fs{0.0};
  for (std::size_t k = 0; k < pooled.size(); ++k) {
    if (pooled[k] <= xs.back()) continue;
    xs.push_back(pooled[k]);
    fs.push_back((static_cast<double>(k) + 0.5) / m);
  }
  if (xs.back() < 1.0) {
    xs.push_back(1.0);
    fs.push_back(1.0);
  } else {
    fs.back() = 1.0;
  }
  return NullCorrelationCdf(std::move(xs), std::move(fs), n);
}

double NullCorrelationCdf::operator()(double r) const {
  if (r <= xs_.front()) return 0.0;
  if (r >= xs_.back()) return 1.0;
  const auto it = std::upper_bound(xs_.begin(), xs_.end(), r);
  const std::size_t k = static_cast<std::size_t>(it - xs_.begin());
  const double w = (r - xs_[k - 1]) / (xs_[k] - xs_[k - 1]);
  return fs_[k - 1] + w * (fs_[k] - fs_[k - 1]);
}

double NullCorrelationCdf::quantile(double p) const {
  if (p <= 0.0) return xs_.front();
  if (p >= 1.0) return xs_.back();
  const auto it = std::lower_bound(fs_.begin(), fs_.end(), p);
  const std::size_t k = static_cast<std::size_t>(it - fs_.begin());
  if (k == 0) return xs_.front();
  const double span = fs_[k] - fs_[k - 1];
  const double w = span > 0.0 ? (p - fs_[k - 1]) / span : 0.0;
  return xs_[k - 1] + w * (xs_[k] - xs_[k - 1]);
}

// ---------------------------------------------------------------------------
// Kolmogorov-Smirnov

double kolmogorov_survival(double x) {
  if (x <= 0.0) return 1.0;
  constexpr double pi = std::numbers::pi;
  if (x < 1.18) {
    // Jacobi-theta form of the CDF converges fast for small x.
    const double y = -pi * pi / (8.0 * x * x);
    double sum = 0.0;
    for (int k = 1; k <= 7; k += 2) sum += std::exp(static_cast<double>(k * k) * y);
    return std::clamp(1.0 - std::sqrt(2.0 * pi) / x * sum, 0.0, 1.0);
  }
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * x * x);
    sum += (k % 2 == 1 ? term : -term);
    if (term < 1e-300) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ks_test(std::vector<double> sample, const NullCorrelationCdf& cdf) {
  if (sample.empty()) throw Error(ErrorKind::EmptySample, "KS test needs a nonempty sample");
  std::sort(sample.begin(), sample.end());
  const double m = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(sample[i]);
    d = std::max({d, (static_cast<double>(i) + 1.0) / m - f, f - static_cast<double>(i) / m});
  }
  return {d, kolmogorov_survival(std::sqrt(m) * d)};
}

ScreenReport screen_covariates(const CorrelationMatrix& r_tilde, const CovariateTable& table,
                               const NullCorrelationCdf& null, double threshold) {
  if (r_tilde.dim() != table.dim()) {
    throw Error(ErrorKind::DimensionMismatch, "covariate table and R~ differ in dimension");
  }
  ScreenReport report;
  report.threshold = threshold;
  report.sample_size = null.sample_size();
  for (const auto& name : table.names()) {
    const BoolMatrix& ind = table.indicator(name);
    std::vector<double> sample;
    for (Index j = 0; j < ind.cols(); ++j)
      for (Index i = 0; i < j; ++i)
        if (ind(i, j)) sample.push_back(r_tilde(i, j));
    if (sample.empty()) {
      report.skipped.push_back(name);
      continue;
    }
    const KsResult ks = ks_test(sample, null);
    CovariateScreen row{name, ks.statistic, ks.p_value, static_cast<Index>(sample.size()),
                        ks.p_value < threshold};
    if (row.selected) report.selected.push_back(name);
    report.covariates.push_back(std::move(row));
  }
  return report;
}

PenaltyMatrix build_penalty(const CovariateTable& table, const std::vector<std::string>& selected) {
  if (selected.empty()) {
    throw Error(ErrorKind::InvalidArgument, "build_penalty needs at least one selected covariate");
  }
  const Index n = table.dim();
  BoolMatrix close = BoolMatrix::Constant(n, n, false);
  for (const auto& name : selected) close = close.array() || table.indicator(name).array();
  MatrixXd p = (!close.array()).cast<double>().matrix();
  p.diagonal().setZero();
  return PenaltyMatrix(std::move(p));
}

}  // namespace lpoc
