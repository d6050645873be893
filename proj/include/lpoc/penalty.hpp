#ifndef LPOC_PENALTY_HPP
#define LPOC_PENALTY_HPP

#include "lpoc/core.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace lpoc {

/// Named pairwise indicators over a common set of series labels. Each
/// indicator is symmetric with a false diagonal.
class CovariateTable {
 public:
  CovariateTable() = default;
  explicit CovariateTable(std::vector<std::string> labels);

  const std::vector<std::string>& labels() const noexcept { return labels_; }
  Index dim() const noexcept { return static_cast<Index>(labels_.size()); }

  /// Adds or replaces an indicator; symmetrizes by OR and clears the diagonal.
  void set(const std::string& name, BoolMatrix indicator);
  /// Marks one pair true under `name`, creating the indicator if needed.
  void mark(const std::string& name, Index i, Index j, bool value = true);

  const BoolMatrix& indicator(const std::string& name) const;
  bool contains(const std::string& name) const;
  std::vector<std::string> names() const;

 private:
  std::vector<std::string> labels_;
  std::vector<std::pair<std::string, BoolMatrix>> indicators_;
};

/// Piecewise-linear CDF of the sample correlation of independent normal
/// pairs, tabulated on [-1, 1].
class NullCorrelationCdf {
 public:
  /// Analytic null for `n` observations: density proportional to
  /// (1 - r^2)^((n - 4) / 2). Throws BadSampleSize for n < 4.
  static NullCorrelationCdf analytic(int n, std::size_t cells = 20000);

  /// Simulated null: pooled off-diagonal entries of uncentered correlation
  /// matrices of `dim` independent normal series with `n` observations.
  static NullCorrelationCdf monte_carlo(int n, Index dim, int replications, std::uint64_t seed);

  double operator()(double r) const;
  double quantile(double p) const;
  int sample_size() const noexcept { return n_; }

 private:
  NullCorrelationCdf(std::vector<double> xs, std::vector<double> fs, int n);

  std::vector<double> xs_;
  std::vector<double> fs_;
  int n_ = 0;
};

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

/// Survival function of the Kolmogorov distribution, P(K > x).
double kolmogorov_survival(double x);

/// One-sample KS test with the asymptotic sqrt(m) p-value. Throws EmptySample.
KsResult ks_test(std::vector<double> sample, const NullCorrelationCdf& cdf);

struct CovariateScreen {
  std::string name;
  double statistic = 0.0;
  double p_value = 1.0;
  Index pairs = 0;
  bool selected = false;
};

struct ScreenReport {
  std::vector<CovariateScreen> covariates;
  std::vector<std::string> selected;
  /// Indicators with no true pairs; excluded from screening.
  std::vector<std::string> skipped;
  double threshold = 0.05;
  int sample_size = 0;
};

/// KS-tests the R~ entries of the pairs flagged by each indicator against
/// the null correlation distribution and selects those with p < threshold.
ScreenReport screen_covariates(const CorrelationMatrix& r_tilde, const CovariateTable& table,
                               const NullCorrelationCdf& null, double threshold = 0.05);

/// P_ij = 0 when any selected indicator flags (i, j), else 1; zero diagonal.
PenaltyMatrix build_penalty(const CovariateTable& table, const std::vector<std::string>& selected);

}  // namespace lpoc

#endif  // LPOC_PENALTY_HPP
