#ifndef LPOC_FORECAST_HPP
#define LPOC_FORECAST_HPP

#include "lpoc/core.hpp"
#include "lpoc/empirical.hpp"

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace lpoc {

/// N trajectories of C series over H periods, stored trajectory-major.
class ProjectionEnsemble {
 public:
  ProjectionEnsemble() = default;
  ProjectionEnsemble(Index trajectories, Index horizon, std::vector<std::string> labels);

  Index trajectories() const noexcept { return n_; }
  Index horizon() const noexcept { return h_; }
  Index series() const noexcept { return static_cast<Index>(labels_.size()); }
  const std::vector<std::string>& labels() const noexcept { return labels_; }

  double& at(Index trajectory, Index period, Index series) {
    return data_[offset(trajectory, period, series)];
  }
  double at(Index trajectory, Index period, Index series) const {
    return data_[offset(trajectory, period, series)];
  }

  /// All trajectories' values for one (period, series) cell.
  std::vector<double> cell(Index period, Index series) const;

  /// Keeps only the listed trajectories, in order.
  ProjectionEnsemble select(const std::vector<Index>& trajectories) const;

  // Provenance
  AR1Params params;
  MatrixXd correlation;
  std::uint64_t seed = 0;

 private:
  std::size_t offset(Index t, Index p, Index s) const {
    return static_cast<std::size_t>((t * h_ + p) * series() + s);
  }

  Index n_ = 0;
  Index h_ = 0;
  std::vector<std::string> labels_;
  std::vector<double> data_;
};

/// Region -> series label -> weight per projection period. A single weight
/// applies to every period.
struct RegionWeights {
  std::map<std::string, std::map<std::string, std::vector<double>>> regions;

  double weight(const std::string& region, const std::string& label, Index period) const;
};

/// Per-region weighted-mean rates: values(trajectory, period).
struct RegionEnsembles {
  std::vector<std::string> regions;
  std::vector<MatrixXd> values;
};

/// Simulates N independent trajectories forward H periods from `g_last`
/// with errors ~ N(0, diag(sigma) R diag(sigma)). Each trajectory has its own
/// random stream, so the result depends on `seed` but not on `threads`.
ProjectionEnsemble project(const AR1Params& params, const CorrelationMatrix& r, VectorRef g_last,
                           Index horizon, Index trajectories, std::uint64_t seed,
                           const std::vector<std::string>& labels = {}, unsigned threads = 1);

/// Weighted mean of series rates per region, trajectory and period.
/// Throws UnknownLabel or AllZeroWeights.
RegionEnsembles aggregate(const ProjectionEnsemble& ensemble, const RegionWeights& weights);

/// Aggregates an observed H x C matrix (periods x series) the same way.
std::map<std::string, VectorXd> aggregate_observations(MatrixRef observed,
                                                       const std::vector<std::string>& labels,
                                                       const RegionWeights& weights);

/// Sample CRPS of an ensemble against one observation:
/// mean |X_i - x| - (1 / 2N^2) sum_ij |X_i - X_j|. Throws EmptyEnsemble.
double crps(std::span<const double> ensemble, double observation);

struct CrpsRow {
  std::string region;
  double model_a = 0.0;
  double model_b = 0.0;
  bool a_better = false;
  bool b_better = false;
};

/// Mean CRPS over periods for each region, for two ensembles scored
/// against the same observations (H x C, periods x series).
std::vector<CrpsRow> compare_models(const ProjectionEnsemble& a, const ProjectionEnsemble& b,
                                    MatrixRef observed, const RegionWeights& weights);

}  // namespace lpoc

#endif  // LPOC_FORECAST_HPP
