#include "lpoc/forecast.hpp"

#include "lpoc/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace lpoc {

ProjectionEnsemble::ProjectionEnsemble(Index trajectories, Index horizon,
                                       std::vector<std::string> labels)
    : n_(trajectories), h_(horizon), labels_(std::move(labels)) {
  data_.assign(static_cast<std::size_t>(n_ * h_ * series()), 0.0);
}

std::vector<double> ProjectionEnsemble::cell(Index period, Index s) const {
  std::vector<double> out(static_cast<std::size_t>(n_));
  for (Index t = 0; t < n_; ++t) out[static_cast<std::size_t>(t)] = at(t, period, s);
  return out;
}

ProjectionEnsemble ProjectionEnsemble::select(const std::vector<Index>& trajectories) const {
  ProjectionEnsemble out(static_cast<Index>(trajectories.size()), h_, labels_);
  out.params = params;
  out.correlation = correlation;
  out.seed = seed;
  for (std::size_t k = 0; k < trajectories.size(); ++k) {
    const Index src = trajectories[k];
    if (src < 0 || src >= n_) throw Error(ErrorKind::InvalidArgument, "trajectory index out of range", src);
    for (Index p = 0; p < h_; ++p)
      for (Index s = 0; s < series(); ++s) out.at(static_cast<Index>(k), p, s) = at(src, p, s);
  }
  return out;
}

double RegionWeights::weight(const std::string& region, const std::string& label,
                             Index period) const {
  const auto r = regions.find(region);
  if (r == regions.end()) return 0.0;
  const auto l = r->second.find(label);
  if (l == r->second.end() || l->second.empty()) return 0.0;
  const auto& w = l->second;
  return w.size() == 1 ? w.front() : w.at(static_cast<std::size_t>(period));
}

ProjectionEnsemble project(const AR1Params& params, const CorrelationMatrix& r, VectorRef g_last,
                           Index horizon, Index trajectories, std::uint64_t seed,
                           const std::vector<std::string>& labels, unsigned threads) {
  params.validate();
  const Index C = params.size();
  if (r.dim() != C || g_last.size() != C) {
    throw Error(ErrorKind::DimensionMismatch, "projection inputs differ in dimension");
  }
  if (horizon < 1 || trajectories < 2) {
    throw Error(ErrorKind::InvalidArgument, "projection needs horizon >= 1 and >= 2 trajectories");
  }
  const MatrixXd l = spd_factorize(r.values()).factor();

  std::vector<std::string> names = labels.empty() ? r.labels() : labels;
  if (names.empty()) {
    for (Index c = 0; c < C; ++c) names.push_back("s" + std::to_string(c + 1));
  }
  ProjectionEnsemble ens(trajectories, horizon, std::move(names));
  ens.params = params;
  ens.correlation = r.values();
  ens.seed = seed;

  parallel_for(static_cast<std::size_t>(trajectories), threads, [&](std::size_t t) {
    std::mt19937_64 rng(stream_seed(seed, t));
    std::normal_distribution<double> z;
    VectorXd u(C);
    VectorXd g = g_last;
    for (Index p = 0; p < horizon; ++p) {
      for (Index c = 0; c < C; ++c) u(c) = z(rng);
      g = params.mu + params.phi.cwiseProduct(g - params.mu) + params.sigma.cwiseProduct(l * u);
      for (Index c = 0; c < C; ++c) ens.at(static_cast<Index>(t), p, c) = g(c);
    }
  });
  return ens;
}

namespace {

// Normalized weight matrix (periods x series) for one region, validated against labels.
MatrixXd region_weights(const std::string& region,
                        const std::map<std::string, std::vector<double>>& members,
                        const std::vector<std::string>& labels, Index horizon) {
  MatrixXd w = MatrixXd::Zero(horizon, static_cast<Index>(labels.size()));
  for (const auto& [label, values] : members) {
    const auto it = std::find(labels.begin(), labels.end(), label);
    if (it == labels.end()) {
      throw Error(ErrorKind::UnknownLabel, "region '" + region + "' names unknown series '" + label + "'");
    }
    const Index c = static_cast<Index>(it - labels.begin());
    if (values.size() != 1 && static_cast<Index>(values.size()) < horizon) {
      throw Error(ErrorKind::ShapeMismatch, "weights for '" + label + "' do not cover the horizon");
    }
    for (Index p = 0; p < horizon; ++p) {
      const double v = values.size() == 1 ? values.front() : values[static_cast<std::size_t>(p)];
      if (!(v >= 0.0)) throw Error(ErrorKind::InvalidArgument, "weights must be nonnegative", c, p);
      w(p, c) = v;
    }
  }
  for (Index p = 0; p < horizon; ++p) {
    const double total = w.row(p).sum();
    if (!(total > 0.0)) {
      throw Error(ErrorKind::AllZeroWeights, "region '" + region + "' has no positive weight", p);
    }
    w.row(p) /= total;
  }
  return w;
}

}  // namespace

RegionEnsembles aggregate(const ProjectionEnsemble& ensemble, const RegionWeights& weights) {
  RegionEnsembles out;
  const Index H = ensemble.horizon();
  for (const auto& [region, members] : weights.regions) {
    const MatrixXd w = region_weights(region, members, ensemble.labels(), H);
    MatrixXd values(ensemble.trajectories(), H);
    for (Index t = 0; t < ensemble.trajectories(); ++t) {
      for (Index p = 0; p < H; ++p) {
        double num = 0.0;
        for (Index c = 0; c < ensemble.series(); ++c) num += w(p, c) * ensemble.at(t, p, c);
        values(t, p) = num;
      }
    }
    out.regions.push_back(region);
    out.values.push_back(std::move(values));
  }
  return out;
}

std::map<std::string, VectorXd> aggregate_observations(MatrixRef observed,
                                                       const std::vector<std::string>& labels,
                                                       const RegionWeights& weights) {
  if (observed.cols() != static_cast<Index>(labels.size())) {
    throw Error(ErrorKind::ShapeMismatch, "observation columns do not match labels");
  }
  std::map<std::string, VectorXd> out;
  for (const auto& [region, members] : weights.regions) {
    const MatrixXd w = region_weights(region, members, labels, observed.rows());
    VectorXd v(observed.rows());
    for (Index p = 0; p < observed.rows(); ++p) {
      v(p) = w.row(p).dot(observed.row(p));
    }
    out.emplace(region, std::move(v));
  }
  return out;
}

double crps(std::span<const double> ensemble, double observation) {
  if (ensemble.empty()) throw Error(ErrorKind::EmptyEnsemble, "CRPS needs at least one member");
  std::vector<double> x(ensemble.begin(), ensemble.end());
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double abs_obs = 0.0;
  double spread = 0.0;
  // sum_ij |X_i - X_j| = 2 sum_i (2i - n - 1) X_(i) with 1-based order statistics.
  for (std::size_t i = 0; i < x.size(); ++i) {
    abs_obs += std::abs(x[i] - observation);
    spread += (2.0 * static_cast<double>(i + 1) - n - 1.0) * x[i];
  }
  return std::max(0.0, abs_obs / n - spread / (n * n));
}

std::vector<CrpsRow> compare_models(const ProjectionEnsemble& a, const ProjectionEnsemble& b,
                                    MatrixRef observed, const RegionWeights& weights) {
  if (a.horizon() != b.horizon() || a.labels() != b.labels() || observed.rows() != a.horizon() ||
      observed.cols() != a.series()) {
    throw Error(ErrorKind::ShapeMismatch, "ensembles and observations do not share a shape");
  }
  const RegionEnsembles ra = aggregate(a, weights);
  const RegionEnsembles rb = aggregate(b, weights);
  const auto obs = aggregate_observations(observed, a.labels(), weights);

  std::vector<CrpsRow> rows;
  for (std::size_t k = 0; k < ra.regions.size(); ++k) {
    const VectorXd& o = obs.at(ra.regions[k]);
    CrpsRow row;
    row.region = ra.regions[k];
    for (Index p = 0; p < a.horizon(); ++p) {
      const VectorXd ca = ra.values[k].col(p);
      const VectorXd cb = rb.values[k].col(p);
      row.model_a += crps({ca.data(), static_cast<std::size_t>(ca.size())}, o(p));
      row.model_b += crps({cb.data(), static_cast<std::size_t>(cb.size())}, o(p));
    }
    row.model_a /= static_cast<double>(a.horizon());
    row.model_b /= static_cast<double>(a.horizon());
    row.a_better = row.model_a < row.model_b;
    row.b_better = row.model_b < row.model_a;
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace lpoc
