#include "doctest.h"

#include "lpoc/forecast.hpp"

#include <algorithm>
#include <cmath>
#include <random>

using namespace lpoc;

namespace {

// Integral of (F_N(y) - 1{y >= x})^2 over the real line, evaluated exactly
// between consecutive breakpoints.
double crps_integral(std::vector<double> ens, double x) {
  std::vector<double> pts = ens;
  pts.push_back(x);
  std::sort(pts.begin(), pts.end());
  std::sort(ens.begin(), ens.end());
  const double n = static_cast<double>(ens.size());
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
    const double mid = 0.5 * (pts[k] + pts[k + 1]);
    const double f = static_cast<double>(std::upper_bound(ens.begin(), ens.end(), mid) - ens.begin()) / n;
    const double h = mid >= x ? 1.0 : 0.0;
    total += (f - h) * (f - h) * (pts[k + 1] - pts[k]);
  }
  return total;
}

AR1Params params(Index c, double phi, double sigma) {
  return {VectorXd::Zero(c), VectorXd::Constant(c, phi), VectorXd::Constant(c, sigma)};
}

}  // namespace

TEST_CASE("crps examples") {
  const std::vector<double> two{0.0, 1.0};
  CHECK(crps(two, 1.0) == doctest::Approx(0.25));
  const std::vector<double> one{2.0};
  CHECK(crps(one, 5.0) == doctest::Approx(3.0));
  const std::vector<double> same{1.0, 1.0, 1.0};
  CHECK(crps(same, 1.0) == 0.0);
  CHECK_THROWS_AS(crps(std::vector<double>{}, 0.0), Error);
}

TEST_CASE("crps matches the integral form") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> z;
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<double> e(1 + rep);
    for (double& v : e) v = z(rng);
    const double x = z(rng);
    CHECK(crps(e, x) == doctest::Approx(crps_integral(e, x)).epsilon(1e-10));
  }
}

TEST_CASE("projection is reproducible and follows the recursion") {
  const CorrelationMatrix r = CorrelationMatrix::identity(2);
  const VectorXd g = VectorXd::Constant(2, 1.0);
  const ProjectionEnsemble a = project(params(2, 0.5, 0.2), r, g, 4, 10, 9);
  const ProjectionEnsemble b = project(params(2, 0.5, 0.2), r, g, 4, 10, 9);
  CHECK(a.at(3, 2, 1) == b.at(3, 2, 1));
  CHECK(a.labels() == std::vector<std::string>{"s1", "s2"});

  const ProjectionEnsemble d = project(params(2, 0.5, 0.0), r, g, 3, 2, 1);
  CHECK(d.at(0, 0, 0) == doctest::Approx(0.5));
  CHECK(d.at(1, 2, 1) == doctest::Approx(0.125));

  CHECK_THROWS_AS(project(params(3, 0.5, 1.0), r, g, 3, 5, 0), Error);

  const ProjectionEnsemble threaded = project(params(2, 0.5, 0.2), r, g, 4, 10, 9, {}, 3);
  for (Index t = 0; t < 10; ++t)
    for (Index p = 0; p < 4; ++p)
      for (Index c = 0; c < 2; ++c) CHECK(threaded.at(t, p, c) == a.at(t, p, c));
}

TEST_CASE("correlation widens the spread of sums but not of marginals") {
  MatrixXd m(2, 2);
  m << 1, 0.7, 0.7, 1;
  const Index n = 10000;
  const AR1Params par{VectorXd::Zero(2), VectorXd::Constant(2, 0.5), VectorXd(Eigen::Vector2d(1.0, 2.0))};
  const ProjectionEnsemble ind = project(par, CorrelationMatrix::identity(2), VectorXd::Zero(2), 1, n, 4);
  const ProjectionEnsemble cor = project(par, validate_correlation(m), VectorXd::Zero(2), 1, n, 5);
  auto var = [n](const std::vector<double>& v) {
    double s = 0, ss = 0;
    for (double x : v) { s += x; ss += x * x; }
    return (ss - s * s / n) / (n - 1);
  };
  auto sum_var = [&](const ProjectionEnsemble& e) {
    std::vector<double> s(static_cast<std::size_t>(n));
    for (Index t = 0; t < n; ++t) s[static_cast<std::size_t>(t)] = e.at(t, 0, 0) + e.at(t, 0, 1);
    return var(s);
  };
  // Var(x + y) = 1 + 4 + 2 rho 2; the sampling sd of a variance estimate is about v sqrt(2 / n).
  const double v_ind = 5.0;
  const double v_cor = 5.0 + 4.0 * 0.7;
  CHECK(std::abs(sum_var(ind) - v_ind) < 3.0 * v_ind * std::sqrt(2.0 / n));
  CHECK(std::abs(sum_var(cor) - v_cor) < 3.0 * v_cor * std::sqrt(2.0 / n));
  CHECK(sum_var(cor) > sum_var(ind));
  for (const ProjectionEnsemble* e : {&ind, &cor}) {
    CHECK(std::abs(var(e->cell(0, 0)) - 1.0) < 3.0 * std::sqrt(2.0 / n));
    CHECK(std::abs(var(e->cell(0, 1)) - 4.0) < 3.0 * 4.0 * std::sqrt(2.0 / n));
  }
}

TEST_CASE("projection reproduces the error correlation") {
  MatrixXd m(2, 2);
  m << 1, 0.6, 0.6, 1;
  const ProjectionEnsemble e =
      project(params(2, 0.0, 1.0), validate_correlation(m), VectorXd::Zero(2), 1, 50000, 3);
  const auto x = e.cell(0, 0);
  const auto y = e.cell(0, 1);
  double xy = 0, xx = 0, yy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    xy += x[i] * y[i];
    xx += x[i] * x[i];
    yy += y[i] * y[i];
  }
  CHECK(xy / std::sqrt(xx * yy) == doctest::Approx(0.6).epsilon(0.03));
}

TEST_CASE("aggregation and model comparison") {
  ProjectionEnsemble a(2, 1, {"x", "y"});
  a.at(0, 0, 0) = 1.0;
  a.at(0, 0, 1) = 3.0;
  a.at(1, 0, 0) = 2.0;
  a.at(1, 0, 1) = 2.0;

  RegionWeights w;
  w.regions["all"] = {{"x", {1.0}}, {"y", {3.0}}};
  w.regions["just_x"] = {{"x", {2.0}}};
  const RegionEnsembles agg = aggregate(a, w);
  REQUIRE(agg.regions == std::vector<std::string>{"all", "just_x"});
  CHECK(agg.values[0](0, 0) == doctest::Approx(2.5));
  CHECK(agg.values[0](1, 0) == doctest::Approx(2.0));
  CHECK(agg.values[1](0, 0) == doctest::Approx(1.0));

  MatrixXd obs(1, 2);
  obs << 1.0, 3.0;
  ProjectionEnsemble exact = a;
  exact.at(1, 0, 0) = 1.0;
  exact.at(1, 0, 1) = 3.0;
  const auto rows = compare_models(exact, a, obs, w);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].model_a == 0.0);
  CHECK(rows[0].a_better);
  CHECK_FALSE(rows[0].b_better);

  RegionWeights pair;
  pair.regions["eq"] = {{"x", {1.0}}, {"y", {1.0}}};
  pair.regions["w13"] = {{"x", {1.0}}, {"y", {3.0}}};
  ProjectionEnsemble rates(2, 1, {"x", "y"});
  rates.at(0, 0, 0) = 2.0;
  rates.at(0, 0, 1) = 4.0;
  rates.at(1, 0, 0) = 0.0;
  rates.at(1, 0, 1) = 4.0;
  const RegionEnsembles pr = aggregate(rates, pair);
  CHECK(pr.values[0](0, 0) == doctest::Approx(3.0));
  CHECK(pr.values[1](1, 0) == doctest::Approx(3.0));

  const auto same = compare_models(a, a, obs, w);
  for (const auto& row : same) {
    CHECK(row.model_a == row.model_b);
    CHECK_FALSE(row.a_better);
    CHECK_FALSE(row.b_better);
  }

  RegionWeights bad;
  bad.regions["r"] = {{"z", {1.0}}};
  CHECK_THROWS_AS(aggregate(a, bad), Error);
  RegionWeights zero;
  zero.regions["r"] = {{"x", {0.0}}};
  CHECK_THROWS_AS(aggregate(a, zero), Error);
  CHECK_THROWS_AS(compare_models(a, a, MatrixXd::Zero(2, 2), w), Error);
}

TEST_CASE("single-series regions and trajectory selection") {
  const ProjectionEnsemble e =
      project(params(3, 0.4, 1.0), CorrelationMatrix::identity(3), VectorXd::Ones(3), 3, 8, 2);
  RegionWeights w;
  w.regions["only"] = {{"s2", {5.0}}};
  w.regions["mix"] = {{"s1", {1.0, 2.0, 3.0}}, {"s3", {2.0}}};
  const RegionEnsembles agg = aggregate(e, w);
  for (Index t = 0; t < 8; ++t)
    for (Index p = 0; p < 3; ++p) CHECK(agg.values[1](t, p) == e.at(t, p, 1));

  const std::vector<Index> keep{6, 1, 3};
  const RegionEnsembles sub = aggregate(e.select(keep), w);
  for (std::size_t r = 0; r < agg.regions.size(); ++r)
    for (std::size_t k = 0; k < keep.size(); ++k)
      for (Index p = 0; p < 3; ++p)
        CHECK(sub.values[r](static_cast<Index>(k), p) == agg.values[r](keep[k], p));
}

TEST_CASE("a tighter ensemble centred on the observation scores lower") {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> z;
  std::vector<double> tight(20), wide(20);
  for (std::size_t i = 0; i < tight.size(); ++i) {
    tight[i] = z(rng);
    wide[i] = 2.0 * tight[i];
  }
  double mean = 0.0;
  for (double v : tight) mean += v / 20.0;
  CHECK(crps(tight, mean) < crps(wide, 2.0 * mean));
}
