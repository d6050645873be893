#include "doctest.h"

#include "lpoc/penalty.hpp"

#include <boost/math/special_functions/beta.hpp>

#include <cmath>
#include <random>

using namespace lpoc;

namespace {

// Under the null, (r + 1) / 2 ~ Beta((n - 2) / 2, (n - 2) / 2).
double beta_null_cdf(int n, double r) {
  const double a = 0.5 * (n - 2);
  return boost::math::ibeta(a, a, 0.5 * (r + 1.0));
}

CovariateTable block_table(Index dim, Index block) {
  std::vector<std::string> labels;
  for (Index i = 0; i < dim; ++i) labels.push_back("s" + std::to_string(i + 1));
  CovariateTable t(labels);
  for (Index i = 0; i < dim; ++i)
    for (Index j = i + 1; j < dim; ++j)
      if (i / block == j / block) t.mark("same_block", i, j);
  return t;
}

}  // namespace

TEST_CASE("analytic null cdf") {
  const NullCorrelationCdf cdf = NullCorrelationCdf::analytic(11);
  CHECK(cdf(0.0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(cdf(-1.0) == 0.0);
  CHECK(cdf(1.0) == 1.0);
  CHECK(cdf(-2.0) == 0.0);
  CHECK(cdf(0.602) == doctest::Approx(0.975).epsilon(2e-3));

  for (int n : {4, 5, 11, 30}) {
    const NullCorrelationCdf c = NullCorrelationCdf::analytic(n);
    double prev = 0.0;
    for (double r = -0.99; r < 1.0; r += 0.03) {
      CHECK(c(r) == doctest::Approx(beta_null_cdf(n, r)).epsilon(1e-6));
      CHECK(c(r) + c(-r) == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(c(r) >= prev);
      prev = c(r);
    }
  }
  CHECK(cdf.quantile(0.5) == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(cdf(cdf.quantile(0.9)) == doctest::Approx(0.9).epsilon(1e-6));
  CHECK_THROWS_AS(NullCorrelationCdf::analytic(3), Error);
}

TEST_CASE("monte carlo null approaches the analytic one") {
  const NullCorrelationCdf mc = NullCorrelationCdf::monte_carlo(11, 9, 400, 1);
  for (double r : {-0.5, -0.2, 0.0, 0.3, 0.6}) {
    CHECK(std::abs(mc(r) - beta_null_cdf(11, r)) < 0.02);
  }
}

TEST_CASE("kolmogorov survival") {
  CHECK(kolmogorov_survival(0.0) == doctest::Approx(1.0));
  CHECK(kolmogorov_survival(1.3581) == doctest::Approx(0.05).epsilon(1e-3));
  CHECK(kolmogorov_survival(1.6276) == doctest::Approx(0.01).epsilon(2e-3));
  // Both branches agree where they meet.
  CHECK(kolmogorov_survival(1.18 - 1e-9) == doctest::Approx(kolmogorov_survival(1.18 + 1e-9)));
}

TEST_CASE("ks test") {
  const NullCorrelationCdf cdf = NullCorrelationCdf::analytic(11);
  CHECK(ks_test({0.0}, cdf).statistic == doctest::Approx(0.5).epsilon(1e-9));

  std::vector<double> grid;
  const int m = 200;
  for (int i = 0; i < m; ++i) grid.push_back(cdf.quantile((i + 0.5) / m));
  const KsResult g = ks_test(grid, cdf);
  CHECK(g.statistic <= 1.0 / m + 1e-6);
  CHECK(g.p_value > 0.99);

  std::vector<double> shifted;
  for (int i = 0; i < 500; ++i) shifted.push_back(std::min(0.99, cdf.quantile((i + 0.5) / 500) + 0.3));
  CHECK(ks_test(shifted, cdf).p_value < 1e-6);

  CHECK_THROWS_AS(ks_test({}, cdf), Error);
}

TEST_CASE("covariate table") {
  CovariateTable t({"a", "b", "c"});
  BoolMatrix m = BoolMatrix::Constant(3, 3, false);
  m(0, 1) = true;
  m(2, 2) = true;
  t.set("x", m);
  CHECK(t.indicator("x")(1, 0));
  CHECK_FALSE(t.indicator("x")(2, 2));
  t.mark("y", 2, 0);
  CHECK(t.indicator("y")(0, 2));
  CHECK(t.names() == std::vector<std::string>{"x", "y"});
  CHECK(t.contains("y"));
  CHECK_THROWS_AS(t.indicator("z"), Error);
}

TEST_CASE("screening selects a real block structure") {
  const CovariateTable t = [] {
    CovariateTable b = block_table(9, 3);
    b.set("empty", BoolMatrix::Constant(9, 9, false));
    return b;
  }();
  MatrixXd r = MatrixXd::Identity(9, 9);
  for (Index i = 0; i < 9; ++i)
    for (Index j = 0; j < 9; ++j)
      if (i != j && i / 3 == j / 3) r(i, j) = 0.85;
  const ScreenReport rep =
      screen_covariates(validate_correlation(r), t, NullCorrelationCdf::analytic(11));
  REQUIRE(rep.covariates.size() == 1);
  CHECK(rep.skipped == std::vector<std::string>{"empty"});
  CHECK(rep.covariates[0].pairs == 9);
  CHECK(rep.covariates[0].selected);
  CHECK(rep.selected == std::vector<std::string>{"same_block"});
}

TEST_CASE("penalty construction") {
  const CovariateTable t = block_table(6, 3);
  const PenaltyMatrix p = build_penalty(t, {"same_block"});
  CHECK(p.values() == PenaltyMatrix::cross_block({3, 3}).values());

  CovariateTable u = t;
  u.mark("extra", 0, 5);
  const PenaltyMatrix q = build_penalty(u, {"same_block", "extra"});
  CHECK(q(0, 5) == 0.0);
  CHECK((q.values().array() <= p.values().array()).all());

  CovariateTable all({"a", "b", "c"});
  all.set("everything", BoolMatrix::Constant(3, 3, true));
  CHECK(build_penalty(all, {"everything"}).values().isZero());

  CHECK_THROWS_AS(build_penalty(t, {"missing"}), Error);
  CHECK_THROWS_AS(build_penalty(t, {}), Error);
}
