#include "doctest.h"
#include "test_support.hpp"

#include "lpoc/empirical.hpp"
#include "lpoc/lambda_select.hpp"
#include "lpoc/simulation.hpp"

#include <cmath>
#include <random>

using namespace lpoc;

namespace {

CorrelationMatrix corr3(double a, double b, double c) {
  MatrixXd r(3, 3);
  r << 1, a, b, a, 1, c, b, c, 1;
  return CorrelationMatrix::unchecked(r);
}

}  // namespace

TEST_CASE("k criterion examples") {
  CHECK(k_criterion(corr3(0.8, 0.5, 0.1), corr3(0.8, 0.5, 0.1)) == 0.0);

  // Two shrunk pairs (0.5 -> 0.2, 0.1 -> 0) and one inflated (0.8 -> 0.9).
  const double k = k_criterion(corr3(0.8, 0.5, 0.1), corr3(0.9, 0.2, 0.0));
  CHECK(k == doctest::Approx((0.3 + 0.1) / 2.0 - 0.1).epsilon(1e-12));

  const ShrinkageSummary s = shrinkage_summary(corr3(0.8, 0.5, 0.1).values(),
                                               corr3(0.9, 0.2, 0.0).values());
  CHECK(s.shrunk == 2);
  CHECK(s.inflated == 1);

  // Only shrinkage: inflation set empty contributes 0.
  CHECK(k_criterion(corr3(0.8, 0.5, 0.1), corr3(0.7, 0.5, 0.1)) == doctest::Approx(0.1));
  // Sign is ignored.
  CHECK(k_criterion(corr3(-0.8, 0.5, 0.1), corr3(-0.6, 0.5, 0.1)) == doctest::Approx(0.2));
}

TEST_CASE("k criterion is permutation invariant") {
  std::mt19937_64 rng(3);
  const MatrixXd a = testing::random_correlation(6, rng);
  const MatrixXd b = testing::random_correlation(6, rng);
  Eigen::PermutationMatrix<Eigen::Dynamic> perm(6);
  perm.indices() << 4, 2, 0, 5, 1, 3;
  const double k0 = k_criterion(CorrelationMatrix::unchecked(a), CorrelationMatrix::unchecked(b));
  const double k1 = k_criterion(CorrelationMatrix::unchecked(testing::permute(a, perm)),
                                CorrelationMatrix::unchecked(testing::permute(b, perm)));
  CHECK(k0 == doctest::Approx(k1).epsilon(1e-12));
}

TEST_CASE("lowess reproduces lines and damps spikes") {
  std::vector<double> xs, line, flat, spike;
  for (int i = 0; i <= 100; ++i) {
    xs.push_back(0.1 * i);
    line.push_back(2.0 - 0.5 * xs.back());
    flat.push_back(3.0);
    spike.push_back(i == 50 ? 1.0 : 0.0);
  }
  const auto l = lowess_smooth(xs, line);
  const auto f = lowess_smooth(xs, flat);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    CHECK(l[i] == doctest::Approx(line[i]).epsilon(1e-10));
    CHECK(f[i] == doctest::Approx(3.0).epsilon(1e-12));
  }
  const auto s = lowess_smooth(xs, spike);
  CHECK(std::abs(s[50]) <= 0.5);

  CHECK_THROWS_AS(lowess_smooth({0.0, 1.0}, {0.0, 1.0}), Error);
}

TEST_CASE("grid construction") {
  const auto g = make_grid(0.0, 10.0, 0.1);
  REQUIRE(g.size() == 101);
  CHECK(g.front() == 0.0);
  CHECK(g.back() == doctest::Approx(10.0));
  CHECK(g[64] == doctest::Approx(6.4));
}

TEST_CASE("selection with no penalty picks the smallest lambda") {
  std::mt19937_64 rng(5);
  const CorrelationMatrix rt = validate_correlation(testing::random_correlation(5, rng), true);
  LambdaSelectOptions o;
  o.observations = 11;
  const LambdaScan scan = select_lambda(rt, PenaltyMatrix::zeros(5), make_grid(0, 10, 0.1),
                                        SolverConfig{}, o);
  CHECK(scan.chosen_index == 0);
  for (double k : scan.k_values) CHECK(std::abs(k) < 1e-7);
}

TEST_CASE("raw argmax, warm and cold start agree on simulated data") {
  SimScenario s = SimScenario::block_default();
  const SimulatedPanel sim = simulate_panel(s, 4);
  const CorrelationMatrix rt = r_tilde_pd(r_tilde_basic(sim.true_errors));
  const auto grid = make_grid(0, 10, 1.0);

  LambdaSelectOptions warm;
  warm.observations = 11;
  warm.smoothing = false;
  LambdaSelectOptions cold = warm;
  cold.warm_start = false;
  cold.threads = 2;

  // Both paths share one optimum; compare them once the solver is run to it.
  SolverConfig tight;
  tight.outer_tol = 1e-13;
  tight.inner_tol = 1e-14;
  tight.max_outer = 5000;
  const LambdaScan a = select_lambda(rt, s.effective_penalty(), grid, tight, warm);
  const LambdaScan b = select_lambda(rt, s.effective_penalty(), grid, tight, cold);
  CHECK_FALSE(a.smoothed_k.has_value());
  REQUIRE(a.k_values.size() == grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(std::abs(a.k_values[i] - b.k_values[i]) < 1e-4);
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (a.k_values[i] > a.k_values[best]) best = i;
  CHECK(a.chosen_index == best);
  CHECK(a.chosen_lambda == grid[best]);
}
