#include "doctest.h"
#include "test_support.hpp"

#include "lpoc/baselines.hpp"

#include <random>

using namespace lpoc;

namespace {

MatrixXd normal_panel(Index rows, Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> z;
  MatrixXd x(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) x(i, j) = z(rng);
  return x;
}

}  // namespace

TEST_CASE("pearson matches the basic estimate") {
  std::mt19937_64 rng(1);
  ErrorPanel e;
  e.values = normal_panel(4, 11, rng);
  CHECK(pearson_estimate(e).values().isApprox(r_tilde_basic(e).values(), 1e-14));
  const MatrixXd c = pearson_estimate(e, true).values();
  CHECK(c.diagonal().isOnes(1e-14));
}

TEST_CASE("ledoit wolf intensity") {
  std::mt19937_64 rng(2);
  for (int rep = 0; rep < 20; ++rep) {
    const LedoitWolfResult lw = ledoit_wolf_estimate(normal_panel(6, 11, rng));
    CHECK(lw.intensity >= 0.0);
    CHECK(lw.intensity <= 1.0);
    CHECK(is_positive_definite(lw.estimate.values(), 0.0));
  }

  // Orthogonal rows with equal norms: S = I, nothing to shrink away from.
  MatrixXd orth = MatrixXd::Zero(3, 6);
  orth(0, 0) = orth(0, 1) = 1.0;
  orth(1, 2) = orth(1, 3) = 1.0;
  orth(2, 4) = orth(2, 5) = 1.0;
  CHECK(ledoit_wolf_estimate(orth).intensity == 1.0);

  // One observation vector repeated over time: every x_t x_t' equals S, so
  // the sampling-noise term vanishes.
  MatrixXd same(3, 5);
  for (Index t = 0; t < 5; ++t) same.col(t) << 1, -2, 0.5;
  CHECK(ledoit_wolf_estimate(same).intensity == doctest::Approx(0.0).epsilon(1e-12));

  const MatrixXd truth = testing::random_correlation(5, rng);
  const MatrixXd big = Eigen::LLT<MatrixXd>(truth).matrixL() * normal_panel(5, 5000, rng);
  const LedoitWolfResult lw = ledoit_wolf_estimate(big);
  CHECK(lw.intensity < 0.01);
  CHECK((lw.estimate.values() - r_tilde_basic(big).values()).norm() < 0.01);
}

TEST_CASE("error evaluation") {
  MatrixXd t = MatrixXd::Identity(4, 4);
  t(0, 1) = t(1, 0) = 0.5;
  t(2, 3) = t(3, 2) = -0.3;
  const CorrelationMatrix truth = validate_correlation(t);
  const BoolMatrix zeros = zero_mask_of(truth);

  MatrixXd shifted = t.array() + 0.1;
  shifted.diagonal().setOnes();
  const ErrorReport rep = evaluate_estimates(truth, {{"truth", t}, {"shifted", shifted}}, zeros);

  const EstimatorErrors& exact = rep.find("truth");
  CHECK(exact.all.mae == 0.0);
  CHECK(exact.all.mse == 0.0);
  CHECK(exact.all.cells == 6);
  CHECK(exact.zero.cells == 4);
  CHECK(exact.nonzero.cells == 2);

  const EstimatorErrors& off = rep.find("shifted");
  CHECK(off.all.mae == doctest::Approx(0.1));
  CHECK(off.all.mse == doctest::Approx(0.01));
  CHECK(off.zero.mae == doctest::Approx(0.1));
  CHECK_THROWS_AS(rep.find("nope"), Error);

  std::mt19937_64 rng(4);
  const MatrixXd est = testing::random_correlation(4, rng);
  Eigen::PermutationMatrix<Eigen::Dynamic> perm(4);
  perm.indices() << 2, 0, 3, 1;
  const CorrelationMatrix pt = validate_correlation(testing::permute(t, perm));
  const ErrorReport a = evaluate_estimates(truth, {{"x", est}}, zeros);
  const ErrorReport b =
      evaluate_estimates(pt, {{"x", testing::permute(est, perm)}}, zero_mask_of(pt));
  CHECK(a.find("x").all.mse == doctest::Approx(b.find("x").all.mse).epsilon(1e-12));
  CHECK(a.find("x").zero.mae == doctest::Approx(b.find("x").zero.mae).epsilon(1e-12));
}
