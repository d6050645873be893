#ifndef LPOC_TEST_SUPPORT_HPP
#define LPOC_TEST_SUPPORT_HPP

#include "lpoc/core.hpp"

#include <cmath>
#include <random>

namespace lpoc::testing {

/// Random strictly-PD correlation matrix: normalized Gram matrix of
/// `rank` random directions blended with a little identity.
inline MatrixXd random_correlation(Index dim, std::mt19937_64& rng, Index rank = -1,
                                   double ridge = 0.05) {
  if (rank < 0) rank = dim + 2;
  std::normal_distribution<double> z;
  MatrixXd x(dim, rank);
  for (Index i = 0; i < dim; ++i)
    for (Index j = 0; j < rank; ++j) x(i, j) = z(rng);
  MatrixXd g = x * x.transpose();
  const VectorXd s = g.diagonal().cwiseSqrt().cwiseInverse();
  g = s.asDiagonal() * g * s.asDiagonal();
  g = (1.0 - ridge) * g + ridge * MatrixXd::Identity(dim, dim);
  g = 0.5 * (g + g.transpose());
  g.diagonal().setOnes();
  return g;
}

inline MatrixXd random_spd(Index dim, std::mt19937_64& rng) {
  std::normal_distribution<double> z;
  MatrixXd x(dim, dim + 3);
  for (Index i = 0; i < x.rows(); ++i)
    for (Index j = 0; j < x.cols(); ++j) x(i, j) = z(rng);
  MatrixXd m = x * x.transpose() / static_cast<double>(x.cols());
  m.diagonal().array() += 0.1;
  return 0.5 * (m + m.transpose());
}

inline MatrixXd permute(const MatrixXd& m, const Eigen::PermutationMatrix<Eigen::Dynamic>& perm) {
  return perm * m * perm.transpose();
}

}  // namespace lpoc::testing

#endif
