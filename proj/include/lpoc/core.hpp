#ifndef LPOC_CORE_HPP
#define LPOC_CORE_HPP

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace lpoc {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;
using MatrixRef = const Eigen::Ref<const MatrixXd>;
using VectorRef = const Eigen::Ref<const VectorXd>;
using BoolMatrix = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>;

/// Smallest eigenvalue a matrix must clear to count as strictly positive definite.
inline constexpr double kPdFloor = 1e-8;
/// Asymmetry below this is averaged away on ingestion; anything larger is rejected.
inline constexpr double kSymmetryTolerance = 1e-12;

enum class ErrorKind {
  NotSquare,
  NotSymmetric,
  BadDiagonal,
  OutOfRangeEntry,
  NotPositiveSemiDefinite,
  NotPositiveDefinite,
  DimensionMismatch,
  InvalidArgument,
  ConstantSeries,
  ZeroRow,
  TooFewPoints,
  BadSampleSize,
  EmptySample,
  UnknownCovariateName,
  UnknownLabel,
  AllZeroWeights,
  EmptyEnsemble,
  ShapeMismatch,
  Parse,
  Io,
  StudyFailed,
};

const char* to_string(ErrorKind kind);

/// Library exception. `row`/`col` name the first offending entry when the
/// error is about a specific matrix cell or series (-1 when not applicable).
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what, Index row = -1, Index col = -1);

  ErrorKind kind() const noexcept { return kind_; }
  /// The message without the kind prefix and location suffix.
  const std::string& message() const noexcept { return message_; }
  Index row() const noexcept { return row_; }
  Index col() const noexcept { return col_; }

  /// True for errors caused by bad inputs rather than numerical breakdown.
  bool is_validation() const noexcept;

 private:
  ErrorKind kind_;
  std::string message_;
  Index row_;
  Index col_;
};

/// Symmetric, unit-diagonal, positive semi-definite matrix with entries in [-1, 1].
///
/// Instances only come out of `validate_correlation` (or the unchecked
/// factory used by code that has already established the invariants), so a
/// CorrelationMatrix in hand is always valid.
class CorrelationMatrix {
 public:
  CorrelationMatrix() = default;

  Index dim() const noexcept { return values_.rows(); }
  const MatrixXd& values() const noexcept { return values_; }
  double operator()(Index i, Index j) const { return values_(i, j); }
  const std::vector<std::string>& labels() const noexcept { return labels_; }

  /// Whether the matrix was checked against the strict floor.
  bool strict() const noexcept { return strict_; }

  CorrelationMatrix with_labels(std::vector<std::string> labels) const;

  static CorrelationMatrix identity(Index dim);

  /// Wraps a matrix already known to satisfy the invariants. Symmetrizes
  /// and pins the diagonal, but performs no eigenvalue check.
  static CorrelationMatrix unchecked(MatrixXd values, bool strict = false,
                                     std::vector<std::string> labels = {});

  friend bool operator==(const CorrelationMatrix& a, const CorrelationMatrix& b) {
    return a.values_ == b.values_ && a.labels_ == b.labels_;
  }

 private:
  MatrixXd values_;
  std::vector<std::string> labels_;
  bool strict_ = false;
};

/// Symmetric nonnegative matrix with zero diagonal.
class PenaltyMatrix {
 public:
  PenaltyMatrix() = default;
  explicit PenaltyMatrix(MatrixXd values);

  Index dim() const noexcept { return values_.rows(); }
  const MatrixXd& values() const noexcept { return values_; }
  double operator()(Index i, Index j) const { return values_(i, j); }

  static PenaltyMatrix zeros(Index dim);

  /// Penalizes every pair not sharing a block; `block_sizes` partitions the dimension.
  static PenaltyMatrix cross_block(const std::vector<Index>& block_sizes);

  bool is_binary() const;

 private:
  MatrixXd values_;
};

/// Cholesky factorization of a symmetric positive-definite matrix.
class SpdFactorization {
 public:
  Index dim() const noexcept { return llt_.matrixLLT().rows(); }
  double log_det() const noexcept { return log_det_; }
  MatrixXd factor() const { return llt_.matrixL(); }
  MatrixXd inverse() const;
  MatrixXd solve(MatrixRef rhs) const { return llt_.solve(rhs); }

  friend SpdFactorization spd_factorize(MatrixRef m);
  friend std::optional<SpdFactorization> try_spd_factorize(MatrixRef m);

 private:
  explicit SpdFactorization(Eigen::LLT<MatrixXd> llt);

  Eigen::LLT<MatrixXd> llt_;
  double log_det_ = 0.0;
};

/// Throws NotPositiveDefinite when `m` has no Cholesky factor.
SpdFactorization spd_factorize(MatrixRef m);
std::optional<SpdFactorization> try_spd_factorize(MatrixRef m);

/// True iff the smallest eigenvalue of `m` exceeds `floor`; a single
/// Cholesky attempt on m - floor*I.
bool is_positive_definite(MatrixRef m, double floor = kPdFloor);

double min_eigenvalue(MatrixRef m);

/// Averages away asymmetry up to `kSymmetryTolerance`; throws NotSymmetric
/// naming the first offending pair otherwise.
MatrixXd symmetrize_checked(MatrixRef m);

/// Checks every CorrelationMatrix invariant. In strict mode the smallest
/// eigenvalue must also be at least `pd_floor`.
CorrelationMatrix validate_correlation(MatrixRef m, bool strict = false,
                                       double pd_floor = kPdFloor);

PenaltyMatrix validate_penalty(MatrixRef m);

/// Count of pairs i < j whose entry has magnitude below `threshold`.
Index count_off_diagonal_zeros(MatrixRef m, double threshold = 1e-12);

/// Mean of off-diagonal entries with i < j selected by `mask`.
double masked_upper_mean(MatrixRef m, const BoolMatrix& mask);

template <typename Derived>
typename Derived::PlainObject with_unit_diagonal(const Eigen::MatrixBase<Derived>& m) {
  typename Derived::PlainObject out = m;
  out.diagonal().setOnes();
  return out;
}

template <typename Derived>
typename Derived::PlainObject symmetric_part(const Eigen::MatrixBase<Derived>& m) {
  return (0.5 * (m + m.transpose())).eval();
}

}  // namespace lpoc

#endif  // LPOC_CORE_HPP
