#include "lpoc/core.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <sstream>
#include <utility>

namespace lpoc {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NotSquare: return "NotSquare";
    case ErrorKind::NotSymmetric: return "NotSymmetric";
    case ErrorKind::BadDiagonal: return "BadDiagonal";
    case ErrorKind::OutOfRangeEntry: return "OutOfRangeEntry";
    case ErrorKind::NotPositiveSemiDefinite: return "NotPositiveSemiDefinite";
    case ErrorKind::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::ConstantSeries: return "ConstantSeries";
    case ErrorKind::ZeroRow: return "ZeroRow";
    case ErrorKind::TooFewPoints: return "TooFewPoints";
    case ErrorKind::BadSampleSize: return "BadSampleSize";
    case ErrorKind::EmptySample: return "EmptySample";
    case ErrorKind::UnknownCovariateName: return "UnknownCovariateName";
    case ErrorKind::UnknownLabel: return "UnknownLabel";
    case ErrorKind::AllZeroWeights: return "AllZeroWeights";
    case ErrorKind::EmptyEnsemble: return "EmptyEnsemble";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::Parse: return "Parse";
    case ErrorKind::Io: return "Io";
    case ErrorKind::StudyFailed: return "StudyFailed";
  }
  return "Unknown";
}

namespace {

std::string decorate(ErrorKind kind, const std::string& what, Index row, Index col) {
  std::ostringstream os;
  os << to_string(kind) << ": " << what;
  if (row >= 0 && col >= 0) {
    os << " at (" << row << ", " << col << ")";
  } else if (row >= 0) {
    os << " at index " << row;
  }
  return os.str();
}

}  // namespace

Error::Error(ErrorKind kind, const std::string& what, Index row, Index col)
    : std::runtime_error(decorate(kind, what, row, col)), kind_(kind), message_(what), row_(row), col_(col) {}

bool Error::is_validation() const noexcept {
  switch (kind_) {
    case ErrorKind::NotPositiveDefinite:
    case ErrorKind::StudyFailed:
      return false;
    default:
      return true;
  }
}

// ---------------------------------------------------------------------------
// CorrelationMatrix

CorrelationMatrix CorrelationMatrix::with_labels(std::vector<std::string> labels) const {
  if (!labels.empty() && static_cast<Index>(labels.size()) != dim()) {
    throw Error(ErrorKind::DimensionMismatch, "label count does not match matrix dimension");
  }
  CorrelationMatrix out = *this;
  out.labels_ = std::move(labels);
  return out;
}

CorrelationMatrix CorrelationMatrix::identity(Index dim) {
  return unchecked(MatrixXd::Identity(dim, dim), true);
}

CorrelationMatrix CorrelationMatrix::unchecked(MatrixXd values, bool strict,
                                               std::vector<std::string> labels) {
  CorrelationMatrix out;
  out.values_ = with_unit_diagonal(symmetric_part(values));
  out.strict_ = strict;
  if (!labels.empty() && static_cast<Index>(labels.size()) != out.dim()) {
    throw Error(ErrorKind::DimensionMismatch, "label count does not match matrix dimension");
  }
  out.labels_ = std::move(labels);
  return out;
}

// ---------------------------------------------------------------------------
// PenaltyMatrix

PenaltyMatrix::PenaltyMatrix(MatrixXd values) : values_(std::move(values)) {}

PenaltyMatrix PenaltyMatrix::zeros(Index dim) { return PenaltyMatrix(MatrixXd::Zero(dim, dim)); }

PenaltyMatrix PenaltyMatrix::cross_block(const std::vector<Index>& block_sizes) {
  Index dim = 0;
  for (Index b : block_sizes) {
    if (b <= 0) throw Error(ErrorKind::InvalidArgument, "block sizes must be positive");
    dim += b;
  }
  MatrixXd p = MatrixXd::Ones(dim, dim);
  Index start = 0;
  for (Index b : block_sizes) {
    p.block(start, start, b, b).setZero();
    start += b;
  }
  return PenaltyMatrix(std::move(p));
}

bool PenaltyMatrix::is_binary() const {
  return (values_.array() == 0.0 || values_.array() == 1.0).all();
}

// ---------------------------------------------------------------------------
// Factorization

SpdFactorization::SpdFactorization(Eigen::LLT<MatrixXd> llt) : llt_(std::move(llt)) {
  log_det_ = 2.0 * llt_.matrixLLT().diagonal().array().log().sum();
}

MatrixXd SpdFactorization::inverse() const {
  const Index n = dim();
  return llt_.solve(MatrixXd::Identity(n, n));
}

std::optional<SpdFactorization> try_spd_factorize(MatrixRef m) {
  if (m.rows() != m.cols()) return std::nullopt;
  Eigen::LLT<MatrixXd> llt(m);
  if (llt.info() != Eigen::Success) return std::nullopt;
  const auto diag = llt.matrixLLT().diagonal().array();
  if (!(diag > 0.0).all() || !diag.isFinite().all()) return std::nullopt;
  return SpdFactorization(std::move(llt));
}

SpdFactorization spd_factorize(MatrixRef m) {
  if (m.rows() != m.cols()) {
    throw Error(ErrorKind::NotSquare, "matrix must be square");
  }
  auto f = try_spd_factorize(m);
  if (!f) throw Error(ErrorKind::NotPositiveDefinite, "Cholesky factorization failed");
  return std::move(*f);
}

bool is_positive_definite(MatrixRef m, double floor) {
  if (m.rows() != m.cols()) return false;
  MatrixXd shifted = m;
  shifted.diagonal().array() -= floor;
  Eigen::LLT<MatrixXd> llt(shifted);
  return llt.info() == Eigen::Success && (llt.matrixLLT().diagonal().array() > 0.0).all();
}

double min_eigenvalue(MatrixRef m) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

// ---------------------------------------------------------------------------
// Validation

MatrixXd symmetrize_checked(MatrixRef m) {
  if (m.rows() != m.cols()) throw Error(ErrorKind::NotSquare, "matrix must be square");
  const Index n = m.rows();
  MatrixXd out = m;
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      const double a = m(i, j);
      const double b = m(j, i);
      if (a == b) continue;
      if (!(std::abs(a - b) <= kSymmetryTolerance)) {
        throw Error(ErrorKind::NotSymmetric, "entries differ across the diagonal", i, j);
      }
      out(i, j) = out(j, i) = 0.5 * (a + b);
    }
  }
  return out;
}

CorrelationMatrix validate_correlation(MatrixRef m, bool strict, double pd_floor) {
  MatrixXd values = symmetrize_checked(m);
  const Index n = values.rows();
  if (n == 0) throw Error(ErrorKind::InvalidArgument, "empty matrix");
  for (Index i = 0; i < n; ++i) {
    if (values(i, i) != 1.0) {
      throw Error(ErrorKind::BadDiagonal, "diagonal entry is not 1", i, i);
    }
  }
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < n; ++i) {
      const double v = values(i, j);
      if (!std::isfinite(v) || v < -1.0 || v > 1.0) {
        throw Error(ErrorKind::OutOfRangeEntry, "entry outside [-1, 1]", std::min(i, j),
                    std::max(i, j));
      }
    }
  }

  Eigen::SelfAdjointEigenSolver<MatrixXd> es(values);
  const double lo = es.eigenvalues().minCoeff();
  // Roundoff in the eigensolver scales with the matrix norm (<= n here).
  const double psd_slack = 64.0 * std::numeric_limits<double>::epsilon() * static_cast<double>(n);
  const bool not_psd = lo < -psd_slack;
  if (not_psd || (strict && lo < pd_floor)) {
    // Name the coordinate carrying the most weight in the offending eigenvector.
    Index worst = 0;
    es.eigenvectors().col(0).cwiseAbs().maxCoeff(&worst);
    std::ostringstream msg;
    msg << "minimum eigenvalue " << lo << (not_psd ? " is negative" : " is below the floor ");
    if (!not_psd) msg << pd_floor;
    throw Error(not_psd ? ErrorKind::NotPositiveSemiDefinite : ErrorKind::NotPositiveDefinite,
                msg.str(), worst);
  }
  return CorrelationMatrix::unchecked(std::move(values), strict);
}

PenaltyMatrix validate_penalty(MatrixRef m) {
  MatrixXd values = symmetrize_checked(m);
  const Index n = values.rows();
  for (Index i = 0; i < n; ++i) {
    if (values(i, i) != 0.0) {
      throw Error(ErrorKind::BadDiagonal, "penalty diagonal must be zero", i, i);
    }
    for (Index j = 0; j < n; ++j) {
      if (!std::isfinite(values(i, j)) || values(i, j) < 0.0) {
        throw Error(ErrorKind::OutOfRangeEntry, "penalty entries must be finite and >= 0",
                    std::min(i, j), std::max(i, j));
      }
    }
  }
  return PenaltyMatrix(std::move(values));
}

Index count_off_diagonal_zeros(MatrixRef m, double threshold) {
  Index count = 0;
  for (Index j = 0; j < m.cols(); ++j) {
    for (Index i = 0; i < j; ++i) {
      if (std::abs(m(i, j)) < threshold) ++count;
    }
  }
  return count;
}

double masked_upper_mean(MatrixRef m, const BoolMatrix& mask) {
  double sum = 0.0;
  Index count = 0;
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = i + 1; j < m.cols(); ++j) {
      if (mask(i, j)) {
        sum += m(i, j);
        ++count;
      }
    }
  }
  return count == 0 ? 0.0 : sum / static_cast<double>(count);
}

}  // namespace lpoc
