#include "lpoc/lambda_select.hpp"

#include "lpoc/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace lpoc {

ShrinkageSummary shrinkage_summary(MatrixRef r_tilde, MatrixRef r_hat) {
  if (r_tilde.rows() != r_hat.rows() || r_tilde.cols() != r_hat.cols()) {
    throw Error(ErrorKind::DimensionMismatch, "k criterion needs matrices of equal dimension");
  }
  ShrinkageSummary s;
  double shrink_sum = 0.0;
  double inflate_sum = 0.0;
  for (Index j = 0; j < r_tilde.cols(); ++j) {
    for (Index i = 0; i < j; ++i) {
      const double before = std::abs(r_tilde(i, j));
      const double after = std::abs(r_hat(i, j));
      if (after < before) {
        shrink_sum += before - after;
        ++s.shrunk;
      } else if (after > before) {
        inflate_sum += after - before;
        ++s.inflated;
      }
    }
  }
  if (s.shrunk > 0) s.mean_shrinkage = shrink_sum / static_cast<double>(s.shrunk);
  if (s.inflated > 0) s.mean_inflation = inflate_sum / static_cast<double>(s.inflated);
  return s;
}

double k_criterion(const CorrelationMatrix& r_tilde, const CorrelationMatrix& r_hat) {
  const auto s = shrinkage_summary(r_tilde.values(), r_hat.values());
  return s.mean_shrinkage - s.mean_inflation;
}

std::vector<double> lowess_smooth(const std::vector<double>& xs, const std::vector<double>& ys,
                                  double span) {
  const std::size_t n = xs.size();
  if (ys.size() != n) throw Error(ErrorKind::DimensionMismatch, "xs and ys differ in length");
  if (n < 3) throw Error(ErrorKind::TooFewPoints, "lowess needs at least 3 points");
  if (!(span > 0.0 && span <= 1.0)) throw Error(ErrorKind::InvalidArgument, "span must lie in (0, 1]");
  for (std::size_t i = 1; i < n; ++i) {
    if (!(xs[i] > xs[i - 1])) {
      throw Error(ErrorKind::InvalidArgument, "xs must be strictly increasing", static_cast<Index>(i));
    }
  }

  const std::size_t q = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::floor(span * static_cast<double>(n) + 1e-7)), 2, n);
  std::vector<double> out(n);
  std::vector<double> dist(n);

  for (std::size_t i = 0; i < n; ++i) {
    // The q nearest points form a contiguous window around i.
    std::size_t lo = i, hi = i;
    while (hi - lo + 1 < q) {
      if (lo == 0) {
        ++hi;
      } else if (hi == n - 1) {
        --lo;
      } else if (xs[i] - xs[lo - 1] <= xs[hi + 1] - xs[i]) {
        --lo;
      } else {
        ++hi;
      }
    }
    const double h = std::max(xs[i] - xs[lo], xs[hi] - xs[i]);

    double sw = 0, swx = 0, swy = 0, swxx = 0, swxy = 0;
    for (std::size_t j = lo; j <= hi; ++j) {
      double w = 1.0;
      if (h > 0.0) {
        const double u = std::abs(xs[j] - xs[i]) / h;
        w = u < 1.0 ? std::pow(1.0 - u * u * u, 3) : 0.0;
      }
      sw += w;
      swx += w * xs[j];
      swy += w * ys[j];
      swxx += w * xs[j] * xs[j];
      swxy += w * xs[j] * ys[j];
    }
    const double xbar = swx / sw;
    const double ybar = swy / sw;
    const double sxx = swxx / sw - xbar * xbar;
    const double sxy = swxy / sw - xbar * ybar;
    const double range = xs[hi] - xs[lo];
    if (sxx > 1e-12 * range * range) {
      out[i] = ybar + (sxy / sxx) * (xs[i] - xbar);
    } else {
      out[i] = ybar;
    }
  }
  return out;
}

std::vector<double> make_grid(double first, double last, double step) {
  if (!(step > 0.0) || last < first) throw Error(ErrorKind::InvalidArgument, "bad grid specification");
  std::vector<double> grid;
  const auto count = static_cast<std::size_t>(std::floor((last - first) / step + 1e-9)) + 1;
  grid.reserve(count);
  for (std::size_t g = 0; g < count; ++g) grid.push_back(first + static_cast<double>(g) * step);
  return grid;
}

LambdaScan select_lambda(const CorrelationMatrix& r_tilde, const PenaltyMatrix& p,
                         const std::vector<double>& grid, const SolverConfig& base,
                         const LambdaSelectOptions& options) {
  if (grid.empty()) throw Error(ErrorKind::InvalidArgument, "lambda grid is empty");
  for (std::size_t g = 0; g < grid.size(); ++g) {
    if (!(grid[g] >= 0.0) || (g > 0 && !(grid[g] > grid[g - 1]))) {
      throw Error(ErrorKind::InvalidArgument, "lambda grid must be nonnegative and strictly increasing",
                  static_cast<Index>(g));
    }
  }
  if (!(options.observations > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "observation count must be positive");
  }

  const std::size_t n = grid.size();
  LambdaScan scan;
  scan.grid = grid;
  scan.k_values.assign(n, -std::numeric_limits<double>::infinity());
  scan.converged.assign(n, false);
  std::vector<std::optional<CorrelationMatrix>> estimates(n);
  std::vector<char> converged(n, 0);  // not vector<bool>: written from workers

  auto solve_at = [&](std::size_t g, const std::optional<MatrixXd>& start) {
    SolverConfig cfg = base;
    cfg.lambda_eff = grid[g] / options.observations;
    try {
      SolveReport rep = solve_lpoc(r_tilde, p, cfg, start);
      scan.k_values[g] = k_criterion(r_tilde, rep.estimate);
      converged[g] = rep.converged ? 1 : 0;
      estimates[g] = std::move(rep.estimate);
    } catch (const Error&) {
      // Recorded as -inf and skipped by the argmax.
    }
  };

  if (options.warm_start) {
    std::optional<MatrixXd> start;
    for (std::size_t g = 0; g < n; ++g) {
      solve_at(g, start);
      if (estimates[g]) start = estimates[g]->values();
    }
  } else {
    parallel_for(n, options.threads, [&](std::size_t g) { solve_at(g, std::nullopt); });
  }

  for (std::size_t g = 0; g < n; ++g) scan.converged[g] = converged[g] != 0;

  std::vector<double> finite_x, finite_y;
  std::vector<std::size_t> finite_index;
  for (std::size_t g = 0; g < n; ++g) {
    if (std::isfinite(scan.k_values[g])) {
      finite_x.push_back(grid[g]);
      finite_y.push_back(scan.k_values[g]);
      finite_index.push_back(g);
    }
  }
  if (finite_index.empty()) {
    throw Error(ErrorKind::NotPositiveDefinite, "every grid point failed to solve");
  }

  std::vector<double> criterion = scan.k_values;
  if (options.smoothing && finite_index.size() >= 3) {
    const auto smooth = lowess_smooth(finite_x, finite_y, options.span);
    std::vector<double> full(n, -std::numeric_limits<double>::infinity());
    for (std::size_t k = 0; k < finite_index.size(); ++k) full[finite_index[k]] = smooth[k];
    scan.smoothed_k = full;
    criterion = std::move(full);
  }

  // Differences at rounding level count as ties, which go to the smaller lambda.
  constexpr double kTieTolerance = 1e-6;
  std::size_t best = finite_index.front();
  for (std::size_t g : finite_index) {
    if (criterion[g] > criterion[best] + kTieTolerance) best = g;
  }
  scan.chosen_index = best;
  scan.chosen_lambda = grid[best];

  if (options.keep_estimates) {
    std::vector<CorrelationMatrix> kept;
    kept.reserve(n);
    for (auto& e : estimates) kept.push_back(e ? std::move(*e) : CorrelationMatrix{});
    scan.estimates = std::move(kept);
  }
  return scan;
}

}  // namespace lpoc
