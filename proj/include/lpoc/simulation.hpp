#ifndef LPOC_SIMULATION_HPP
#define LPOC_SIMULATION_HPP

#include "lpoc/baselines.hpp"
#include "lpoc/core.hpp"
#include "lpoc/empirical.hpp"
#include "lpoc/solver.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace lpoc {

enum class EpsilonSource { TrueErrors, FittedErrors };

const char* to_string(EpsilonSource source);
EpsilonSource epsilon_source_from_string(const std::string& name);

/// Correlated AR(1) simulation setup. Defaults reproduce the nine-series
/// block study: three compound-symmetric blocks of three with within-block
/// correlation 0.5, mu = 0, phi = 0.5, sigma = 1, T = 12, lambda = 6.4, and a
/// penalty on exactly the cross-block pairs.
struct SimScenario {
  Index dim = 9;
  Index periods = 12;
  AR1Params ar1;
  CorrelationMatrix true_correlation;
  /// Penalty; when absent the true-zero pattern is penalized.
  std::optional<PenaltyMatrix> penalty;
  /// Cyclically shifts the penalty pattern by one series so it no longer
  /// lines up with the true zeros.
  bool misalign_penalty = false;
  double lambda = 6.4;
  int replications = 100;
  std::uint64_t seed = 0;
  EpsilonSource epsilon_source = EpsilonSource::TrueErrors;
  SolverConfig solver;
  unsigned threads = 1;

  static SimScenario block_default();

  /// Block-diagonal compound-symmetric correlation.
  static CorrelationMatrix block_correlation(const std::vector<Index>& block_sizes, double within);

  /// The penalty actually used (explicit, or derived from the truth).
  PenaltyMatrix effective_penalty() const;
  void validate() const;
};

struct SimulatedPanel {
  SeriesPanel panel;
  ErrorPanel true_errors;  ///< innovations for periods 2..T
};

/// Per-replicate seed: a SplitMix64 mix of the scenario seed and the index.
std::uint64_t replicate_seed(std::uint64_t seed, std::uint64_t index);

/// Draws one panel. g_1 comes from the stationary distribution and each
/// later period follows the AR(1) recursion with correlated normal errors.
SimulatedPanel simulate_panel(const SimScenario& scenario, std::uint64_t replicate_index);

struct ReplicationResult {
  int index = 0;
  bool failed = false;
  std::string failure;
  ErrorReport errors;
  double lpoc_exact_zero_fraction = 0.0;  ///< among penalized pairs
  double lpoc_nonzero_mean = 0.0;         ///< mean LPoC estimate over true-nonzero pairs
  double pearson_nonzero_mean = 0.0;
  double lpoc_zero_abs_mean = 0.0;        ///< mean |LPoC| over true-zero pairs
  double pearson_zero_abs_mean = 0.0;
  double lw_intensity = 0.0;
  bool lpoc_converged = false;
  int lpoc_outer_iterations = 0;
  std::vector<double> lpoc_objective_trace;
  bool all_estimates_pd = false;
  std::vector<double> pearson_zero, pearson_nonzero, lpoc_zero, lpoc_nonzero;
};

struct StudyReport {
  std::vector<ReplicationResult> replications;
  int failures = 0;
  /// Mean of per-replication errors for Pearson, LedoitWolf and LPoC.
  ErrorReport mean_errors;
  double exact_zero_fraction = 0.0;
  double lpoc_nonzero_mean = 0.0;
  double lpoc_nonzero_se = 0.0;
  double pearson_nonzero_mean = 0.0;
  double pearson_nonzero_se = 0.0;
  double lpoc_nonzero_sd = 0.0;
  double pearson_nonzero_sd = 0.0;
  /// Replications where LPoC's true-zero pairs sit closer to 0 than Pearson's.
  int lpoc_closer_to_zero = 0;
  int pd_violations = 0;
  double lambda_eff = 0.0;
};

/// Runs every replication (concurrently when scenario.threads > 1) and
/// aggregates in index order. Throws StudyFailed when more than 5% fail.
StudyReport run_study(const SimScenario& scenario);

}  // namespace lpoc

#endif  // LPOC_SIMULATION_HPP
