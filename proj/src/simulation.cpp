#include "lpoc/simulation.hpp"

#include "lpoc/parallel.hpp"

#include <cmath>
#include <random>

namespace lpoc {

const char* to_string(EpsilonSource source) {
  return source == EpsilonSource::TrueErrors ? "true-errors" : "fitted-errors";
}

EpsilonSource epsilon_source_from_string(const std::string& name) {
  if (name == "true-errors") return EpsilonSource::TrueErrors;
  if (name == "fitted-errors") return EpsilonSource::FittedErrors;
  throw Error(ErrorKind::InvalidArgument, "unknown epsilon source '" + name + "'");
}

CorrelationMatrix SimScenario::block_correlation(const std::vector<Index>& block_sizes,
                                                 double within) {
  Index dim = 0;
  for (Index b : block_sizes) dim += b;
  MatrixXd r = MatrixXd::Zero(dim, dim);
  Index start = 0;
  for (Index b : block_sizes) {
    r.block(start, start, b, b).setConstant(within);
    start += b;
  }
  r.diagonal().setOnes();
  return validate_correlation(r, true);
}

SimScenario SimScenario::block_default() {
  SimScenario s;
  s.dim = 9;
  s.periods = 12;
  s.ar1.mu = VectorXd::Zero(9);
  s.ar1.phi = VectorXd::Constant(9, 0.5);
  s.ar1.sigma = VectorXd::Ones(9);
  s.true_correlation = block_correlation({3, 3, 3}, 0.5);
  return s;
}

PenaltyMatrix SimScenario::effective_penalty() const {
  MatrixXd p = penalty ? penalty->values() : zero_mask_of(true_correlation).cast<double>();
  if (misalign_penalty) {
    const Index n = p.rows();
    Eigen::VectorXi idx(n);
    for (Index i = 0; i < n; ++i) idx(i) = static_cast<int>((i + 1) % n);
    Eigen::PermutationMatrix<Eigen::Dynamic> perm(idx);
    p = perm * p * perm.transpose();
  }
  return PenaltyMatrix(std::move(p));
}

void SimScenario::validate() const {
  if (dim < 2) throw Error(ErrorKind::InvalidArgument, "scenario needs at least 2 series");
  if (periods < 3) throw Error(ErrorKind::InvalidArgument, "scenario needs at least 3 periods");
  if (ar1.size() != dim) throw Error(ErrorKind::DimensionMismatch, "AR(1) parameters differ from dim");
  ar1.validate();
  if (true_correlation.dim() != dim || !is_positive_definite(true_correlation.values())) {
    throw Error(ErrorKind::NotPositiveDefinite, "true correlation must be strictly PD of size dim");
  }
  if (penalty && penalty->dim() != dim) {
    throw Error(ErrorKind::DimensionMismatch, "penalty differs in dimension");
  }
  if (!(lambda >= 0.0)) throw Error(ErrorKind::InvalidArgument, "lambda must be >= 0");
  if (replications < 1) throw Error(ErrorKind::InvalidArgument, "need at least one replication");
  solver.validate();
}

std::uint64_t replicate_seed(std::uint64_t seed, std::uint64_t index) {
  return stream_seed(seed, index);
}

SimulatedPanel simulate_panel(const SimScenario& scenario, std::uint64_t replicate_index) {
  const Index C = scenario.dim;
  const Index T = scenario.periods;
  const auto& ar = scenario.ar1;
  const MatrixXd& r = scenario.true_correlation.values();

  // Stationary correlation of g: R_ij / (1 - phi_i phi_j), scaled by sigma later.
  MatrixXd stationary(C, C);
  for (Index i = 0; i < C; ++i)
    for (Index j = 0; j < C; ++j) stationary(i, j) = r(i, j) / (1.0 - ar.phi(i) * ar.phi(j));
  const MatrixXd l_innov = spd_factorize(r).factor();
  const MatrixXd l_stat = spd_factorize(stationary).factor();

  std::mt19937_64 rng(replicate_seed(scenario.seed, replicate_index));
  std::normal_distribution<double> z;
  auto draw = [&](const MatrixXd& l) {
    VectorXd u(C);
    for (Index i = 0; i < C; ++i) u(i) = z(rng);
    return VectorXd(ar.sigma.cwiseProduct(l * u));
  };

  SimulatedPanel out;
  out.panel.values.resize(C, T);
  out.true_errors.values.resize(C, T - 1);
  out.true_errors.sigma = ar.sigma;
  for (Index i = 0; i < C; ++i) out.panel.labels.push_back("s" + std::to_string(i + 1));
  out.true_errors.labels = out.panel.labels;

  VectorXd g = ar.mu + draw(l_stat);
  out.panel.values.col(0) = g;
  for (Index t = 1; t < T; ++t) {
    const VectorXd eps = draw(l_innov);
    g = ar.mu + ar.phi.cwiseProduct(g - ar.mu) + eps;
    out.panel.values.col(t) = g;
    out.true_errors.values.col(t - 1) = eps;
  }
  return out;
}

namespace {

ReplicationResult run_replication(const SimScenario& s, const PenaltyMatrix& p,
                                  const BoolMatrix& zero_mask, int index) {
  ReplicationResult res;
  res.index = index;
  try {
    const SimulatedPanel sim = simulate_panel(s, static_cast<std::uint64_t>(index));
    ErrorPanel errors = sim.true_errors;
    if (s.epsilon_source == EpsilonSource::FittedErrors) errors = fit_ar1(sim.panel).errors;

    const CorrelationMatrix pearson = r_tilde_basic(errors);
    const CorrelationMatrix r_tilde = r_tilde_pd(pearson);
    SolverConfig cfg = s.solver;
    cfg.lambda_eff = s.lambda / static_cast<double>(s.periods - 1);
    const SolveReport lpoc = solve_lpoc(r_tilde, p, cfg);
    const LedoitWolfResult lw = ledoit_wolf_estimate(errors);

    res.errors = evaluate_estimates(s.true_correlation,
                                    {{"Pearson", pearson.values()},
                                     {"LedoitWolf", lw.estimate.values()},
                                     {"LPoC", lpoc.estimate.values()}},
                                    zero_mask);
    res.lw_intensity = lw.intensity;
    res.lpoc_converged = lpoc.converged;
    res.lpoc_outer_iterations = lpoc.outer_iterations;
    res.lpoc_objective_trace = lpoc.objective_trace;
    res.all_estimates_pd = is_positive_definite(pearson.values()) &&
                           is_positive_definite(lw.estimate.values()) &&
                           is_positive_definite(lpoc.estimate.values());

    const MatrixXd& est = lpoc.estimate.values();
    const MatrixXd& pv = pearson.values();
    Index penalized = 0, zeros = 0;
    double zero_abs_l = 0, zero_abs_p = 0, nz_l = 0, nz_p = 0;
    for (Index j = 0; j < s.dim; ++j) {
      for (Index i = 0; i < j; ++i) {
        if (p(i, j) > 0.0) {
          ++penalized;
          if (std::abs(est(i, j)) < 1e-12) ++zeros;
        }
        if (zero_mask(i, j)) {
          res.lpoc_zero.push_back(est(i, j));
          res.pearson_zero.push_back(pv(i, j));
          zero_abs_l += std::abs(est(i, j));
          zero_abs_p += std::abs(pv(i, j));
        } else {
          res.lpoc_nonzero.push_back(est(i, j));
          res.pearson_nonzero.push_back(pv(i, j));
          nz_l += est(i, j);
          nz_p += pv(i, j);
        }
      }
    }
    auto mean = [](double sum, std::size_t n) { return n ? sum / static_cast<double>(n) : 0.0; };
    res.lpoc_exact_zero_fraction = penalized ? static_cast<double>(zeros) / penalized : 0.0;
    res.lpoc_zero_abs_mean = mean(zero_abs_l, res.lpoc_zero.size());
    res.pearson_zero_abs_mean = mean(zero_abs_p, res.pearson_zero.size());
    res.lpoc_nonzero_mean = mean(nz_l, res.lpoc_nonzero.size());
    res.pearson_nonzero_mean = mean(nz_p, res.pearson_nonzero.size());
  } catch (const Error& e) {
    res.failed = true;
    res.failure = e.what();
  }
  return res;
}

struct MeanSd {
  double mean = 0.0;
  double sd = 0.0;
  double se = 0.0;
};

MeanSd describe(const std::vector<double>& xs) {
  MeanSd out;
  if (xs.empty()) return out;
  double sum = 0.0;
  for (double x : xs) sum += x;
  out.mean = sum / static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - out.mean) * (x - out.mean);
    out.sd = std::sqrt(ss / static_cast<double>(xs.size() - 1));
    out.se = out.sd / std::sqrt(static_cast<double>(xs.size()));
  }
  return out;
}

}  // namespace

StudyReport run_study(const SimScenario& scenario) {
  scenario.validate();
  const PenaltyMatrix p = scenario.effective_penalty();
  const BoolMatrix zero_mask = zero_mask_of(scenario.true_correlation);

  StudyReport report;
  report.lambda_eff = scenario.lambda / static_cast<double>(scenario.periods - 1);
  report.replications.resize(static_cast<std::size_t>(scenario.replications));
  parallel_for(report.replications.size(), scenario.threads, [&](std::size_t i) {
    report.replications[i] = run_replication(scenario, p, zero_mask, static_cast<int>(i));
  });

  std::vector<double> nz_lpoc, nz_pearson, rep_means_lpoc, rep_means_pearson;
  int ok = 0;
  for (const auto& rep : report.replications) {
    if (rep.failed) {
      ++report.failures;
      continue;
    }
    ++ok;
    if (report.mean_errors.estimators.empty()) {
      report.mean_errors = rep.errors;
      for (auto& e : report.mean_errors.estimators) e.all = e.zero = e.nonzero = {0.0, 0.0, 0};
    }
    for (std::size_t k = 0; k < rep.errors.estimators.size(); ++k) {
      auto& acc = report.mean_errors.estimators[k];
      const auto& cur = rep.errors.estimators[k];
      for (auto [a, c] : {std::pair{&acc.all, &cur.all}, std::pair{&acc.zero, &cur.zero},
                          std::pair{&acc.nonzero, &cur.nonzero}}) {
        a->mae += c->mae;
        a->mse += c->mse;
        a->cells += c->cells;
      }
    }
    report.exact_zero_fraction += rep.lpoc_exact_zero_fraction;
    if (rep.lpoc_zero_abs_mean < rep.pearson_zero_abs_mean) ++report.lpoc_closer_to_zero;
    if (!rep.all_estimates_pd) ++report.pd_violations;
    nz_lpoc.insert(nz_lpoc.end(), rep.lpoc_nonzero.begin(), rep.lpoc_nonzero.end());
    nz_pearson.insert(nz_pearson.end(), rep.pearson_nonzero.begin(), rep.pearson_nonzero.end());
    rep_means_lpoc.push_back(rep.lpoc_nonzero_mean);
    rep_means_pearson.push_back(rep.pearson_nonzero_mean);
  }

  if (report.failures * 20 > scenario.replications) {
    throw Error(ErrorKind::StudyFailed, std::to_string(report.failures) + " of " +
                                            std::to_string(scenario.replications) +
                                            " replications failed");
  }
  if (ok > 0) {
    for (auto& e : report.mean_errors.estimators) {
      for (CellErrors* c : {&e.all, &e.zero, &e.nonzero}) {
        c->mae /= ok;
        c->mse /= ok;
        c->cells /= ok;
      }
    }
    report.exact_zero_fraction /= ok;
  }
  const MeanSd l = describe(nz_lpoc), pe = describe(nz_pearson);
  report.lpoc_nonzero_mean = l.mean;
  report.pearson_nonzero_mean = pe.mean;
  report.lpoc_nonzero_sd = l.sd;
  report.pearson_nonzero_sd = pe.sd;
  // Standard errors from replicate means: pairs within a replicate are dependent.
  report.lpoc_nonzero_se = describe(rep_means_lpoc).se;
  report.pearson_nonzero_se = describe(rep_means_pearson).se;
  return report;
}

}  // namespace lpoc
