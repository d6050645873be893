#include "lpoc/io.hpp"
#include "lpoc/parallel.hpp"

#include "CLI11.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <functional>
#include <iostream>
#include <sstream>

#ifndef LPOC_VERSION
#define LPOC_VERSION "0.0.0"
#endif

namespace fs = std::filesystem;
using lpoc::Error;
using lpoc::ErrorKind;
using lpoc::Index;
using lpoc::MatrixXd;
using lpoc::io::Json;

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitNumerical = 2;

struct Common {
  std::string config;
  std::string out_dir = ".";
  unsigned threads = 0;
  std::uint64_t seed = 0;
};

/// Collects inputs, outputs and settings for one command run.
class Run {
 public:
  Run(std::string command, CLI::App* app, const Common& common)
      : command_(std::move(command)), app_(app), common_(common),
        start_(std::chrono::steady_clock::now()) {}

  /// Loads an input; any failure becomes a validation error naming the path.
  template <typename F>
  auto load(const std::string& path, F&& read) -> decltype(read()) {
    try {
      inputs_.push_back({{"path", path}, {"digest", lpoc::io::file_digest(path)}});
      return read();
    } catch (const Error& e) {
      const ErrorKind kind = e.is_validation() ? e.kind() : ErrorKind::InvalidArgument;
      throw Error(kind, path + ": " + e.message(), e.row(), e.col());
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::Parse, path + ": " + e.what());
    }
  }

  void write(const std::string& name, const std::string& content) {
    const fs::path path = fs::path(common_.out_dir) / name;
    lpoc::io::write_text_atomic(path, content);
    outputs_.push_back({{"path", path.string()}, {"digest", lpoc::io::digest(content)}});
  }

  void write_json(const std::string& name, Json j) {
    j["manifest"] = manifest_name();
    write(name, j.dump(2) + "\n");
  }

  void note(const std::string& key, Json value) { extra_[key] = std::move(value); }

  void finish() {
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    Json resolved = Json::object();
    for (const CLI::Option* opt : app_->get_options()) {
      if (opt->get_lnames().empty() || opt->get_name() == "--help") continue;
      const std::string key = opt->get_lnames().front();
      if (opt->count() > 0) {
        const auto& results = opt->results();
        resolved[key] = opt->get_type_size() == 0 ? Json(true)
                        : results.size() == 1     ? Json(results.front())
                                                  : Json(results);
      } else {
        resolved[key] = opt->get_default_str();
      }
    }
    const std::time_t now = std::time(nullptr);
    char stamp[32];
    std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    Json m{{"command", command_},
           {"version", LPOC_VERSION},
           {"seed", common_.seed},
           {"threads", common_.threads == 0 ? lpoc::default_threads() : common_.threads},
           {"config", resolved},
           {"inputs", inputs_},
           {"outputs", outputs_},
           {"started_utc", stamp},
           {"elapsed_seconds", seconds}};
    for (auto& [k, v] : extra_.items()) m[k] = v;
    lpoc::io::write_text_atomic(fs::path(common_.out_dir) / manifest_name(), m.dump(2) + "\n");
  }

 private:
  std::string manifest_name() const { return command_ + ".manifest.json"; }

  std::string command_;
  CLI::App* app_;
  Common common_;
  std::chrono::steady_clock::time_point start_;
  Json inputs_ = Json::array();
  Json outputs_ = Json::array();
  Json extra_ = Json::object();
};

struct SolverFlags {
  double outer_tol = 1e-7;
  double inner_tol = 1e-8;
  int max_outer = 100;
  int max_inner = 2000;
  double pd_floor = lpoc::kPdFloor;

  void add(CLI::App* app) {
    app->add_option("--outer-tol", outer_tol, "Relative objective change that stops the outer loop")
        ->capture_default_str();
    app->add_option("--inner-tol", inner_tol, "Relative objective change that stops an inner solve")
        ->capture_default_str();
    app->add_option("--max-outer", max_outer, "Outer iteration cap")->capture_default_str();
    app->add_option("--max-inner", max_inner, "Inner proposal cap")->capture_default_str();
    app->add_option("--pd-floor", pd_floor, "Smallest admissible eigenvalue")->capture_default_str();
  }

  lpoc::SolverConfig config() const {
    lpoc::SolverConfig c;
    c.outer_tol = outer_tol;
    c.inner_tol = inner_tol;
    c.max_outer = max_outer;
    c.max_inner = max_inner;
    c.pd_floor = pd_floor;
    return c;
  }
};

void add_common(CLI::App* app, Common& common) {
  app->add_option("--config", common.config, "JSON file of option values; flags take precedence");
  app->add_option("--out-dir", common.out_dir, "Directory for outputs")->capture_default_str();
  app->add_option("--threads", common.threads, "Worker threads (0 = all cores)")->capture_default_str();
  app->add_option("--seed", common.seed, "Random seed")->capture_default_str();
}

lpoc::PenaltyMatrix uniform_penalty(Index n) {
  MatrixXd p = MatrixXd::Ones(n, n);
  p.diagonal().setZero();
  return lpoc::PenaltyMatrix(std::move(p));
}

std::vector<double> parse_grid(const std::string& spec) {
  std::vector<double> parts;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ':')) {
    try {
      std::size_t used = 0;
      parts.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Error(ErrorKind::InvalidArgument, "grid must look like first:last:step");
    }
  }
  if (parts.size() != 3 || !(parts[2] > 0.0) || parts[1] < parts[0]) {
    throw Error(ErrorKind::InvalidArgument, "grid must look like first:last:step with step > 0");
  }
  return lpoc::make_grid(parts[0], parts[1], parts[2]);
}

// Reorders the rows of an H-period panel (series x periods) to `labels`.
MatrixXd observations_for(const lpoc::SeriesPanel& panel, const std::vector<std::string>& labels) {
  MatrixXd out(panel.periods(), static_cast<Index>(labels.size()));
  for (std::size_t c = 0; c < labels.size(); ++c) {
    const auto it = std::find(panel.labels.begin(), panel.labels.end(), labels[c]);
    if (it == panel.labels.end()) {
      throw Error(ErrorKind::UnknownLabel, "observations lack series '" + labels[c] + "'");
    }
    out.col(static_cast<Index>(c)) = panel.values.row(it - panel.labels.begin()).transpose();
  }
  return out;
}

// Prepends "--key value" pairs from the subcommand's --config file so that
// explicit flags, which come later, win.
std::vector<std::string> expand_config(std::vector<std::string> args) {
  if (args.size() < 2) return args;
  std::string path;
  for (std::size_t i = 2; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (path.empty()) return args;
  Json j;
  try {
    j = Json::parse(lpoc::io::read_text(path));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Parse, path + ": " + e.what());
  }
  if (!j.is_object()) throw Error(ErrorKind::Parse, path + ": config must be a JSON object");
  std::vector<std::string> extra;
  for (const auto& [key, value] : j.items()) {
    const std::string flag = "--" + key;
    if (value.is_boolean()) {
      if (value.get<bool>()) extra.push_back(flag);
    } else if (value.is_array()) {
      std::string joined;
      for (const auto& v : value) joined += (joined.empty() ? "" : ",") + (v.is_string() ? v.get<std::string>() : v.dump());
      extra.insert(extra.end(), {flag, joined});
    } else {
      extra.insert(extra.end(), {flag, value.is_string() ? value.get<std::string>() : value.dump()});
    }
  }
  args.insert(args.begin() + 2, extra.begin(), extra.end());
  return args;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse correlation estimation with a Laplace prior on correlations"};
  app.set_version_flag("--version", std::string("lpoc ") + LPOC_VERSION);
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  Common common;
  SolverFlags solver_flags;
  std::function<void(Run&)> action;
  std::string command;

  auto sub = [&](const std::string& name, const std::string& help) {
    CLI::App* s = app.add_subcommand(name, help);
    add_common(s, common);
    s->callback([&command, name] { command = name; });
    return s;
  };

  // fit-errors
  std::string panel_path;
  bool keep_constant = false;
  {
    CLI::App* s = sub("fit-errors", "Fit per-series AR(1) models and form the error correlation");
    s->add_option("--panel", panel_path, "Series panel CSV (label,t1,...,tT)")->required();
    s->add_flag("--keep-constant", keep_constant, "Floor the scale of constant series instead of failing");
  }

  // estimate
  std::string rtilde_path, penalty_path, target_path, start_path;
  double lambda_eff = 0.0, lambda = 0.0, observations = 0.0;
  bool blend_pd = false;
  CLI::Option* lambda_eff_opt = nullptr;
  CLI::Option* lambda_opt = nullptr;
  {
    CLI::App* s = sub("estimate", "Penalized MAP estimate of a correlation matrix");
    s->add_option("--rtilde", rtilde_path, "Input correlation matrix CSV")->required();
    s->add_option("--penalty", penalty_path, "Penalty matrix CSV (default: every pair)");
    s->add_option("--target", target_path, "Shrinkage target matrix CSV (default: zero off-diagonals)");
    s->add_option("--start", start_path, "Warm-start matrix CSV");
    lambda_eff_opt = s->add_option("--lambda-eff", lambda_eff, "Penalty weight applied to the objective");
    lambda_opt = s->add_option("--lambda", lambda, "Penalty weight before division by the observation count");
    s->add_option("--observations", observations, "Error observations behind the input (T - 1)");
    s->add_flag("--blend-pd", blend_pd, "Replace the input by 0.99 R + 0.01 I first");
    lambda_eff_opt->excludes(lambda_opt);
    solver_flags.add(s);
  }

  // select-lambda
  std::string grid_spec = "0:10:0.1";
  bool no_smooth = false, cold_start = false;
  double span = 2.0 / 3.0;
  {
    CLI::App* s = sub("select-lambda", "Choose the penalty weight by the shrinkage-inflation criterion");
    s->add_option("--rtilde", rtilde_path, "Input correlation matrix CSV")->required();
    s->add_option("--penalty", penalty_path, "Penalty matrix CSV (default: every pair)");
    s->add_option("--observations", observations, "Error observations behind the input (T - 1)")->required();
    s->add_option("--grid", grid_spec, "Lambda grid first:last:step")->capture_default_str();
    s->add_option("--span", span, "Lowess span")->capture_default_str();
    s->add_flag("--no-smooth", no_smooth, "Maximize the raw criterion");
    s->add_flag("--cold-start", cold_start, "Solve every grid point from the input matrix");
    s->add_flag("--blend-pd", blend_pd, "Replace the input by 0.99 R + 0.01 I first");
    solver_flags.add(s);
  }

  // screen-covariates
  std::string covariates_path, null_kind = "analytic";
  int sample_size = 0, mc_replications = 200;
  double threshold = 0.05;
  {
    CLI::App* s = sub("screen-covariates", "KS-test pairwise covariates against the null correlation law");
    s->add_option("--rtilde", rtilde_path, "Input correlation matrix CSV")->required();
    s->add_option("--covariates", covariates_path, "Covariate CSV (label_i,label_j,name,value)")->required();
    s->add_option("--observations", sample_size, "Error observations per series (T - 1)")->required();
    s->add_option("--threshold", threshold, "Selection p-value threshold")->capture_default_str();
    s->add_option("--null", null_kind, "Null distribution")
        ->check(CLI::IsMember({"analytic", "monte-carlo"}))
        ->capture_default_str();
    s->add_option("--mc-replications", mc_replications, "Monte Carlo null panels")->capture_default_str();
  }

  // build-penalty
  std::string labels_path, screen_path;
  std::vector<std::string> selected;
  {
    CLI::App* s = sub("build-penalty", "Penalize every pair that no selected covariate flags");
    s->add_option("--covariates", covariates_path, "Covariate CSV (label_i,label_j,name,value)")->required();
    s->add_option("--labels-from", labels_path, "Matrix CSV whose header fixes the series order")->required();
    auto* sel = s->add_option("--select", selected, "Covariate names to honour")->delimiter(',');
    auto* scr = s->add_option("--screen", screen_path, "screen.json from screen-covariates");
    sel->excludes(scr);
    sel->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  }

  // simulate-study
  std::string scenario_path, epsilon_source;
  int replications = 0;
  double study_lambda = 0.0;
  bool misalign = false;
  CLI::Option* study_lambda_opt = nullptr;
  CLI::Option* replications_opt = nullptr;
  CLI::Option* seed_opt_study = nullptr;
  {
    CLI::App* s = sub("simulate-study", "Run the correlated AR(1) simulation study");
    s->add_option("--scenario", scenario_path, "Scenario JSON (default: nine-series block study)");
    replications_opt = s->add_option("--replications", replications, "Override the replication count");
    study_lambda_opt = s->add_option("--lambda", study_lambda, "Override lambda");
    s->add_option("--epsilon-source", epsilon_source, "true-errors or fitted-errors")
        ->check(CLI::IsMember({"true-errors", "fitted-errors"}));
    s->add_flag("--misalign-penalty", misalign, "Shift the penalty pattern off the true zeros");
    seed_opt_study = s->get_option("--seed");
  }

  // project
  std::string ar1_path, correlation_path, format = "csv";
  Index horizon = 0, trajectories = 0;
  {
    CLI::App* s = sub("project", "Simulate correlated AR(1) projection trajectories");
    s->add_option("--ar1", ar1_path, "AR(1) table CSV from fit-errors")->required();
    s->add_option("--correlation", correlation_path, "Error correlation matrix CSV")->required();
    s->add_option("--horizon", horizon, "Periods to project")->required()->check(CLI::PositiveNumber);
    s->add_option("--trajectories", trajectories, "Trajectories to draw")->required()->check(CLI::Range(2, 100000000));
    s->add_option("--format", format, "Ensemble file format")
        ->check(CLI::IsMember({"csv", "binary"}))
        ->capture_default_str();
  }

  // evaluate-crps
  std::string model_a, model_b, obs_path, weights_path, name_a = "A", name_b = "B";
  {
    CLI::App* s = sub("evaluate-crps", "Score two projection ensembles by regional CRPS");
    s->add_option("--model-a", model_a, "First ensemble (CSV or binary)")->required();
    s->add_option("--model-b", model_b, "Second ensemble (CSV or binary)")->required();
    s->add_option("--observations", obs_path, "Observed values, panel CSV over the horizon")->required();
    s->add_option("--weights", weights_path, "Region weights CSV (region,label,period,weight)")->required();
    s->add_option("--name-a", name_a, "Column name for the first model")->capture_default_str();
    s->add_option("--name-b", name_b, "Column name for the second model")->capture_default_str();
  }

  std::vector<std::string> args(argv, argv + argc);
  try {
    args = expand_config(std::move(args));
    std::vector<std::string> reversed(args.rbegin(), args.rend() - 1);
    app.parse(std::move(reversed));
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    if (code != 0) {
      std::cerr << "\n" << (app.get_subcommands().empty() ? app.help() : app.get_subcommands().front()->help());
      return kExitValidation;
    }
    return 0;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  }

  CLI::App* active = app.get_subcommands().front();
  const unsigned threads = common.threads == 0 ? lpoc::default_threads() : common.threads;

  try {
    Run run(command, active, common);

    if (command == "fit-errors") {
      const lpoc::SeriesPanel panel =
          run.load(panel_path, [&] { return lpoc::io::parse_panel_csv(lpoc::io::read_text(panel_path)); });
      const lpoc::AR1Fit fit = run.load(panel_path, [&] { return lpoc::fit_ar1(panel, keep_constant); });
      const lpoc::CorrelationMatrix basic = lpoc::r_tilde_basic(fit.errors);
      const lpoc::CorrelationMatrix pd = lpoc::r_tilde_pd(basic);
      run.write("ar1.csv", lpoc::io::ar1_csv(panel.labels, fit.params, panel.values.col(panel.periods() - 1)));
      run.write("errors.csv", lpoc::io::panel_csv(panel.labels, fit.errors.values, 2));
      run.write("rtilde_basic.csv", lpoc::io::matrix_csv(panel.labels, basic.values()));
      run.write("rtilde.csv", lpoc::io::matrix_csv(panel.labels, pd.values()));
      Json constant = Json::array();
      for (Index c : fit.constant_series) constant.push_back(panel.labels[static_cast<std::size_t>(c)]);
      run.note("constant_series", constant);
    } else if (command == "estimate" || command == "select-lambda") {
      lpoc::CorrelationMatrix rt = run.load(rtilde_path, [&] {
        lpoc::CorrelationMatrix r = lpoc::io::read_correlation(rtilde_path, !blend_pd);
        return blend_pd ? lpoc::r_tilde_pd(r) : r;
      });
      const lpoc::PenaltyMatrix p =
          penalty_path.empty() ? uniform_penalty(rt.dim())
                               : run.load(penalty_path, [&] { return lpoc::io::read_penalty(penalty_path, rt.labels()); });
      if (p.dim() != rt.dim()) throw Error(ErrorKind::DimensionMismatch, "penalty and input differ in dimension");
      lpoc::SolverConfig cfg = solver_flags.config();

      if (command == "estimate") {
        if (lambda_opt->count() > 0) {
          if (!(observations > 0.0)) {
            throw Error(ErrorKind::InvalidArgument, "--lambda needs --observations > 0");
          }
          cfg.lambda_eff = lambda / observations;
        } else if (lambda_eff_opt->count() > 0) {
          cfg.lambda_eff = lambda_eff;
        } else {
          throw Error(ErrorKind::InvalidArgument, "give --lambda-eff or --lambda with --observations");
        }
        if (!target_path.empty()) {
          cfg.target = run.load(target_path, [&] {
            const auto m = lpoc::io::parse_matrix_csv(lpoc::io::read_text(target_path));
            if (m.values.rows() != rt.dim()) throw Error(ErrorKind::DimensionMismatch, "target differs in dimension");
            return m.values;
          });
        }
        std::optional<MatrixXd> start;
        if (!start_path.empty()) {
          start = run.load(start_path, [&] { return lpoc::io::read_correlation(start_path, true).values(); });
        }
        cfg.validate();
        const lpoc::SolveReport rep = lpoc::solve_lpoc(rt, p, cfg, start);
        run.write("estimate.csv", lpoc::io::matrix_csv(rt.labels(), rep.estimate.values()));
        Json j = lpoc::io::to_json(rep);
        j["lambda_eff"] = cfg.lambda_eff;
        run.write_json("solve_report.json", std::move(j));
        run.note("lambda_eff", cfg.lambda_eff);
      } else {
        lpoc::LambdaSelectOptions o;
        o.observations = observations;
        o.smoothing = !no_smooth;
        o.span = span;
        o.warm_start = !cold_start;
        o.keep_estimates = true;
        o.threads = threads;
        const lpoc::LambdaScan scan = lpoc::select_lambda(rt, p, parse_grid(grid_spec), cfg, o);
        run.write("lambda_scan.csv", lpoc::io::lambda_scan_csv(scan));
        run.write_json("lambda_scan.json", lpoc::io::to_json(scan));
        run.write("estimate.csv",
                  lpoc::io::matrix_csv(rt.labels(), (*scan.estimates)[scan.chosen_index].values()));
        run.note("chosen_lambda", scan.chosen_lambda);
      }
    } else if (command == "screen-covariates") {
      const lpoc::CorrelationMatrix rt = run.load(rtilde_path, [&] { return lpoc::io::read_correlation(rtilde_path, false); });
      const lpoc::CovariateTable table = run.load(covariates_path, [&] {
        return lpoc::io::parse_covariates_csv(lpoc::io::read_text(covariates_path), rt.labels());
      });
      const lpoc::NullCorrelationCdf null =
          null_kind == "analytic"
              ? lpoc::NullCorrelationCdf::analytic(sample_size)
              : lpoc::NullCorrelationCdf::monte_carlo(sample_size, rt.dim(), mc_replications, common.seed);
      const lpoc::ScreenReport rep = lpoc::screen_covariates(rt, table, null, threshold);
      for (const auto& name : rep.skipped) {
        std::cerr << "warning: covariate '" << name << "' flags no pairs; skipped\n";
      }
      run.write("screen.csv", lpoc::io::screen_csv(rep));
      Json j = lpoc::io::to_json(rep);
      j["null"] = null_kind;
      run.write_json("screen.json", std::move(j));
    } else if (command == "build-penalty") {
      const auto labels = run.load(labels_path, [&] {
        return lpoc::io::parse_matrix_csv(lpoc::io::read_text(labels_path)).labels;
      });
      const lpoc::CovariateTable table = run.load(covariates_path, [&] {
        return lpoc::io::parse_covariates_csv(lpoc::io::read_text(covariates_path), labels);
      });
      if (!screen_path.empty()) {
        selected = run.load(screen_path, [&] {
          return Json::parse(lpoc::io::read_text(screen_path)).at("selected").get<std::vector<std::string>>();
        });
      }
      const lpoc::PenaltyMatrix p = lpoc::build_penalty(table, selected);
      run.write("penalty.csv", lpoc::io::matrix_csv(labels, p.values()));
      run.note("selected", selected);
      run.note("penalized_pairs", (p.values().array() > 0.0).count() / 2);
    } else if (command == "simulate-study") {
      lpoc::SimScenario s = scenario_path.empty()
                                ? lpoc::SimScenario::block_default()
                                : run.load(scenario_path, [&] {
                                    return lpoc::io::scenario_from_json(Json::parse(lpoc::io::read_text(scenario_path)));
                                  });
      if (replications_opt->count() > 0) s.replications = replications;
      if (study_lambda_opt->count() > 0) s.lambda = study_lambda;
      if (!epsilon_source.empty()) s.epsilon_source = lpoc::epsilon_source_from_string(epsilon_source);
      if (misalign) s.misalign_penalty = true;
      if (seed_opt_study->count() > 0) s.seed = common.seed;
      s.threads = threads;
      s.validate();
      const lpoc::StudyReport rep = lpoc::run_study(s);
      run.write("scenario.json", lpoc::io::to_json(s).dump(2) + "\n");
      run.write("table3.csv", lpoc::io::error_table_csv(rep.mean_errors));
      run.write("entries.csv", lpoc::io::entry_distribution_csv(rep));
      run.write("replications.csv", lpoc::io::replications_csv(rep));
      run.write_json("study.json", lpoc::io::to_json(rep));
      run.note("seed", s.seed);
    } else if (command == "project") {
      const lpoc::io::AR1Table ar1 =
          run.load(ar1_path, [&] { return lpoc::io::parse_ar1_csv(lpoc::io::read_text(ar1_path)); });
      const lpoc::CorrelationMatrix r = run.load(correlation_path, [&] {
        lpoc::CorrelationMatrix m = lpoc::io::read_correlation(correlation_path, true);
        if (m.labels() != ar1.labels) {
          throw Error(ErrorKind::UnknownLabel, "correlation labels do not match the AR(1) table");
        }
        return m;
      });
      const lpoc::ProjectionEnsemble e =
          lpoc::project(ar1.params, r, ar1.last, horizon, trajectories, common.seed, ar1.labels, threads);
      if (format == "binary") {
        run.write("ensemble.bin", lpoc::io::ensemble_binary(e));
      } else {
        run.write("ensemble.csv", lpoc::io::ensemble_csv(e));
      }
    } else if (command == "evaluate-crps") {
      const lpoc::ProjectionEnsemble a = run.load(model_a, [&] { return lpoc::io::read_ensemble(model_a); });
      const lpoc::ProjectionEnsemble b = run.load(model_b, [&] { return lpoc::io::read_ensemble(model_b); });
      const MatrixXd obs = run.load(obs_path, [&] {
        return observations_for(lpoc::io::parse_panel_csv(lpoc::io::read_text(obs_path)), a.labels());
      });
      const lpoc::RegionWeights w =
          run.load(weights_path, [&] { return lpoc::io::parse_weights_csv(lpoc::io::read_text(weights_path)); });
      const auto rows = lpoc::compare_models(a, b, obs, w);
      run.write("crps.csv", lpoc::io::crps_csv(rows, name_a, name_b));
    }
    run.finish();
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.is_validation() ? kExitValidation : kExitNumerical;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: Io: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return 0;
}
