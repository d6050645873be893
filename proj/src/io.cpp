#include "lpoc/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <unistd.h>

namespace lpoc::io {

namespace {

[[noreturn]] void parse_error(const std::string& what, Index line = -1) {
  throw Error(ErrorKind::Parse, line >= 0 ? "line " + std::to_string(line) + ": " + what : what,
              line);
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return s;
}

std::vector<std::string> split_fields(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    out.emplace_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

// Nonblank lines with their 1-based line numbers.
std::vector<std::pair<Index, std::vector<std::string>>> csv_rows(std::string_view text) {
  std::vector<std::pair<Index, std::vector<std::string>>> rows;
  Index number = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    ++number;
    const std::string_view line = trim(text.substr(start, end - start));
    if (!line.empty()) rows.emplace_back(number, split_fields(line));
    start = end + 1;
  }
  return rows;
}

bool try_number(const std::string& field, double& out) {
  const char* first = field.data();
  const char* last = field.data() + field.size();
  if (first != last && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last && first != last;
}

double number(const std::string& field, Index line) {
  double v = 0.0;
  if (!try_number(field, v)) parse_error("'" + field + "' is not a number", line);
  return v;
}

Index label_index(const std::vector<std::string>& labels, const std::string& label, Index line) {
  const auto it = std::find(labels.begin(), labels.end(), label);
  if (it == labels.end()) {
    throw Error(ErrorKind::UnknownLabel, "line " + std::to_string(line) + ": unknown label '" + label + "'", line);
  }
  return static_cast<Index>(it - labels.begin());
}

Json cells_json(const CellErrors& c) { return {{"mae", c.mae}, {"mse", c.mse}, {"cells", c.cells}}; }

Json vector_json(const std::vector<double>& v) {
  Json out = Json::array();
  for (double x : v) {
    if (std::isfinite(x)) {
      out.push_back(x);
    } else {
      out.push_back(nullptr);
    }
  }
  return out;
}

void append_row(std::string& out, std::initializer_list<std::string> fields) {
  bool first = true;
  for (const auto& f : fields) {
    if (!first) out += ',';
    out += f;
    first = false;
  }
  out += '\n';
}

std::string fmt_or_empty(double v) { return std::isfinite(v) ? format_double(v) : std::string(); }

}  // namespace

std::string format_double(double v) {
  if (v == 0.0) v = 0.0;  // drops the sign of -0
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_atomic(const fs::path& path, std::string_view content) {
  const fs::path parent = path.has_parent_path() ? path.parent_path() : fs::path(".");
  std::error_code ec;
  fs::create_directories(parent, ec);
  const fs::path tmp = parent / ("." + path.filename().string() + ".tmp" + std::to_string(::getpid()));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::Io, "cannot write '" + tmp.string() + "'");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw Error(ErrorKind::Io, "write failed for '" + tmp.string() + "'");
  }
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error(ErrorKind::Io, "cannot replace '" + path.string() + "'");
  }
}

std::string digest(std::string_view content) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : content) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string file_digest(const fs::path& path) { return digest(read_text(path)); }

LabeledMatrix parse_matrix_csv(std::string_view text) {
  const auto rows = csv_rows(text);
  if (rows.empty()) parse_error("matrix file is empty");
  LabeledMatrix out;
  out.labels = rows.front().second;
  const Index n = static_cast<Index>(out.labels.size());
  if (static_cast<Index>(rows.size()) != n + 1) {
    throw Error(ErrorKind::NotSquare, "expected " + std::to_string(n) + " rows after the label header, found " +
                                          std::to_string(rows.size() - 1));
  }
  out.values.resize(n, n);
  for (Index i = 0; i < n; ++i) {
    const auto& [line, fields] = rows[static_cast<std::size_t>(i + 1)];
    if (static_cast<Index>(fields.size()) != n) {
      throw Error(ErrorKind::NotSquare, "line " + std::to_string(line) + ": expected " + std::to_string(n) + " fields",
                  line);
    }
    for (Index j = 0; j < n; ++j) out.values(i, j) = number(fields[static_cast<std::size_t>(j)], line);
  }
  return out;
}

std::string matrix_csv(const std::vector<std::string>& labels, MatrixRef m) {
  std::string out;
  for (Index j = 0; j < m.cols(); ++j) {
    if (j) out += ',';
    out += j < static_cast<Index>(labels.size()) ? labels[static_cast<std::size_t>(j)]
                                                 : "s" + std::to_string(j + 1);
  }
  out += '\n';
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j) out += ',';
      out += format_double(m(i, j));
    }
    out += '\n';
  }
  return out;
}

CorrelationMatrix read_correlation(const fs::path& path, bool strict) {
  LabeledMatrix m = parse_matrix_csv(read_text(path));
  return validate_correlation(m.values, strict).with_labels(std::move(m.labels));
}

PenaltyMatrix read_penalty(const fs::path& path, const std::vector<std::string>& labels) {
  const LabeledMatrix m = parse_matrix_csv(read_text(path));
  if (!labels.empty() && m.labels != labels) {
    throw Error(ErrorKind::UnknownLabel, "penalty labels do not match the correlation labels");
  }
  return validate_penalty(m.values);
}

SeriesPanel parse_panel_csv(std::string_view text) {
  const auto rows = csv_rows(text);
  if (rows.size() < 2) parse_error("panel needs a header and at least one series");
  const std::size_t width = rows.front().second.size();
  if (width < 2) parse_error("panel header has no periods", rows.front().first);
  SeriesPanel panel;
  panel.values.resize(static_cast<Index>(rows.size() - 1), static_cast<Index>(width - 1));
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& [line, fields] = rows[r];
    if (fields.size() != width) parse_error("expected " + std::to_string(width) + " fields", line);
    panel.labels.push_back(fields.front());
    for (std::size_t t = 1; t < width; ++t) {
      panel.values(static_cast<Index>(r - 1), static_cast<Index>(t - 1)) = number(fields[t], line);
    }
  }
  std::set<std::string> seen(panel.labels.begin(), panel.labels.end());
  if (seen.size() != panel.labels.size()) parse_error("duplicate series label");
  return panel;
}

std::string panel_csv(const std::vector<std::string>& labels, MatrixRef values, Index first_period) {
  std::string out = "label";
  for (Index t = 0; t < values.cols(); ++t) out += ",t" + std::to_string(first_period + t);
  out += '\n';
  for (Index i = 0; i < values.rows(); ++i) {
    out += labels.at(static_cast<std::size_t>(i));
    for (Index t = 0; t < values.cols(); ++t) out += "," + format_double(values(i, t));
    out += '\n';
  }
  return out;
}

std::string ar1_csv(const std::vector<std::string>& labels, const AR1Params& params, VectorRef last) {
  std::string out = "label,mu,phi,sigma,last\n";
  for (Index c = 0; c < params.size(); ++c) {
    append_row(out, {labels.at(static_cast<std::size_t>(c)), format_double(params.mu(c)),
                     format_double(params.phi(c)), format_double(params.sigma(c)), format_double(last(c))});
  }
  return out;
}

AR1Table parse_ar1_csv(std::string_view text) {
  const auto rows = csv_rows(text);
  if (rows.size() < 2) parse_error("AR(1) table needs a header and at least one series");
  const std::vector<std::string> expected{"label", "mu", "phi", "sigma", "last"};
  if (rows.front().second != expected) parse_error("AR(1) header must be label,mu,phi,sigma,last", rows.front().first);
  AR1Table t;
  const Index C = static_cast<Index>(rows.size() - 1);
  t.params.mu.resize(C);
  t.params.phi.resize(C);
  t.params.sigma.resize(C);
  t.last.resize(C);
  for (Index c = 0; c < C; ++c) {
    const auto& [line, f] = rows[static_cast<std::size_t>(c + 1)];
    if (f.size() != 5) parse_error("expected 5 fields", line);
    t.labels.push_back(f[0]);
    t.params.mu(c) = number(f[1], line);
    t.params.phi(c) = number(f[2], line);
    t.params.sigma(c) = number(f[3], line);
    t.last(c) = number(f[4], line);
  }
  t.params.validate();
  return t;
}

CovariateTable parse_covariates_csv(std::string_view text, const std::vector<std::string>& labels) {
  CovariateTable table(labels);
  bool first = true;
  for (const auto& [line, f] : csv_rows(text)) {
    double v = 0.0;
    if (first && f.size() == 4 && !try_number(f[3], v)) {
      first = false;
      continue;  // header
    }
    first = false;
    if (f.size() != 4) parse_error("expected label_i,label_j,covariate_name,value", line);
    const Index i = label_index(labels, f[0], line);
    const Index j = label_index(labels, f[1], line);
    v = number(f[3], line);
    if (v != 0.0 && v != 1.0) parse_error("covariate values must be 0 or 1", line);
    if (i == j) continue;
    table.mark(f[2], i, j, v == 1.0);
  }
  return table;
}

RegionWeights parse_weights_csv(std::string_view text) {
  // region -> label -> (period -> weight); period 0 stands for "every period".
  std::map<std::string, std::map<std::string, std::map<Index, double>>> raw;
  bool first = true;
  for (const auto& [line, f] : csv_rows(text)) {
    double v = 0.0;
    if (first && f.size() == 4 && !try_number(f[3], v)) {
      first = false;
      continue;
    }
    first = false;
    if (f.size() != 4) parse_error("expected region,label,period,weight", line);
    Index period = 0;
    if (!f[2].empty() && f[2] != "*") {
      const double p = number(f[2], line);
      if (p < 1 || p != std::floor(p)) parse_error("period must be a positive integer", line);
      period = static_cast<Index>(p);
    }
    v = number(f[3], line);
    if (!(v >= 0.0)) parse_error("weights must be nonnegative", line);
    raw[f[0]][f[1]][period] = v;
  }
  RegionWeights w;
  for (const auto& [region, members] : raw) {
    for (const auto& [label, periods] : members) {
      std::vector<double> values;
      if (periods.size() == 1 && periods.begin()->first == 0) {
        values.push_back(periods.begin()->second);
      } else {
        if (periods.count(0)) parse_error("'" + label + "' in '" + region + "' mixes static and per-period weights");
        const Index last = periods.rbegin()->first;
        if (static_cast<Index>(periods.size()) != last) {
          parse_error("'" + label + "' in '" + region + "' skips a period");
        }
        for (const auto& [p, x] : periods) values.push_back(x);
      }
      w.regions[region][label] = std::move(values);
    }
  }
  return w;
}

std::string ensemble_csv(const ProjectionEnsemble& e) {
  std::string out = "trajectory,period";
  for (const auto& l : e.labels()) out += "," + l;
  out += '\n';
  for (Index t = 0; t < e.trajectories(); ++t) {
    for (Index p = 0; p < e.horizon(); ++p) {
      out += std::to_string(t + 1) + "," + std::to_string(p + 1);
      for (Index c = 0; c < e.series(); ++c) out += "," + format_double(e.at(t, p, c));
      out += '\n';
    }
  }
  return out;
}

ProjectionEnsemble parse_ensemble_csv(std::string_view text) {
  const auto rows = csv_rows(text);
  if (rows.size() < 2) parse_error("ensemble file has no rows");
  const auto& header = rows.front().second;
  if (header.size() < 3 || header[0] != "trajectory" || header[1] != "period") {
    parse_error("ensemble header must start with trajectory,period", rows.front().first);
  }
  std::vector<std::string> labels(header.begin() + 2, header.end());
  Index n = 0, h = 0;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& [line, f] = rows[r];
    if (f.size() != header.size()) parse_error("expected " + std::to_string(header.size()) + " fields", line);
    n = std::max(n, static_cast<Index>(number(f[0], line)));
    h = std::max(h, static_cast<Index>(number(f[1], line)));
  }
  if (static_cast<Index>(rows.size() - 1) != n * h) parse_error("ensemble rows do not form a full grid");
  ProjectionEnsemble e(n, h, labels);
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& [line, f] = rows[r];
    const Index t = static_cast<Index>(number(f[0], line)) - 1;
    const Index p = static_cast<Index>(number(f[1], line)) - 1;
    if (t < 0 || p < 0) parse_error("trajectory and period count from 1", line);
    for (Index c = 0; c < e.series(); ++c) e.at(t, p, c) = number(f[static_cast<std::size_t>(c + 2)], line);
  }
  return e;
}

namespace {

constexpr char kMagic[8] = {'L', 'P', 'O', 'C', 'E', 'N', 'S', '1'};

template <typename T>
void put(std::string& out, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.append(buf, sizeof(T));
}

template <typename T>
T take(std::string_view& in) {
  if (in.size() < sizeof(T)) parse_error("ensemble binary is truncated");
  T v;
  std::memcpy(&v, in.data(), sizeof(T));
  in.remove_prefix(sizeof(T));
  return v;
}

}  // namespace

std::string ensemble_binary(const ProjectionEnsemble& e) {
  std::string out(kMagic, sizeof kMagic);
  put<std::uint64_t>(out, static_cast<std::uint64_t>(e.trajectories()));
  put<std::uint64_t>(out, static_cast<std::uint64_t>(e.horizon()));
  put<std::uint64_t>(out, static_cast<std::uint64_t>(e.series()));
  for (const auto& l : e.labels()) {
    put<std::uint32_t>(out, static_cast<std::uint32_t>(l.size()));
    out += l;
  }
  for (Index t = 0; t < e.trajectories(); ++t)
    for (Index p = 0; p < e.horizon(); ++p)
      for (Index c = 0; c < e.series(); ++c) put<double>(out, e.at(t, p, c));
  return out;
}

ProjectionEnsemble parse_ensemble_binary(std::string_view in) {
  if (in.size() < sizeof kMagic || std::memcmp(in.data(), kMagic, sizeof kMagic) != 0) {
    parse_error("not an ensemble binary file");
  }
  in.remove_prefix(sizeof kMagic);
  const auto n = static_cast<Index>(take<std::uint64_t>(in));
  const auto h = static_cast<Index>(take<std::uint64_t>(in));
  const auto c = static_cast<Index>(take<std::uint64_t>(in));
  std::vector<std::string> labels;
  for (Index k = 0; k < c; ++k) {
    const auto len = take<std::uint32_t>(in);
    if (in.size() < len) parse_error("ensemble binary is truncated");
    labels.emplace_back(in.substr(0, len));
    in.remove_prefix(len);
  }
  if (in.size() != static_cast<std::size_t>(n * h * c) * sizeof(double)) {
    parse_error("ensemble binary has the wrong payload size");
  }
  ProjectionEnsemble e(n, h, std::move(labels));
  for (Index t = 0; t < n; ++t)
    for (Index p = 0; p < h; ++p)
      for (Index s = 0; s < c; ++s) e.at(t, p, s) = take<double>(in);
  return e;
}

ProjectionEnsemble read_ensemble(const fs::path& path) {
  const std::string bytes = read_text(path);
  if (bytes.size() >= sizeof kMagic && std::memcmp(bytes.data(), kMagic, sizeof kMagic) == 0) {
    return parse_ensemble_binary(bytes);
  }
  return parse_ensemble_csv(bytes);
}

Json matrix_json(MatrixRef m) {
  Json rows = Json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json to_json(const SolveReport& r) {
  return {{"converged", r.converged},
          {"step_underflow", r.step_underflow},
          {"outer_iterations", r.outer_iterations},
          {"exact_zero_pairs", r.exact_zero_count},
          {"objective_trace", r.objective_trace},
          {"inner_steps", r.inner_step_counts},
          {"labels", r.estimate.labels()},
          {"estimate", matrix_json(r.estimate.values())}};
}

Json to_json(const LambdaScan& s) {
  std::vector<bool> conv(s.converged.begin(), s.converged.end());
  Json j{{"chosen_lambda", s.chosen_lambda},
         {"chosen_index", s.chosen_index},
         {"grid", s.grid},
         {"k", vector_json(s.k_values)}};
  j["smoothed_k"] = s.smoothed_k ? vector_json(*s.smoothed_k) : Json(nullptr);
  j["converged"] = conv;
  return j;
}

Json to_json(const ScreenReport& r) {
  Json covs = Json::array();
  for (const auto& c : r.covariates) {
    covs.push_back({{"covariate", c.name},
                    {"pairs", c.pairs},
                    {"ks_statistic", c.statistic},
                    {"p_value", c.p_value},
                    {"selected", c.selected}});
  }
  return {{"sample_size", r.sample_size},
          {"threshold", r.threshold},
          {"covariates", covs},
          {"selected", r.selected},
          {"skipped_empty", r.skipped}};
}

Json to_json(const ErrorReport& r) {
  Json out = Json::array();
  for (const auto& e : r.estimators) {
    out.push_back({{"estimator", e.name},
                   {"all", cells_json(e.all)},
                   {"zero", cells_json(e.zero)},
                   {"nonzero", cells_json(e.nonzero)}});
  }
  return out;
}

Json to_json(const StudyReport& r) {
  Json reps = Json::array();
  for (const auto& x : r.replications) {
    Json j{{"index", x.index}, {"failed", x.failed}};
    if (x.failed) {
      j["failure"] = x.failure;
    } else {
      j["errors"] = to_json(x.errors);
      j["lpoc_exact_zero_fraction"] = x.lpoc_exact_zero_fraction;
      j["lpoc_nonzero_mean"] = x.lpoc_nonzero_mean;
      j["pearson_nonzero_mean"] = x.pearson_nonzero_mean;
      j["ledoit_wolf_intensity"] = x.lw_intensity;
      j["lpoc_converged"] = x.lpoc_converged;
      j["lpoc_outer_iterations"] = x.lpoc_outer_iterations;
      j["all_estimates_pd"] = x.all_estimates_pd;
    }
    reps.push_back(std::move(j));
  }
  return {{"lambda_eff", r.lambda_eff},
          {"replications_run", r.replications.size()},
          {"failures", r.failures},
          {"mean_errors", to_json(r.mean_errors)},
          {"lpoc_exact_zero_fraction", r.exact_zero_fraction},
          {"within_block",
           {{"lpoc_mean", r.lpoc_nonzero_mean},
            {"lpoc_se", r.lpoc_nonzero_se},
            {"lpoc_sd", r.lpoc_nonzero_sd},
            {"pearson_mean", r.pearson_nonzero_mean},
            {"pearson_se", r.pearson_nonzero_se},
            {"pearson_sd", r.pearson_nonzero_sd}}},
          {"lpoc_closer_to_zero", r.lpoc_closer_to_zero},
          {"pd_violations", r.pd_violations},
          {"ledoit_wolf_formula", LedoitWolfResult::kFormula},
          {"replications", reps}};
}

Json to_json(const SimScenario& s) {
  auto vec = [](const VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); };
  Json j{{"dim", s.dim},
         {"periods", s.periods},
         {"mu", vec(s.ar1.mu)},
         {"phi", vec(s.ar1.phi)},
         {"sigma", vec(s.ar1.sigma)},
         {"true_correlation", matrix_json(s.true_correlation.values())}};
  j["penalty"] = s.penalty ? matrix_json(s.penalty->values()) : Json("true-zeros");
  j["misalign_penalty"] = s.misalign_penalty;
  j["lambda"] = s.lambda;
  j["replications"] = s.replications;
  j["seed"] = s.seed;
  j["epsilon_source"] = to_string(s.epsilon_source);
  j["solver"] = {{"outer_tol", s.solver.outer_tol}, {"inner_tol", s.solver.inner_tol},
                 {"max_outer", s.solver.max_outer}, {"max_inner", s.solver.max_inner},
                 {"alpha0", s.solver.alpha0},       {"beta", s.solver.beta},
                 {"c1", s.solver.c1},               {"pd_floor", s.solver.pd_floor}};
  return j;
}

namespace {

MatrixXd matrix_from_json(const Json& j, const char* what) {
  if (!j.is_array() || j.empty()) throw Error(ErrorKind::Parse, std::string(what) + " must be a nonempty array of rows");
  const Index n = static_cast<Index>(j.size());
  MatrixXd m(n, n);
  for (Index i = 0; i < n; ++i) {
    const Json& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Index>(row.size()) != n) {
      throw Error(ErrorKind::NotSquare, std::string(what) + " must be square", i);
    }
    for (Index k = 0; k < n; ++k) m(i, k) = row[static_cast<std::size_t>(k)].get<double>();
  }
  return m;
}

// A scalar broadcasts to every series.
VectorXd vector_from_json(const Json& j, Index dim, const char* what) {
  if (j.is_number()) return VectorXd::Constant(dim, j.get<double>());
  if (!j.is_array() || static_cast<Index>(j.size()) != dim) {
    throw Error(ErrorKind::DimensionMismatch, std::string(what) + " must be a number or an array of length dim");
  }
  VectorXd v(dim);
  for (Index i = 0; i < dim; ++i) v(i) = j[static_cast<std::size_t>(i)].get<double>();
  return v;
}

}  // namespace

SimScenario scenario_from_json(const Json& j) {
  if (!j.is_object()) throw Error(ErrorKind::Parse, "scenario must be a JSON object");
  static const std::set<std::string> known{
      "dim",          "periods",          "mu",     "phi",          "sigma",       "blocks",
      "within_block", "true_correlation", "penalty", "misalign_penalty", "lambda", "replications",
      "seed",         "epsilon_source",   "solver", "threads"};
  for (const auto& [key, value] : j.items()) {
    if (!known.count(key)) throw Error(ErrorKind::Parse, "unknown scenario key '" + key + "'");
  }
  try {
    SimScenario s = SimScenario::block_default();
    if (j.contains("true_correlation")) {
      s.true_correlation = validate_correlation(matrix_from_json(j["true_correlation"], "true_correlation"), true);
      s.dim = s.true_correlation.dim();
    } else if (j.contains("blocks") || j.contains("within_block")) {
      const std::vector<Index> blocks = j.value("blocks", std::vector<Index>{3, 3, 3});
      s.true_correlation = SimScenario::block_correlation(blocks, j.value("within_block", 0.5));
      s.dim = s.true_correlation.dim();
    }
    if (j.contains("dim") && j["dim"].get<Index>() != s.dim) {
      throw Error(ErrorKind::DimensionMismatch, "dim disagrees with the true correlation");
    }
    s.periods = j.value("periods", s.periods);
    s.ar1.mu = vector_from_json(j.value("mu", Json(0.0)), s.dim, "mu");
    s.ar1.phi = vector_from_json(j.value("phi", Json(0.5)), s.dim, "phi");
    s.ar1.sigma = vector_from_json(j.value("sigma", Json(1.0)), s.dim, "sigma");
    if (j.contains("penalty") && !(j["penalty"].is_string() && j["penalty"] == "true-zeros")) {
      s.penalty = validate_penalty(matrix_from_json(j["penalty"], "penalty"));
    }
    s.misalign_penalty = j.value("misalign_penalty", s.misalign_penalty);
    s.lambda = j.value("lambda", s.lambda);
    s.replications = j.value("replications", s.replications);
    s.seed = j.value("seed", s.seed);
    s.threads = j.value("threads", s.threads);
    if (j.contains("epsilon_source")) {
      s.epsilon_source = epsilon_source_from_string(j["epsilon_source"].get<std::string>());
    }
    if (j.contains("solver")) {
      const Json& c = j["solver"];
      s.solver.outer_tol = c.value("outer_tol", s.solver.outer_tol);
      s.solver.inner_tol = c.value("inner_tol", s.solver.inner_tol);
      s.solver.max_outer = c.value("max_outer", s.solver.max_outer);
      s.solver.max_inner = c.value("max_inner", s.solver.max_inner);
      s.solver.alpha0 = c.value("alpha0", s.solver.alpha0);
      s.solver.beta = c.value("beta", s.solver.beta);
      s.solver.c1 = c.value("c1", s.solver.c1);
      s.solver.pd_floor = c.value("pd_floor", s.solver.pd_floor);
    }
    s.validate();
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Parse, std::string("scenario: ") + e.what());
  }
}

std::string lambda_scan_csv(const LambdaScan& s) {
  std::string out = "lambda,k,smoothed_k,converged\n";
  for (std::size_t g = 0; g < s.grid.size(); ++g) {
    append_row(out, {format_double(s.grid[g]), fmt_or_empty(s.k_values[g]),
                     s.smoothed_k ? fmt_or_empty((*s.smoothed_k)[g]) : std::string(),
                     s.converged[g] ? "1" : "0"});
  }
  return out;
}

std::string screen_csv(const ScreenReport& r) {
  std::string out = "covariate,pairs,ks_statistic,p_value,selected\n";
  for (const auto& c : r.covariates) {
    append_row(out, {c.name, std::to_string(c.pairs), format_double(c.statistic),
                     format_double(c.p_value), c.selected ? "1" : "0"});
  }
  for (const auto& name : r.skipped) append_row(out, {name, "0", "", "", "0"});
  return out;
}

std::string error_table_csv(const ErrorReport& r) {
  std::string out = "elements,estimator,mae,mse\n";
  for (auto [label, member] : {std::pair{"all", &EstimatorErrors::all}, std::pair{"true_zero", &EstimatorErrors::zero},
                               std::pair{"true_nonzero", &EstimatorErrors::nonzero}}) {
    for (const auto& e : r.estimators) {
      const CellErrors& c = e.*member;
      append_row(out, {label, e.name, format_double(c.mae), format_double(c.mse)});
    }
  }
  return out;
}

std::string entry_distribution_csv(const StudyReport& r) {
  std::string out = "replication,estimator,truth_class,value\n";
  for (const auto& rep : r.replications) {
    if (rep.failed) continue;
    const std::string idx = std::to_string(rep.index);
    for (auto [est, cls, values] :
         {std::tuple{"Pearson", "zero", &rep.pearson_zero}, std::tuple{"Pearson", "nonzero", &rep.pearson_nonzero},
          std::tuple{"LPoC", "zero", &rep.lpoc_zero}, std::tuple{"LPoC", "nonzero", &rep.lpoc_nonzero}}) {
      for (double v : *values) append_row(out, {idx, est, cls, format_double(v)});
    }
  }
  return out;
}

std::string replications_csv(const StudyReport& r) {
  std::string out =
      "replication,failed,pearson_mse,ledoit_wolf_mse,lpoc_mse,lpoc_zero_mae,lpoc_exact_zero_fraction,"
      "lpoc_nonzero_mean,ledoit_wolf_intensity,lpoc_converged\n";
  for (const auto& rep : r.replications) {
    if (rep.failed) {
      append_row(out, {std::to_string(rep.index), "1", "", "", "", "", "", "", "", ""});
      continue;
    }
    append_row(out, {std::to_string(rep.index), "0", format_double(rep.errors.find("Pearson").all.mse),
                     format_double(rep.errors.find("LedoitWolf").all.mse),
                     format_double(rep.errors.find("LPoC").all.mse),
                     format_double(rep.errors.find("LPoC").zero.mae), format_double(rep.lpoc_exact_zero_fraction),
                     format_double(rep.lpoc_nonzero_mean), format_double(rep.lw_intensity),
                     rep.lpoc_converged ? "1" : "0"});
  }
  return out;
}

std::string crps_csv(const std::vector<CrpsRow>& rows, const std::string& name_a, const std::string& name_b) {
  std::string out = "region," + name_a + "," + name_b + ",better\n";
  for (const auto& r : rows) {
    append_row(out, {r.region, format_double(r.model_a), format_double(r.model_b),
                     r.a_better ? name_a : (r.b_better ? name_b : "tie")});
  }
  return out;
}

}  // namespace lpoc::io
