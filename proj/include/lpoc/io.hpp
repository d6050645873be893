#ifndef LPOC_IO_HPP
#define LPOC_IO_HPP

#include "lpoc/baselines.hpp"
#include "lpoc/core.hpp"
#include "lpoc/empirical.hpp"
#include "lpoc/forecast.hpp"
#include "lpoc/lambda_select.hpp"
#include "lpoc/penalty.hpp"
#include "lpoc/simulation.hpp"
#include "lpoc/solver.hpp"

#include "json.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace lpoc::io {

using Json = nlohmann::ordered_json;
namespace fs = std::filesystem;

/// Shortest round-trip form is not required; 17 significant digits keeps
/// output byte-stable across runs.
std::string format_double(double v);

std::string read_text(const fs::path& path);

/// Writes to a sibling temporary file and renames it over `path`.
void write_text_atomic(const fs::path& path, std::string_view content);

/// FNV-1a 64-bit digest as 16 hex digits. Not cryptographic.
std::string digest(std::string_view content);
std::string file_digest(const fs::path& path);

struct LabeledMatrix {
  std::vector<std::string> labels;
  MatrixXd values;
};

/// Label header followed by C rows of C numbers.
LabeledMatrix parse_matrix_csv(std::string_view text);
std::string matrix_csv(const std::vector<std::string>& labels, MatrixRef m);

CorrelationMatrix read_correlation(const fs::path& path, bool strict);
PenaltyMatrix read_penalty(const fs::path& path, const std::vector<std::string>& labels);

/// "label,t1,...,tT" header, one row per series.
SeriesPanel parse_panel_csv(std::string_view text);
std::string panel_csv(const std::vector<std::string>& labels, MatrixRef values,
                      Index first_period = 1);

/// "label,mu,phi,sigma,last" with one row per series.
std::string ar1_csv(const std::vector<std::string>& labels, const AR1Params& params,
                    VectorRef last);
struct AR1Table {
  std::vector<std::string> labels;
  AR1Params params;
  VectorXd last;
};
AR1Table parse_ar1_csv(std::string_view text);

/// Rows "label_i,label_j,covariate_name,value". An optional header is
/// skipped; pairs not listed stay false.
CovariateTable parse_covariates_csv(std::string_view text, const std::vector<std::string>& labels);

/// Rows "region,label,period,weight". An empty period or "*" applies the
/// weight to every period; otherwise periods count from 1.
RegionWeights parse_weights_csv(std::string_view text);

/// Long CSV "trajectory,period,<labels...>".
std::string ensemble_csv(const ProjectionEnsemble& e);
ProjectionEnsemble parse_ensemble_csv(std::string_view text);
/// Little-endian binary: magic, sizes, labels, then the values.
std::string ensemble_binary(const ProjectionEnsemble& e);
ProjectionEnsemble parse_ensemble_binary(std::string_view bytes);
ProjectionEnsemble read_ensemble(const fs::path& path);

Json to_json(const SolveReport& r);
Json to_json(const LambdaScan& s);
Json to_json(const ScreenReport& r);
Json to_json(const ErrorReport& r);
Json to_json(const StudyReport& r);
Json to_json(const SimScenario& s);
Json matrix_json(MatrixRef m);

/// Overrides the defaults of SimScenario::block_default with the keys present.
SimScenario scenario_from_json(const Json& j);

std::string lambda_scan_csv(const LambdaScan& s);
std::string screen_csv(const ScreenReport& r);
/// Rows grouped by element class (all, true zero, true nonzero), one per estimator.
std::string error_table_csv(const ErrorReport& r);
/// Estimated entries by replication, estimator and true-value class.
std::string entry_distribution_csv(const StudyReport& r);
std::string replications_csv(const StudyReport& r);
std::string crps_csv(const std::vector<CrpsRow>& rows, const std::string& name_a,
                     const std::string& name_b);

}  // namespace lpoc::io

#endif  // LPOC_IO_HPP
