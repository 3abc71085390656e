#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "alcoint/dgp.hpp"
#include "alcoint/estimators.hpp"
#include "alcoint/limitdist.hpp"
#include "alcoint/montecarlo.hpp"
#include "json.hpp"

// JSON schemas are documented in the README; parse errors throw ConfigError
// with the offending field in the message.
namespace alcoint::io {

using json = nlohmann::json;

json matrix_to_json(const Eigen::MatrixXd& m);
Eigen::MatrixXd matrix_from_json(const json& j, const std::string& field);
json vector_to_json(const Eigen::VectorXd& v);
Eigen::VectorXd vector_from_json(const json& j, const std::string& field);

json extended_to_json(const ExtendedReal& v);
ExtendedReal extended_from_json(const json& j, const std::string& field);
json extvec_to_json(const ExtVec& v);
ExtVec extvec_from_json(const json& j, const std::string& field);

json tuning_rule_to_json(const TuningRule& r);
TuningRule tuning_rule_from_json(const json& j);

json model_config_to_json(const dgp::ModelConfig& m);
dgp::ModelConfig model_config_from_json(const json& j);

json experiment_plan_to_json(const mc::ExperimentPlan& p);
mc::ExperimentPlan experiment_plan_from_json(const json& j);

json fit_result_to_json(const est::FitResult& f);

json summary_to_json(const mc::MixedDistributionSummary& s);

// Parses a whole config file; throws ConfigError with line/byte diagnostics
// on malformed JSON, and on a missing file when must_exist.
json load_json_file(const std::string& path);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

// --- CSV ---

// Replication records: rep_id, beta_ols*, beta_al*, active*, scaled_err_ols*,
// scaled_err_al* (suffix 1..k). Doubles round-trip exactly (%.17g).
std::string records_to_csv(const std::vector<mc::ReplicationRecord>& records);
std::vector<mc::ReplicationRecord> records_from_csv(const std::string& text);

// Limit draws: draw_id, atom, value1..valuek. For k = 1 `atom` is 0/1; for
// multivariate draws it is the at-kink bitmask.
std::string mixed_draws_to_csv(const std::vector<limit::MixedDraw>& draws);
std::string multivariate_draws_to_csv(const std::vector<limit::MultivariateDraw>& draws);

// Generated path: t, y, x1..xk, u, v1..vk (regressor columns as fitted).
std::string path_to_csv(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                        const Eigen::VectorXd& u, const Eigen::MatrixXd& v,
                        dgp::RegressionFlavor flavor);

// Reads a dataset from CSV with a header containing y and x1..xk (extra
// columns ignored).
est::Dataset dataset_from_csv(const std::string& text);

// Run manifest; written last so its presence marks a completed run.
struct RunManifest {
  std::string command;
  json config;
  std::uint64_t seed = 0;
  std::string version;
  double wall_seconds = 0.0;
  std::vector<std::string> outputs;
};

void write_manifest(const std::string& path, const RunManifest& m);

extern const char* kVersion;

}  // namespace alcoint::io
