#include "alcoint/io.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace alcoint::io {

const char* kVersion = "0.1.0";

namespace {

std::string fmt(double v) {
  char buf[40];
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

const json& require(const json& j, const std::string& field) {
  if (!j.contains(field)) throw ConfigError("missing config field: " + field);
  return j.at(field);
}

double require_number(const json& j, const std::string& field) {
  const json& v = require(j, field);
  if (!v.is_number()) throw ConfigError("field must be a number: " + field);
  return v.get<double>();
}

}  // namespace

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const json& j, const std::string& field) {
  if (!j.is_array() || j.empty() || !j.at(0).is_array())
    throw ConfigError("field must be an array of rows: " + field);
  const int rows = static_cast<int>(j.size());
  const int cols = static_cast<int>(j.at(0).size());
  Eigen::MatrixXd m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    if (static_cast<int>(j.at(i).size()) != cols)
      throw ConfigError("ragged matrix rows: " + field);
    for (int c = 0; c < cols; ++c) {
      if (!j.at(i).at(c).is_number())
        throw ConfigError("matrix entries must be numbers: " + field);
      m(i, c) = j.at(i).at(c).get<double>();
    }
  }
  return m;
}

json vector_to_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

Eigen::VectorXd vector_from_json(const json& j, const std::string& field) {
  if (j.is_number()) {
    Eigen::VectorXd v(1);
    v(0) = j.get<double>();
    return v;
  }
  if (!j.is_array()) throw ConfigError("field must be an array: " + field);
  Eigen::VectorXd v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j.at(i).is_number()) throw ConfigError("vector entries must be numbers: " + field);
    v(static_cast<int>(i)) = j.at(i).get<double>();
  }
  return v;
}

json extended_to_json(const ExtendedReal& v) {
  if (v.is_finite()) return v.value();
  return v.sign() > 0 ? "inf" : "-inf";
}

ExtendedReal extended_from_json(const json& j, const std::string& field) {
  if (j.is_number()) return ExtendedReal(j.get<double>());
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "inf" || s == "+inf") return ExtendedReal::plus_inf();
    if (s == "-inf") return ExtendedReal::minus_inf();
  }
  throw ConfigError("field must be a number or \"inf\"/\"-inf\": " + field);
}

json extvec_to_json(const ExtVec& v) {
  json a = json::array();
  for (const auto& e : v) a.push_back(extended_to_json(e));
  return a;
}

ExtVec extvec_from_json(const json& j, const std::string& field) {
  if (j.is_number() || j.is_string()) return {extended_from_json(j, field)};
  if (!j.is_array()) throw ConfigError("field must be an array: " + field);
  ExtVec v;
  v.reserve(j.size());
  for (const auto& e : j) v.push_back(extended_from_json(e, field));
  return v;
}

json tuning_rule_to_json(const TuningRule& r) {
  json j;
  switch (r.kind) {
    case TuningRule::Kind::Const:
      j["kind"] = "const";
      j["lambda0"] = r.value;
      break;
    case TuningRule::Kind::Power:
      j["kind"] = "power";
      j["exponent"] = r.value;
      break;
    case TuningRule::Kind::Linear:
      j["kind"] = "linear";
      break;
  }
  return j;
}

TuningRule tuning_rule_from_json(const json& j) {
  TuningRule r;
  const std::string kind = require(j, "kind").get<std::string>();
  if (kind == "const") {
    r.kind = TuningRule::Kind::Const;
    r.value = require_number(j, "lambda0");
  } else if (kind == "power") {
    r.kind = TuningRule::Kind::Power;
    r.value = require_number(j, "exponent");
  } else if (kind == "linear") {
    r.kind = TuningRule::Kind::Linear;
  } else {
    throw ConfigError("unknown tuning rule kind: " + kind);
  }
  r.validate();
  return r;
}

json model_config_to_json(const dgp::ModelConfig& m) {
  json j;
  j["k"] = m.k;
  json coeffs = json::array();
  for (const auto& c : m.errors.coeffs) coeffs.push_back(matrix_to_json(c));
  j["errors"] = {{"coeffs", coeffs},
                 {"innovation",
                  {{"sigma", matrix_to_json(m.errors.innovation.sigma)},
                   {"family", "gaussian"}}}};
  json dyn;
  dyn["kind"] = m.dynamics.kind == dgp::RegressorKind::UnitRoot ? "unit_root"
                                                                : "local_to_unity";
  if (m.dynamics.c.size() > 0) dyn["c"] = vector_to_json(m.dynamics.c);
  if (m.dynamics.x0.size() > 0) dyn["x0"] = vector_to_json(m.dynamics.x0);
  j["dynamics"] = dyn;
  json path;
  switch (m.path.rule) {
    case dgp::PathRule::Fixed:
      path["rule"] = "fixed";
      break;
    case dgp::PathRule::PowerLaw:
      path["rule"] = "power_law";
      path["delta"] = m.path.delta;
      break;
    case dgp::PathRule::TuningCoupled:
      path["rule"] = "tuning_coupled";
      break;
    case dgp::PathRule::Custom:
      path["rule"] = "custom";
      break;
  }
  path["beta"] = vector_to_json(m.path.beta);
  if (m.path.limits) {
    path["limits"] = {{"beta0", extvec_to_json(m.path.limits->beta0)},
                      {"tilde_beta0", extvec_to_json(m.path.limits->tilde_beta0)},
                      {"bar_beta0", extvec_to_json(m.path.limits->bar_beta0)}};
  }
  j["path"] = path;
  j["flavor"] =
      m.flavor == dgp::RegressionFlavor::Cointegrating ? "cointegrating" : "predictive";
  return j;
}

dgp::ModelConfig model_config_from_json(const json& j) {
  dgp::ModelConfig m;
  m.k = static_cast<int>(require_number(j, "k"));

  const json& errors = require(j, "errors");
  const json& innov = require(errors, "innovation");
  m.errors.innovation.sigma = matrix_from_json(require(innov, "sigma"), "errors.innovation.sigma");
  m.errors.innovation.dim = static_cast<int>(m.errors.innovation.sigma.rows());
  if (innov.contains("family")) {
    const std::string fam = innov.at("family").get<std::string>();
    if (fam != "gaussian") throw ConfigError("unsupported innovation family: " + fam);
  }
  if (errors.contains("coeffs")) {
    for (const auto& c : require(errors, "coeffs"))
      m.errors.coeffs.push_back(matrix_from_json(c, "errors.coeffs"));
  } else {
    m.errors.coeffs = {Eigen::MatrixXd::Identity(m.errors.innovation.dim,
                                                 m.errors.innovation.dim)};
  }

  const json& dyn = require(j, "dynamics");
  const std::string kind = require(dyn, "kind").get<std::string>();
  if (kind == "unit_root") {
    m.dynamics.kind = dgp::RegressorKind::UnitRoot;
  } else if (kind == "local_to_unity") {
    m.dynamics.kind = dgp::RegressorKind::LocalToUnity;
    m.dynamics.c = vector_from_json(require(dyn, "c"), "dynamics.c");
  } else {
    throw ConfigError("unknown dynamics kind: " + kind);
  }
  if (dyn.contains("x0")) m.dynamics.x0 = vector_from_json(dyn.at("x0"), "dynamics.x0");

  const json& path = require(j, "path");
  const std::string rule = require(path, "rule").get<std::string>();
  const Eigen::VectorXd beta = vector_from_json(require(path, "beta"), "path.beta");
  if (rule == "fixed") {
    m.path = dgp::CoefficientPath::fixed(beta);
  } else if (rule == "power_law") {
    m.path = dgp::CoefficientPath::power_law(beta, require_number(path, "delta"));
  } else if (rule == "tuning_coupled") {
    m.path = dgp::CoefficientPath::tuning_coupled(beta);
  } else {
    throw ConfigError("unknown path rule: " + rule);
  }
  if (path.contains("limits")) {
    const json& lim = path.at("limits");
    dgp::PathLimits pl;
    pl.beta0 = extvec_from_json(require(lim, "beta0"), "path.limits.beta0");
    pl.tilde_beta0 = extvec_from_json(require(lim, "tilde_beta0"), "path.limits.tilde_beta0");
    pl.bar_beta0 = extvec_from_json(require(lim, "bar_beta0"), "path.limits.bar_beta0");
    m.path.limits = pl;
  }

  const std::string flavor = require(j, "flavor").get<std::string>();
  if (flavor == "cointegrating") {
    m.flavor = dgp::RegressionFlavor::Cointegrating;
  } else if (flavor == "predictive") {
    m.flavor = dgp::RegressionFlavor::Predictive;
  } else {
    throw ConfigError("unknown flavor: " + flavor);
  }
  m.validate();
  return m;
}

json experiment_plan_to_json(const mc::ExperimentPlan& p) {
  json j;
  j["model"] = model_config_to_json(p.model);
  j["sample_sizes"] = p.sample_sizes;
  json rules = json::array();
  for (const auto& r : p.tuning_rules) rules.push_back(tuning_rule_to_json(r));
  j["tuning_rules"] = rules;
  j["scaling"] = p.scaling == mc::Scaling::ByT ? "by_T" : "by_T_over_sqrt_lambda";
  j["replications"] = p.replications;
  j["seed"] = p.seed;
  return j;
}

mc::ExperimentPlan experiment_plan_from_json(const json& j) {
  mc::ExperimentPlan p;
  p.model = model_config_from_json(require(j, "model"));
  for (const auto& t : require(j, "sample_sizes"))
    p.sample_sizes.push_back(t.get<int>());
  const json& rules = j.contains("tuning_rules") ? j.at("tuning_rules")
                                                 : require(j, "tuning_rule");
  if (rules.is_array()) {
    for (const auto& r : rules) p.tuning_rules.push_back(tuning_rule_from_json(r));
  } else {
    p.tuning_rules.push_back(tuning_rule_from_json(rules));
  }
  const std::string scaling = require(j, "scaling").get<std::string>();
  if (scaling == "by_T") {
    p.scaling = mc::Scaling::ByT;
  } else if (scaling == "by_T_over_sqrt_lambda") {
    p.scaling = mc::Scaling::ByTOverSqrtLambda;
  } else {
    throw ConfigError("unknown scaling: " + scaling);
  }
  p.replications = static_cast<int>(require_number(j, "replications"));
  p.seed = require(j, "seed").get<std::uint64_t>();
  if (j.contains("cd_tol")) p.cd_tol = j.at("cd_tol").get<double>();
  if (j.contains("cd_max_iter")) p.cd_max_iter = j.at("cd_max_iter").get<int>();
  p.validate();
  return p;
}

json fit_result_to_json(const est::FitResult& f) {
  json j;
  j["beta_ols"] = vector_to_json(f.beta_ols);
  j["beta_al"] = vector_to_json(f.beta_al);
  json active = json::array();
  for (bool a : f.active_set) active.push_back(a);
  j["active_set"] = active;
  j["lambda"] = f.lambda;
  if (std::isfinite(f.lambda_std)) j["lambda_std"] = f.lambda_std;
  j["kkt_residual"] = f.kkt_residual;
  j["iterations"] = f.iterations;
  if (!f.warnings.empty()) j["warnings"] = f.warnings;
  return j;
}

json summary_to_json(const mc::MixedDistributionSummary& s) {
  json j;
  j["atom_prob"] = s.atom_prob;
  j["atom_location"] = s.atom_location;
  j["n_total"] = s.n_total;
  j["n_continuous"] = s.continuous_sample.size();
  if (s.has_kde) {
    j["bandwidth"] = s.bandwidth;
    j["kde"] = {{"x", vector_to_json(s.curve.x)},
                {"density", vector_to_json(s.curve.density)}};
  }
  return j;
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("malformed JSON in " + path + ": " + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& content) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write file: " + path);
  out << content;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string records_to_csv(const std::vector<mc::ReplicationRecord>& records) {
  if (records.empty()) throw ConfigError("no records to write");
  const int k = static_cast<int>(records.front().beta_ols.size());
  std::ostringstream out;
  out << "rep_id";
  auto cols = [&](const char* base) {
    for (int j = 1; j <= k; ++j) out << ',' << base << j;
  };
  cols("beta_ols");
  cols("beta_al");
  cols("active");
  cols("scaled_err_ols");
  cols("scaled_err_al");
  out << '\n';
  for (const auto& r : records) {
    out << r.rep_id;
    for (int j = 0; j < k; ++j) out << ',' << fmt(r.beta_ols(j));
    for (int j = 0; j < k; ++j) out << ',' << fmt(r.beta_al(j));
    for (int j = 0; j < k; ++j) out << ',' << (r.active_set[j] ? 1 : 0);
    for (int j = 0; j < k; ++j) out << ',' << fmt(r.scaled_error_ols(j));
    for (int j = 0; j < k; ++j) out << ',' << fmt(r.scaled_error_al(j));
    out << '\n';
  }
  return out.str();
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

double parse_double(const std::string& s) {
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  return std::stod(s);
}

}  // namespace

std::vector<mc::ReplicationRecord> records_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("empty records file");
  const auto header = split_csv_line(line);
  // layout: rep_id + 5 groups of k columns
  if ((header.size() - 1) % 5 != 0 || header.size() < 6)
    throw ConfigError("unexpected records header");
  const int k = static_cast<int>((header.size() - 1) / 5);

  std::vector<mc::ReplicationRecord> records;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != header.size()) throw ConfigError("ragged records row");
    mc::ReplicationRecord r;
    r.rep_id = std::stoi(f[0]);
    r.beta_ols.resize(k);
    r.beta_al.resize(k);
    r.active_set.resize(k);
    r.scaled_error_ols.resize(k);
    r.scaled_error_al.resize(k);
    int pos = 1;
    for (int j = 0; j < k; ++j) r.beta_ols(j) = parse_double(f[pos++]);
    for (int j = 0; j < k; ++j) r.beta_al(j) = parse_double(f[pos++]);
    for (int j = 0; j < k; ++j) r.active_set[j] = f[pos++] == "1";
    for (int j = 0; j < k; ++j) r.scaled_error_ols(j) = parse_double(f[pos++]);
    for (int j = 0; j < k; ++j) r.scaled_error_al(j) = parse_double(f[pos++]);
    records.push_back(std::move(r));
  }
  return records;
}

std::string mixed_draws_to_csv(const std::vector<limit::MixedDraw>& draws) {
  std::ostringstream out;
  out << "draw_id,atom,value1\n";
  for (std::size_t i = 0; i < draws.size(); ++i)
    out << i << ',' << (draws[i].atom ? 1 : 0) << ',' << fmt(draws[i].value) << '\n';
  return out.str();
}

std::string multivariate_draws_to_csv(const std::vector<limit::MultivariateDraw>& draws) {
  if (draws.empty()) throw ConfigError("no draws to write");
  const int k = static_cast<int>(draws.front().z.size());
  std::ostringstream out;
  out << "draw_id,atom";
  for (int j = 1; j <= k; ++j) out << ",value" << j;
  out << '\n';
  for (std::size_t i = 0; i < draws.size(); ++i) {
    unsigned mask = 0;
    for (int j = 0; j < k; ++j)
      if (draws[i].at_kink[j]) mask |= 1u << j;
    out << i << ',' << mask;
    for (int j = 0; j < k; ++j) out << ',' << fmt(draws[i].z(j));
    out << '\n';
  }
  return out.str();
}

std::string path_to_csv(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                        const Eigen::VectorXd& u, const Eigen::MatrixXd& v,
                        dgp::RegressionFlavor flavor) {
  const int k = static_cast<int>(X.cols());
  const int n = static_cast<int>(y.size());
  const int t0 = flavor == dgp::RegressionFlavor::Predictive ? 2 : 1;
  std::ostringstream out;
  out << "t,y";
  for (int j = 1; j <= k; ++j) out << ",x" << j;
  out << ",u";
  for (int j = 1; j <= k; ++j) out << ",v" << j;
  out << '\n';
  for (int i = 0; i < n; ++i) {
    out << (t0 + i) << ',' << fmt(y(i));
    for (int j = 0; j < k; ++j) out << ',' << fmt(X(i, j));
    // error row aligned with the response time index
    const int erow = flavor == dgp::RegressionFlavor::Predictive ? i + 1 : i;
    out << ',' << fmt(u(erow));
    for (int j = 0; j < k; ++j) out << ',' << fmt(v(i, j));
    out << '\n';
  }
  return out.str();
}

est::Dataset dataset_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("empty dataset file");
  const auto header = split_csv_line(line);

  int ycol = -1;
  std::vector<int> xcols;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == "y") ycol = static_cast<int>(i);
    if (header[i].size() > 1 && header[i][0] == 'x') {
      bool digits = true;
      for (std::size_t p = 1; p < header[i].size(); ++p)
        digits = digits && std::isdigit(static_cast<unsigned char>(header[i][p]));
      if (digits) xcols.push_back(static_cast<int>(i));
    }
  }
  if (ycol < 0 || xcols.empty())
    throw ConfigError("dataset needs a y column and x1..xk columns");

  std::vector<double> ys;
  std::vector<std::vector<double>> xs;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != header.size()) throw ConfigError("ragged dataset row");
    ys.push_back(parse_double(f[ycol]));
    std::vector<double> row;
    for (int c : xcols) row.push_back(parse_double(f[c]));
    xs.push_back(std::move(row));
  }
  est::Dataset d;
  d.y = Eigen::Map<Eigen::VectorXd>(ys.data(), ys.size());
  d.X.resize(xs.size(), xcols.size());
  for (std::size_t i = 0; i < xs.size(); ++i)
    for (std::size_t j = 0; j < xcols.size(); ++j) d.X(i, j) = xs[i][j];
  d.validate();
  return d;
}

void write_manifest(const std::string& path, const RunManifest& m) {
  json j;
  j["command"] = m.command;
  j["config"] = m.config;
  j["seed"] = m.seed;
  j["version"] = m.version;
  j["wall_seconds"] = m.wall_seconds;
  j["outputs"] = m.outputs;
  write_text_file(path, j.dump(2) + "\n");
}

}  // namespace alcoint::io
