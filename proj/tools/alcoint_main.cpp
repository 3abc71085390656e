// Command-line front end: simulate (Monte Carlo experiment grid), limit
// (limit-law samplers and selection probabilities), figure (density SVG per
// cell), fit (one dataset from CSV), check (invariant suite).
//
// Exit codes: 0 success, 2 config error, 3 unsupported limit regime,
// 4 missing input file.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "alcoint/dgp.hpp"
#include "alcoint/errors.hpp"
#include "alcoint/estimators.hpp"
#include "alcoint/io.hpp"
#include "alcoint/limitdist.hpp"
#include "alcoint/montecarlo.hpp"
#include "alcoint/svg.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace fs = std::filesystem;
using alcoint::io::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitRegime = 3;
constexpr int kExitMissingInput = 4;

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
};

void apply_thread_env() {
#ifdef _OPENMP
  if (const char* env = std::getenv("ALCOINT_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) omp_set_num_threads(n);
  }
#endif
}

void require_input(const std::string& path) {
  if (!fs::exists(path)) {
    std::cerr << "missing input file: " << path << "\n";
    std::exit(kExitMissingInput);
  }
}

double freq_se(double p, int n) { return std::sqrt(p * (1.0 - p) / n); }

// --- simulate ---

int cmd_simulate(const std::string& config_path, const std::string& out_dir,
                 std::optional<std::uint64_t> seed_override) {
  require_input(config_path);
  Timer timer;
  json config = alcoint::io::load_json_file(config_path);
  if (seed_override) config["seed"] = *seed_override;
  const auto plan = alcoint::io::experiment_plan_from_json(config);

  const auto cells = alcoint::mc::run_experiment(plan);

  alcoint::io::RunManifest manifest;
  manifest.command = "simulate";
  manifest.config = alcoint::io::experiment_plan_to_json(plan);
  manifest.seed = plan.seed;
  manifest.version = alcoint::io::kVersion;

  json summaries = json::object();
  for (const auto& cell : cells) {
    const std::string rec_path =
        (fs::path(out_dir) / ("records_" + cell.cell.name() + ".csv")).string();
    alcoint::io::write_text_file(rec_path, alcoint::io::records_to_csv(cell.records));
    manifest.outputs.push_back(rec_path);

    json cell_summary;
    cell_summary["T"] = cell.cell.T;
    cell_summary["rule"] = alcoint::io::tuning_rule_to_json(cell.cell.rule);
    cell_summary["lambda"] = cell.lambda;
    cell_summary["beta_T"] = alcoint::io::vector_to_json(cell.beta_T);
    cell_summary["beta0T"] = alcoint::io::vector_to_json(cell.beta0T);
    cell_summary["tilde_beta0T"] = alcoint::io::vector_to_json(cell.tilde_beta0T);
    json per_coord = json::array();
    for (int j = 0; j < plan.model.k; ++j) {
      const double atom_value = plan.scaling == alcoint::mc::Scaling::ByT
                                    ? -cell.beta0T(j)
                                    : -cell.tilde_beta0T(j);
      per_coord.push_back(
          alcoint::io::summary_to_json(alcoint::mc::summarize_mixed(cell.records, atom_value, j)));
    }
    cell_summary["mixed"] = per_coord;
    summaries[cell.cell.name()] = cell_summary;
  }
  const std::string sum_path = (fs::path(out_dir) / "summaries.json").string();
  alcoint::io::write_text_file(sum_path, summaries.dump(2) + "\n");
  manifest.outputs.push_back(sum_path);

  manifest.wall_seconds = timer.seconds();
  const std::string man_path = (fs::path(out_dir) / "manifest.json").string();
  alcoint::io::write_manifest(man_path, manifest);
  std::cout << "wrote " << manifest.outputs.size() + 1 << " files to " << out_dir << "\n";
  return kExitOk;
}

// --- limit ---

alcoint::ExtVec extvec_field(const json& j, const std::string& field, int k) {
  auto v = alcoint::io::extvec_from_json(j.at(field), field);
  if (static_cast<int>(v.size()) != k)
    throw alcoint::ConfigError(field + " must have length k");
  return v;
}

int cmd_limit(const std::string& config_path, const std::string& out_dir,
              std::optional<std::uint64_t> seed_override) {
  require_input(config_path);
  Timer timer;
  json config = alcoint::io::load_json_file(config_path);
  if (seed_override) config["seed"] = *seed_override;

  const std::string mode = config.at("mode").get<std::string>();
  const int k = config.value("k", 1);
  const int steps = config.value("steps", 10000);
  const int draws = config.value("draws", 100000);
  const std::uint64_t seed = config.value("seed", 0ull);

  alcoint::limit::BrownianGrid grid = alcoint::limit::BrownianGrid::standard(k, steps);
  if (config.contains("omega"))
    grid.omega = alcoint::io::matrix_from_json(config.at("omega"), "omega");
  grid.validate();

  Eigen::VectorXd delta_vu = Eigen::VectorXd::Zero(k);
  if (config.contains("delta_vu"))
    delta_vu = alcoint::io::vector_from_json(config.at("delta_vu"), "delta_vu");

  std::optional<Eigen::VectorXd> ou_c;
  if (config.contains("c"))
    ou_c = alcoint::io::vector_from_json(config.at("c"), "c");

  const auto batch =
      alcoint::limit::sample_functional_batch(grid, delta_vu, ou_c, draws, seed);

  json probs;
  probs["mode"] = mode;
  probs["draws"] = draws;
  probs["steps"] = steps;
  std::string draws_csv;

  if (mode == "conservative") {
    const double lambda0 = config.at("lambda0").get<double>();
    const auto beta0 =
        alcoint::io::extended_from_json(config.at("beta0").is_array() ? config.at("beta0").at(0)
                                                                      : config.at("beta0"),
                                        "beta0");
    std::vector<alcoint::limit::MixedDraw> out(batch.size());
    long atoms = 0;
    for (std::size_t i = 0; i < batch.size(); ++i) {
      out[i] = alcoint::limit::sample_limit_conservative(lambda0, beta0, batch[i]);
      atoms += out[i].atom;
    }
    const double p = static_cast<double>(atoms) / draws;
    probs["selection_prob"] = p;
    probs["selection_prob_se"] = freq_se(p, draws);
    probs["ols_equivalent"] = lambda0 == 0.0;
    draws_csv = alcoint::io::mixed_draws_to_csv(out);
  } else if (mode == "consistent") {
    const auto tb = alcoint::io::extended_from_json(
        config.at("tilde_beta0").is_array() ? config.at("tilde_beta0").at(0)
                                            : config.at("tilde_beta0"),
        "tilde_beta0");
    std::vector<alcoint::limit::MixedDraw> out(batch.size());
    long atoms = 0;
    for (std::size_t i = 0; i < batch.size(); ++i) {
      out[i] = alcoint::limit::sample_limit_consistent(tb, batch[i]);
      atoms += out[i].atom;
    }
    const double p = static_cast<double>(atoms) / draws;
    probs["selection_prob"] = p;
    probs["selection_prob_se"] = freq_se(p, draws);
    draws_csv = alcoint::io::mixed_draws_to_csv(out);
  } else if (mode == "consistent_rateT") {
    const auto b0 = alcoint::io::extended_from_json(config.at("beta0"), "beta0");
    const auto tb = alcoint::io::extended_from_json(config.at("tilde_beta0"), "tilde_beta0");
    const auto bb = alcoint::io::extended_from_json(config.at("bar_beta0"), "bar_beta0");
    std::vector<alcoint::limit::MixedDraw> out(batch.size());
    long atoms = 0, escapes = 0;
    for (std::size_t i = 0; i < batch.size(); ++i) {
      out[i] = alcoint::limit::sample_limit_consistent_rateT(b0, tb, bb, batch[i]);
      atoms += out[i].atom;
      escapes += out[i].escape;
    }
    probs["atom_freq"] = static_cast<double>(atoms) / draws;
    probs["escape_freq"] = static_cast<double>(escapes) / draws;
    draws_csv = alcoint::io::mixed_draws_to_csv(out);
  } else if (mode == "multivariate") {
    const std::string vmode_name = config.at("vmode").get<std::string>();
    alcoint::limit::LimitMode vmode;
    alcoint::limit::LimitParams params;
    params.delta_vu = delta_vu;
    if (vmode_name == "V") {
      vmode = alcoint::limit::LimitMode::V;
      params.regime = alcoint::limit::SelectionRegime::Conservative;
      params.lambda0 = config.at("lambda0").get<double>();
      params.beta0 = extvec_field(config, "beta0", k);
    } else if (vmode_name == "Vtilde") {
      vmode = alcoint::limit::LimitMode::Vtilde;
      params.regime = alcoint::limit::SelectionRegime::Consistent;
      params.tilde_beta0 = extvec_field(config, "tilde_beta0", k);
    } else if (vmode_name == "Vbar") {
      vmode = alcoint::limit::LimitMode::Vbar;
      params.regime = alcoint::limit::SelectionRegime::Consistent;
      params.tilde_beta0 = extvec_field(config, "tilde_beta0", k);
      params.beta0 = extvec_field(config, "beta0", k);
      params.bar_beta0 = extvec_field(config, "bar_beta0", k);
    } else {
      throw alcoint::ConfigError("unknown vmode: " + vmode_name);
    }
    const double tol = config.value("tol", 1e-10);

    std::vector<alcoint::limit::MultivariateDraw> out(batch.size());
    std::vector<long> kink_counts(k, 0);
    for (std::size_t i = 0; i < batch.size(); ++i) {
      out[i] = alcoint::limit::sample_limit_multivariate(vmode, params, batch[i], tol);
      for (int j = 0; j < k; ++j)
        if (out[i].at_kink[j]) ++kink_counts[j];
    }
    json sel = json::array();
    for (int j = 0; j < k; ++j) {
      const double p = static_cast<double>(kink_counts[j]) / draws;
      sel.push_back({{"coord", j + 1}, {"prob", p}, {"se", freq_se(p, draws)}});
    }
    probs["selection_probs"] = sel;
    draws_csv = alcoint::io::multivariate_draws_to_csv(out);
  } else {
    throw alcoint::ConfigError("unknown limit mode: " + mode);
  }

  alcoint::io::RunManifest manifest;
  manifest.command = "limit";
  manifest.config = config;
  manifest.seed = seed;
  manifest.version = alcoint::io::kVersion;

  const std::string draws_path = (fs::path(out_dir) / "limit_draws.csv").string();
  alcoint::io::write_text_file(draws_path, draws_csv);
  manifest.outputs.push_back(draws_path);
  const std::string probs_path = (fs::path(out_dir) / "selection_probs.json").string();
  alcoint::io::write_text_file(probs_path, probs.dump(2) + "\n");
  manifest.outputs.push_back(probs_path);

  manifest.wall_seconds = timer.seconds();
  alcoint::io::write_manifest((fs::path(out_dir) / "manifest.json").string(), manifest);
  std::cout << probs.dump(2) << "\n";
  return kExitOk;
}

// --- figure ---

int cmd_figure(const std::string& records_path, const std::string& limit_path,
               const std::string& out_path, const std::string& title) {
  require_input(records_path);
  if (!limit_path.empty()) require_input(limit_path);

  const auto records = alcoint::io::records_from_csv(alcoint::io::read_text_file(records_path));
  if (records.empty()) throw alcoint::ConfigError("records file has no rows");

  // atom location is the constant scaled value of the inactive branch
  double atom_location = 0.0;
  bool has_atom = false;
  std::vector<double> al, ols;
  std::vector<double> al_cont;
  for (const auto& r : records) {
    al.push_back(r.scaled_error_al(0));
    ols.push_back(r.scaled_error_ols(0));
    if (!r.active_set[0]) {
      atom_location = r.scaled_error_al(0);
      has_atom = true;
    } else {
      al_cont.push_back(r.scaled_error_al(0));
    }
  }
  const double atom_prob =
      static_cast<double>(al.size() - al_cont.size()) / al.size();

  alcoint::svg::DensityFigure fig;
  fig.title = title;
  fig.has_atom = has_atom;
  fig.atom_prob = atom_prob;
  fig.atom_location = atom_location;

  if (al_cont.size() >= 2) {
    Eigen::Map<Eigen::VectorXd> sample(al_cont.data(), al_cont.size());
    auto curve = alcoint::mc::kde(sample);
    curve.density *= 1.0 - atom_prob;
    fig.series.push_back({"AL", curve, "#1f77b4", ""});
  }
  {
    Eigen::Map<Eigen::VectorXd> sample(ols.data(), ols.size());
    fig.series.push_back({"OLS", alcoint::mc::kde(sample), "#d62728", "5,3"});
  }

  json sidecar;
  {
    Eigen::Map<Eigen::VectorXd> a(al.data(), al.size());
    Eigen::Map<Eigen::VectorXd> b(ols.data(), ols.size());
    sidecar["ks_al_ols"] = alcoint::mc::ecdf_ks(a, b);
  }
  sidecar["atom_prob"] = atom_prob;
  sidecar["atom_location"] = atom_location;
  sidecar["atom_clipped_in_plot"] = has_atom && atom_location < -4.0;

  if (!limit_path.empty()) {
    // limit draws: continuous part only; escapes (±inf) stay out of the curve
    const std::string text = alcoint::io::read_text_file(limit_path);
    std::vector<double> lim;
    std::istringstream in(text);
    std::string line;
    std::getline(in, line);  // header
    long lim_total = 0, lim_atoms = 0;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const auto comma1 = line.find(',');
      const auto comma2 = line.find(',', comma1 + 1);
      const std::string atom_field = line.substr(comma1 + 1, comma2 - comma1 - 1);
      const std::string value_field = line.substr(comma2 + 1);
      ++lim_total;
      if (atom_field != "0") {
        ++lim_atoms;
        continue;
      }
      if (value_field.find("inf") != std::string::npos) continue;
      lim.push_back(std::stod(value_field));
    }
    if (lim.size() >= 2) {
      Eigen::Map<Eigen::VectorXd> sample(lim.data(), lim.size());
      auto curve = alcoint::mc::kde(sample);
      curve.density *= 1.0 - static_cast<double>(lim_atoms) / lim_total;
      fig.series.push_back({"limit", curve, "#2ca02c", "2,2"});
    }
    sidecar["limit_atom_freq"] =
        lim_total > 0 ? static_cast<double>(lim_atoms) / lim_total : 0.0;
  }

  alcoint::io::write_text_file(out_path, alcoint::svg::render_density_figure(fig));
  alcoint::io::write_text_file(out_path + ".json", sidecar.dump(2) + "\n");
  std::cout << "wrote " << out_path << "\n";
  return kExitOk;
}

// --- gen ---

int cmd_gen(const std::string& config_path, int T, std::uint64_t seed, double lambda,
            const std::string& out_path) {
  require_input(config_path);
  const auto model = alcoint::io::model_config_from_json(alcoint::io::load_json_file(config_path));
  const int q = model.errors.lag_order();
  alcoint::Rng rng(seed);
  const Eigen::MatrixXd eps = alcoint::dgp::gen_innovations(model.errors.innovation, T + q, rng);
  const Eigen::MatrixXd w = alcoint::dgp::gen_errors(model.errors, eps);
  const Eigen::VectorXd u = w.col(0);
  const Eigen::MatrixXd v = w.rightCols(model.k);
  const Eigen::MatrixXd x = alcoint::dgp::build_regressors(v, model.dynamics, T);
  const Eigen::VectorXd beta = model.path.beta_at(T, lambda);
  const Eigen::VectorXd y = alcoint::dgp::build_response(x, beta, u, model.flavor);
  const auto data = alcoint::est::make_dataset(x, y, model.flavor);
  const Eigen::MatrixXd v_view = model.flavor == alcoint::dgp::RegressionFlavor::Predictive
                                     ? Eigen::MatrixXd(v.topRows(T - 1))
                                     : v;
  alcoint::io::write_text_file(
      out_path, alcoint::io::path_to_csv(data.X, data.y, u, v_view, model.flavor));
  std::cout << "wrote " << out_path << "\n";
  return kExitOk;
}

// --- fit ---

int cmd_fit(const std::string& data_path, double lambda, double gamma, double tol) {
  require_input(data_path);
  const auto data = alcoint::io::dataset_from_csv(alcoint::io::read_text_file(data_path));
  alcoint::est::FitResult fit;
  if (data.k() == 1 && gamma == 1.0) {
    fit = alcoint::est::adaptive_lasso_univariate(data, lambda);
  } else {
    alcoint::est::TuningParams tuning;
    tuning.lambda = lambda;
    tuning.gamma = gamma;
    fit = alcoint::est::adaptive_lasso_multivariate(data, tuning, tol);
  }
  std::cout << alcoint::io::fit_result_to_json(fit).dump(2) << "\n";
  return kExitOk;
}

// --- check ---

struct CheckTable {
  int failures = 0;
  void row(const std::string& name, bool pass, const std::string& detail) {
    std::cout << (pass ? "[PASS] " : "[FAIL] ") << name << "  (" << detail << ")\n";
    if (!pass) ++failures;
  }
};

int cmd_check() {
  using namespace alcoint;
  CheckTable table;
  const auto grid = limit::BrownianGrid::standard(1, 2000);
  const Eigen::VectorXd zero1 = Eigen::VectorXd::Zero(1);

  {  // moments of the functional draws
    const auto batch = limit::sample_functional_batch(grid, zero1, {}, 20000, 11);
    double zeta_mean = 0, zeta_sq = 0, z_mean = 0, z_sq = 0;
    for (const auto& fs : batch) {
      zeta_mean += fs.zeta_vv(0, 0);
      zeta_sq += fs.zeta_vv(0, 0) * fs.zeta_vv(0, 0);
      z_mean += fs.Z(0);
      z_sq += fs.Z(0) * fs.Z(0);
    }
    const int n = static_cast<int>(batch.size());
    zeta_mean /= n;
    z_mean /= n;
    const double zeta_se = std::sqrt((zeta_sq / n - zeta_mean * zeta_mean) / n);
    const double z_se = std::sqrt((z_sq / n - z_mean * z_mean) / n);
    table.row("E[zeta_vv] = 1/2", std::abs(zeta_mean - 0.5) < 3 * zeta_se,
              "mean " + std::to_string(zeta_mean));
    table.row("E[Z] = 0 under exogeneity", std::abs(z_mean) < 3 * z_se,
              "mean " + std::to_string(z_mean));
  }
  {  // selection probabilities at the documented operating points
    const double p1 = limit::limit_selection_prob_conservative(1.0, 1.0, 20000, grid, 21);
    table.row("conservative cutoff prob ~ 0.43", std::abs(p1 - 0.43) < 0.02,
              "estimate " + std::to_string(p1));
    const double p2 = limit::limit_selection_prob_consistent(1.0, 20000, grid, 22);
    table.row("consistent cutoff prob ~ 0.68", std::abs(p2 - 0.68) < 0.02,
              "estimate " + std::to_string(p2));
  }
  {  // atom frequency of the mixed sampler matches the probability
    const auto batch = limit::sample_functional_batch(grid, zero1, {}, 20000, 23);
    long atoms = 0;
    for (const auto& fs : batch) atoms += limit::sample_limit_conservative(1.0, 0.0, fs).atom;
    const double freq = static_cast<double>(atoms) / batch.size();
    const double prob = limit::limit_selection_prob_conservative(1.0, 0.0, 20000, grid, 24);
    table.row("mixed-draw atom freq == selection prob", std::abs(freq - prob) < 0.015,
              "freq " + std::to_string(freq) + " prob " + std::to_string(prob));
  }
  {  // argmin sampler reduces to the closed forms path by path
    const auto batch = limit::sample_functional_batch(grid, zero1, {}, 200, 25);
    double worst = 0;
    for (const auto& fs : batch) {
      limit::LimitParams params;
      params.lambda0 = 1.0;
      params.beta0 = {ExtendedReal(1.0)};
      const auto solved = limit::sample_limit_multivariate(limit::LimitMode::V, params, fs, 1e-12);
      const auto closed = limit::sample_limit_conservative(1.0, 1.0, fs);
      worst = std::max(worst, std::abs(solved.z(0) - closed.value));
      if (solved.at_kink[0] != closed.atom) worst = 1.0;
    }
    table.row("argmin matches closed form per path", worst < 1e-7,
              "max diff " + std::to_string(worst));
  }
  {  // estimator identities on random instances
    Rng rng(31);
    double worst_rel = 0;
    bool bound_ok = true, agree_ok = true;
    for (int i = 0; i < 200; ++i) {
      const int n = 40;
      Eigen::VectorXd x = rng.normal_vector(n);
      Eigen::VectorXd y = 0.3 * x + rng.normal_vector(n);
      est::Dataset d{y, x};
      const double lambda = std::exp(2.0 * rng.normal());
      const auto dec = est::finite_sample_decomposition(d, 0.3, lambda);
      const double denom = std::max(1.0, std::abs(dec.scaled_error));
      worst_rel = std::max(worst_rel,
                           std::abs(dec.reconstructed_scaled_error - dec.scaled_error) / denom);
      est::TuningParams tuning;
      tuning.lambda = lambda;
      const auto fit = est::adaptive_lasso_multivariate(d, tuning, 1e-12);
      const auto energy = est::kkt_energy_check(d, fit, tuning);
      bound_ok = bound_ok && energy.lhs <= energy.bound * (1.0 + 1e-8) + 1e-12;
      const auto closed = est::adaptive_lasso_univariate(d, lambda);
      agree_ok = agree_ok && std::abs(fit.beta_al(0) - closed.beta_al(0)) < 1e-8;
    }
    table.row("scaled-error identity", worst_rel < 1e-10,
              "max rel err " + std::to_string(worst_rel));
    table.row("energy bound k*lambda/2", bound_ok, "200 random fits");
    table.row("solver matches closed form (k=1)", agree_ok, "200 random fits");
  }
  {  // kde mass
    Rng rng(41);
    const Eigen::VectorXd sample = rng.normal_vector(5000);
    const double mass = mc::curve_mass(mc::kde(sample));
    table.row("kde integrates to 1", std::abs(mass - 1.0) < 1e-3,
              "mass " + std::to_string(mass));
  }

  std::cout << (table.failures == 0 ? "all checks passed\n"
                                    : std::to_string(table.failures) + " checks failed\n");
  return table.failures == 0 ? kExitOk : 1;
}

}  // namespace

int main(int argc, char** argv) {
  apply_thread_env();

  CLI::App app{"adaptive-LASSO cointegrating-regression toolkit"};
  app.require_subcommand(1);

  std::string config_path, out_dir = ".", records_path, limit_path, out_path, title;
  std::optional<std::uint64_t> seed_override;
  double lambda = 1.0, gamma = 1.0, tol = -1.0;

  auto add_seed = [&](CLI::App* cmd) {
    cmd->add_option("--seed", seed_override, "override the config seed");
  };

  auto* sim = app.add_subcommand("simulate", "run a Monte Carlo experiment plan");
  sim->add_option("--config", config_path, "plan JSON")->required();
  sim->add_option("--out", out_dir, "output directory");
  add_seed(sim);

  auto* lim = app.add_subcommand("limit", "sample limit laws and selection probabilities");
  lim->add_option("--config", config_path, "limit-run JSON")->required();
  lim->add_option("--out", out_dir, "output directory");
  add_seed(lim);

  auto* figure = app.add_subcommand("figure", "render a density figure for one cell");
  figure->add_option("--records", records_path, "cell records CSV")->required();
  figure->add_option("--limit-draws", limit_path, "matching limit draws CSV");
  figure->add_option("--out", out_path, "output SVG path")->required();
  figure->add_option("--title", title, "figure title");

  auto* fit = app.add_subcommand("fit", "fit one dataset from CSV");
  fit->add_option("--data", records_path, "dataset CSV with y,x1..xk columns")->required();
  fit->add_option("--lambda", lambda, "penalty level");
  fit->add_option("--gamma", gamma, "weight exponent");
  fit->add_option("--tol", tol, "solver tolerance");

  int gen_T = 100;
  std::uint64_t gen_seed = 0;
  double gen_lambda = 1.0;
  auto* gen = app.add_subcommand("gen", "generate one path from a model config");
  gen->add_option("--config", config_path, "model JSON")->required();
  gen->add_option("--T", gen_T, "sample size");
  gen->add_option("--seed", gen_seed, "stream seed");
  gen->add_option("--lambda", gen_lambda, "tuning level for tuning-coupled paths");
  gen->add_option("--out", out_path, "output CSV path")->required();

  app.add_subcommand("check", "run the invariant suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (sim->parsed()) return cmd_simulate(config_path, out_dir, seed_override);
    if (lim->parsed()) return cmd_limit(config_path, out_dir, seed_override);
    if (figure->parsed()) return cmd_figure(records_path, limit_path, out_path, title);
    if (fit->parsed()) return cmd_fit(records_path, lambda, gamma, tol);
    if (gen->parsed()) return cmd_gen(config_path, gen_T, gen_seed, gen_lambda, out_path);
    return cmd_check();
  } catch (const alcoint::UnsupportedRegimeError& e) {
    std::cerr << "unsupported regime: " << e.what() << "\n";
    return kExitRegime;
  } catch (const alcoint::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
}
