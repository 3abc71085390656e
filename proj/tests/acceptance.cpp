// Acceptance suite: one pass/fail line per criterion, fixed seeds, fixed
// tolerances. Exits nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "alcoint/dgp.hpp"
#include "alcoint/estimators.hpp"
#include "alcoint/limitdist.hpp"
#include "alcoint/montecarlo.hpp"

using namespace alcoint;

namespace {

struct Gate {
  int failures = 0;
  void criterion(int id, const char* name, bool pass, const std::string& detail) {
    std::printf("[%s] criterion %d: %s  (%s)\n", pass ? "PASS" : "FAIL", id, name,
                detail.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
  }
};

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* pattern, double a, double b = 0, double c = 0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, pattern, a, b, c);
  return buf;
}

mc::ExperimentPlan base_plan(std::uint64_t seed) {
  mc::ExperimentPlan plan;
  plan.model.k = 1;
  plan.model.errors = dgp::LinearProcessSpec::iid(Eigen::MatrixXd::Identity(2, 2));
  plan.model.flavor = dgp::RegressionFlavor::Cointegrating;
  plan.replications = 10000;
  plan.seed = seed;
  return plan;
}

Eigen::VectorXd scaled_al(const mc::CellResult& cell) {
  Eigen::VectorXd out(cell.records.size());
  for (std::size_t r = 0; r < cell.records.size(); ++r)
    out(r) = cell.records[r].scaled_error_al(0);
  return out;
}

Eigen::VectorXd scaled_ols(const mc::CellResult& cell) {
  Eigen::VectorXd out(cell.records.size());
  for (std::size_t r = 0; r < cell.records.size(); ++r)
    out(r) = cell.records[r].scaled_error_ols(0);
  return out;
}

double median(Eigen::VectorXd v) {
  std::sort(v.data(), v.data() + v.size());
  const auto n = v.size();
  return n % 2 ? v(n / 2) : 0.5 * (v(n / 2 - 1) + v(n / 2));
}

Eigen::VectorXd mixed_values(const std::vector<limit::MixedDraw>& draws) {
  Eigen::VectorXd out(draws.size());
  for (std::size_t i = 0; i < draws.size(); ++i) out(i) = draws[i].value;
  return out;
}

}  // namespace

int main() {
  Gate gate;
  const auto grid = limit::BrownianGrid::standard(1, 10000);
  const Eigen::VectorXd zero1 = Eigen::VectorXd::Zero(1);

  {  // 1: conservative cutoff, asymptotic probability and finite-sample agreement
    const auto t0 = std::chrono::steady_clock::now();
    const double p =
        limit::limit_selection_prob_conservative(1.0, 1.0, 100000, grid, 100001);

    auto plan = base_plan(100002);
    plan.model.path = dgp::CoefficientPath::power_law(Eigen::VectorXd::Ones(1), 1.0);
    plan.sample_sizes = {1000};
    plan.tuning_rules = {TuningRule{TuningRule::Kind::Const, 1.0}};
    const auto cell = mc::run_cell(plan, 1000, plan.tuning_rules[0]);
    const double freq = mc::selection_frequency(cell.records);
    const double elapsed = seconds_since(t0);

    gate.criterion(1, "conservative selection probability",
                   std::abs(p - 0.43) <= 0.02 && std::abs(freq - p) <= 0.03 &&
                       elapsed < 120.0,
                   fmt("asymptotic %.4f, finite T=1000 %.4f, %.0fs", p, freq, elapsed));
  }

  {  // 2: consistent cutoff
    const double p = limit::limit_selection_prob_consistent(1.0, 100000, grid, 100003);

    auto plan = base_plan(100004);
    plan.model.path = dgp::CoefficientPath::tuning_coupled(Eigen::VectorXd::Ones(1));
    plan.sample_sizes = {1000};
    plan.tuning_rules = {TuningRule{TuningRule::Kind::Linear}};
    plan.scaling = mc::Scaling::ByTOverSqrtLambda;
    const auto cell = mc::run_cell(plan, 1000, plan.tuning_rules[0]);
    const double freq = mc::selection_frequency(cell.records);

    gate.criterion(2, "consistent selection probability",
                   std::abs(p - 0.68) <= 0.02 && std::abs(freq - p) <= 0.03,
                   fmt("asymptotic %.4f, finite T=1000 %.4f", p, freq));
  }

  {  // 3: slow diverging tuning keeps the nonzero coefficient and the ols law
    auto plan = base_plan(100005);
    plan.model.path = dgp::CoefficientPath::fixed(Eigen::VectorXd::Constant(1, 0.1));
    plan.sample_sizes = {100, 250, 1000};
    plan.tuning_rules = {TuningRule{TuningRule::Kind::Power, 0.25}};
    std::vector<double> ks;
    double zero_freq_1000 = 1.0;
    for (int T : plan.sample_sizes) {
      const auto cell = mc::run_cell(plan, T, plan.tuning_rules[0]);
      ks.push_back(mc::ecdf_ks(scaled_al(cell), scaled_ols(cell)));
      if (T == 1000) zero_freq_1000 = mc::selection_frequency(cell.records);
    }
    gate.criterion(3, "oracle-style agreement with ols",
                   zero_freq_1000 < 0.02 && ks[0] > ks[1] && ks[1] > ks[2] && ks[2] < 0.05,
                   fmt("zero-freq %.4f, KS path %.3f/%.3f", zero_freq_1000, ks[0], ks[1]) +
                       fmt("/%.3f", ks[2]));
  }

  {  // 4: random shift under lambda_T = T with a fixed nonzero coefficient
    auto plan = base_plan(100006);
    plan.model.path = dgp::CoefficientPath::fixed(Eigen::VectorXd::Constant(1, 0.1));
    plan.sample_sizes = {1000};
    plan.tuning_rules = {TuningRule{TuningRule::Kind::Linear}};
    const auto cell = mc::run_cell(plan, 1000, plan.tuning_rules[0]);
    const double shift = median(scaled_al(cell)) - median(scaled_ols(cell));

    const auto batch = limit::sample_functional_batch(grid, zero1, {}, 20000, 100007);
    Eigen::VectorXd oracle(batch.size());
    for (std::size_t i = 0; i < batch.size(); ++i)
      oracle(i) = -1.0 / (2.0 * 0.1 * batch[i].zeta_vv(0, 0));
    const double target = median(oracle);

    gate.criterion(4, "random median shift under fast tuning",
                   shift < 0.0 && std::abs(shift - target) <= 0.15 * std::abs(target),
                   fmt("median shift %.3f vs simulated %.3f", shift, target));
  }

  {  // 5: finite-sample identities
    Rng rng(100008);
    double worst_rel = 0.0;
    int bound_violations = 0;
    for (int rep = 0; rep < 1000; ++rep) {
      const int n = 40;
      est::Dataset d;
      d.X = rng.normal_vector(n);
      const double beta = 0.5 * rng.normal();
      d.y = beta * d.X.col(0) + rng.normal_vector(n);
      const double lambda = std::exp(2.0 * rng.normal());
      const auto dec = est::finite_sample_decomposition(d, beta, lambda);
      const double denom = std::max(1.0, std::abs(dec.scaled_error));
      worst_rel = std::max(
          worst_rel, std::abs(dec.reconstructed_scaled_error - dec.scaled_error) / denom);
    }
    for (int rep = 0; rep < 1000; ++rep) {
      const int k = std::vector<int>{1, 2, 5}[rep % 3];
      const int n = 60;
      est::Dataset d;
      d.X.resize(n, k);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < k; ++j) d.X(i, j) = rng.normal();
      Eigen::VectorXd beta(k);
      for (int j = 0; j < k; ++j) beta(j) = 0.5 * rng.normal();
      d.y = d.X * beta + rng.normal_vector(n);
      est::TuningParams tuning;
      tuning.lambda = std::exp(2.0 * rng.normal());
      const auto fit = est::adaptive_lasso_multivariate(d, tuning, 1e-12 * d.y.squaredNorm());
      const auto energy = est::kkt_energy_check(d, fit, tuning);
      if (energy.lhs > energy.bound + 1e-8 * energy.bound) ++bound_violations;
    }
    gate.criterion(5, "finite-sample identities and energy bound",
                   worst_rel <= 1e-10 && bound_violations == 0,
                   fmt("max rel reconstruction err %.2e, bound violations %.0f", worst_rel,
                       static_cast<double>(bound_violations)));
  }

  {  // 6: solver correctness
    Rng rng(100009);
    double worst_kkt = 0.0, worst_match = 0.0;
    for (int rep = 0; rep < 1000; ++rep) {
      const int n = 50;
      est::Dataset d;
      d.X = rng.normal_vector(n);
      d.y = 0.4 * rng.normal() * d.X.col(0) + rng.normal_vector(n);
      est::TuningParams tuning;
      tuning.lambda = std::exp(2.0 * rng.normal());
      const auto fit = est::adaptive_lasso_multivariate(d, tuning, 1e-12);
      worst_kkt = std::max(worst_kkt, est::kkt_residual(d, fit, tuning));
      const auto closed = est::adaptive_lasso_univariate(d, tuning.lambda);
      worst_match = std::max(worst_match, std::abs(fit.beta_al(0) - closed.beta_al(0)));
    }

    est::Dataset probe_data;
    const int n = 100, k = 3;
    probe_data.X.resize(n, k);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < k; ++j) probe_data.X(i, j) = rng.normal();
    Eigen::VectorXd beta(k);
    beta << 0.8, 0.0, -0.5;
    probe_data.y = probe_data.X * beta + rng.normal_vector(n);
    est::TuningParams tuning;
    tuning.lambda = 20.0;
    const auto fit = est::adaptive_lasso_multivariate(probe_data, tuning, 1e-12);
    const double at_solution = est::penalized_objective(probe_data, fit.beta_al, tuning);
    double best_probe = at_solution + 1.0;
    for (int i = 0; i < 1000000; ++i) {
      Eigen::VectorXd z = fit.beta_al;
      const double radius = std::pow(10.0, -5 + i % 6);
      for (int j = 0; j < k; ++j) z(j) += radius * rng.normal();
      best_probe = std::min(best_probe, est::penalized_objective(probe_data, z, tuning));
    }
    gate.criterion(6, "coordinate-descent correctness",
                   worst_kkt <= 1e-8 && worst_match <= 1e-8 &&
                       at_solution <= best_probe + 1e-9,
                   fmt("max KKT %.2e, max closed-form gap %.2e, probe margin %.2e",
                       worst_kkt, worst_match, best_probe - at_solution));
  }

  {  // 7: the argmin objectives reduce to the univariate laws in distribution
    const int draws = 10000;
    const auto inf = ExtendedReal::plus_inf();
    double worst = 0.0;
    std::string detail;

    {  // bounded tuning
      const auto a = limit::sample_functional_batch(grid, zero1, {}, draws, 100010);
      const auto b = limit::sample_functional_batch(grid, zero1, {}, draws, 100011);
      limit::LimitParams params;
      params.lambda0 = 1.0;
      params.beta0 = {ExtendedReal(1.0)};
      Eigen::VectorXd via_argmin(draws), via_closed(draws);
      for (int i = 0; i < draws; ++i) {
        via_argmin(i) =
            limit::sample_limit_multivariate(limit::LimitMode::V, params, a[i], 1e-12).z(0);
        via_closed(i) = limit::sample_limit_conservative(1.0, 1.0, b[i]).value;
      }
      const double ks = mc::ecdf_ks(via_argmin, via_closed);
      worst = std::max(worst, ks);
      detail += fmt("V %.4f", ks);
    }
    {  // diverging tuning
      const auto a = limit::sample_functional_batch(grid, zero1, {}, draws, 100012);
      const auto b = limit::sample_functional_batch(grid, zero1, {}, draws, 100013);
      limit::LimitParams params;
      params.regime = limit::SelectionRegime::Consistent;
      params.tilde_beta0 = {ExtendedReal(1.0)};
      Eigen::VectorXd via_argmin(draws), via_closed(draws);
      for (int i = 0; i < draws; ++i) {
        via_argmin(i) =
            limit::sample_limit_multivariate(limit::LimitMode::Vtilde, params, a[i], 1e-12)
                .z(0);
        via_closed(i) = limit::sample_limit_consistent(1.0, b[i]).value;
      }
      const double ks = mc::ecdf_ks(via_argmin, via_closed);
      worst = std::max(worst, ks);
      detail += fmt(", Vtilde %.4f", ks);
    }
    {  // rate-T diverging tuning
      const auto a = limit::sample_functional_batch(grid, zero1, {}, draws, 100014);
      const auto b = limit::sample_functional_batch(grid, zero1, {}, draws, 100015);
      limit::LimitParams params;
      params.regime = limit::SelectionRegime::Consistent;
      params.tilde_beta0 = {inf};
      params.beta0 = {inf};
      params.bar_beta0 = {ExtendedReal(1.0)};
      Eigen::VectorXd via_argmin(draws), via_closed(draws);
      for (int i = 0; i < draws; ++i) {
        via_argmin(i) =
            limit::sample_limit_multivariate(limit::LimitMode::Vbar, params, a[i], 1e-12)
                .z(0);
        via_closed(i) = limit::sample_limit_consistent_rateT(inf, inf, 1.0, b[i]).value;
      }
      const double ks = mc::ecdf_ks(via_argmin, via_closed);
      worst = std::max(worst, ks);
      detail += fmt(", Vbar %.4f", ks);
    }
    gate.criterion(7, "argmin laws match the closed-form laws", worst < 0.02, detail);
  }

  {  // 8: the moving-parameter limit beats the oracle limit as an approximation
    auto plan = base_plan(100016);
    plan.model.path = dgp::CoefficientPath::power_law(Eigen::VectorXd::Ones(1), 1.0);
    plan.sample_sizes = {250};
    plan.tuning_rules = {TuningRule{TuningRule::Kind::Const, 1.0}};
    const auto cell = mc::run_cell(plan, 250, plan.tuning_rules[0]);
    const auto summary = mc::summarize_mixed(cell.records, -cell.beta0T(0));

    const auto batch = limit::sample_functional_batch(grid, zero1, {}, 20000, 100017);
    std::vector<limit::MixedDraw> limit_draws(batch.size());
    Eigen::VectorXd pure_z(batch.size());
    for (std::size_t i = 0; i < batch.size(); ++i) {
      pure_z(i) = batch[i].Z(0);
      limit_draws[i] = limit::sample_limit_conservative(1.0, cell.beta0T(0), batch[i]);
    }
    const auto report = mc::compare(summary, limit_draws);

    const double ks_oracle = mc::ecdf_ks(summary.continuous_sample, pure_z);
    gate.criterion(8, "moving-parameter limit approximates T=250 better",
                   report.ks_defined && report.ks_continuous < 0.06 &&
                       ks_oracle > report.ks_continuous,
                   fmt("KS moving %.4f < oracle %.4f, atom gap %.4f",
                       report.ks_continuous, ks_oracle, report.atom_prob_diff));
  }

  {  // 9: moment checks
    const auto small_grid = limit::BrownianGrid::standard(1, 2000);
    const auto batch = limit::sample_functional_batch(small_grid, zero1, {}, 30000, 100018);
    double zeta_mean = 0, zeta_var = 0, z_mean = 0, z_var = 0;
    for (const auto& fs : batch) {
      zeta_mean += fs.zeta_vv(0, 0);
      z_mean += fs.Z(0);
    }
    zeta_mean /= batch.size();
    z_mean /= batch.size();
    for (const auto& fs : batch) {
      zeta_var += (fs.zeta_vv(0, 0) - zeta_mean) * (fs.zeta_vv(0, 0) - zeta_mean);
      z_var += (fs.Z(0) - z_mean) * (fs.Z(0) - z_mean);
    }
    const double zeta_se = std::sqrt(zeta_var / batch.size() / batch.size());
    const double z_se = std::sqrt(z_var / batch.size() / batch.size());
    gate.criterion(9, "moment checks",
                   std::abs(zeta_mean - 0.5) <= 3 * zeta_se && std::abs(z_mean) <= 3 * z_se,
                   fmt("E[zeta] %.4f (se %.4f), E[Z] %.4f", zeta_mean, zeta_se, z_mean));
  }

  if (gate.failures == 0) {
    std::printf("acceptance: all 9 criteria passed\n");
    return 0;
  }
  std::printf("acceptance: %d criteria FAILED\n", gate.failures);
  return 1;
}
