#include "alcoint/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <exception>

#include "alcoint/errors.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace alcoint::mc {

void ExperimentPlan::validate() const {
  model.validate();
  if (sample_sizes.empty()) throw ConfigError("plan needs at least one sample size");
  for (int T : sample_sizes)
    if (T < model.k + 2) throw ConfigError("sample size too small for the model");
  if (tuning_rules.empty()) throw ConfigError("plan needs at least one tuning rule");
  for (const auto& r : tuning_rules) r.validate();
  if (replications < 1) throw ConfigError("plan needs replications >= 1");
  if (scaling == Scaling::ByTOverSqrtLambda)
    for (const auto& r : tuning_rules)
      if (!r.diverges() && r.value == 0.0)
        throw ConfigError("sqrt-lambda scaling needs lambda_T > 0");
  // declared or derived limits must agree with the path for every rule
  for (const auto& r : tuning_rules)
    if (model.path.limits) dgp::check_path_limits(model.path, r, *model.path.limits);
}

std::string CellKey::name() const {
  return "T" + std::to_string(T) + "_lam" + rule.name();
}

std::uint64_t CellKey::stream() const { return fnv1a64(name()); }

namespace {

ReplicationRecord run_one_replication(const ExperimentPlan& plan, int T, double lambda,
                                      const Eigen::VectorXd& beta_T, int rep,
                                      std::uint64_t cell_stream) {
  const auto& model = plan.model;
  const int q = model.errors.lag_order();
  Rng rng(derive_seed(plan.seed, cell_stream, static_cast<std::uint64_t>(rep)));

  const Eigen::MatrixXd eps = dgp::gen_innovations(model.errors.innovation, T + q, rng);
  const Eigen::MatrixXd w = dgp::gen_errors(model.errors, eps);
  const Eigen::VectorXd u = w.col(0);
  const Eigen::MatrixXd v = w.rightCols(model.k);
  const Eigen::MatrixXd x = dgp::build_regressors(v, model.dynamics, T);
  const Eigen::VectorXd y = dgp::build_response(x, beta_T, u, model.flavor);
  const est::Dataset data = est::make_dataset(x, y, model.flavor);

  est::FitResult fit;
  if (model.k == 1) {
    fit = est::adaptive_lasso_univariate(data, lambda);
  } else {
    est::TuningParams tuning;
    tuning.lambda = lambda;
    fit = est::adaptive_lasso_multivariate(data, tuning, plan.cd_tol, plan.cd_max_iter);
  }

  const double scale = plan.scaling == Scaling::ByT
                           ? static_cast<double>(T)
                           : static_cast<double>(T) / std::sqrt(lambda);

  ReplicationRecord rec;
  rec.rep_id = rep;
  rec.beta_ols = fit.beta_ols;
  rec.beta_al = fit.beta_al;
  rec.active_set = fit.active_set;
  rec.scaled_error_ols = scale * (fit.beta_ols - beta_T);
  rec.scaled_error_al = scale * (fit.beta_al - beta_T);
  return rec;
}

}  // namespace

CellResult run_cell(const ExperimentPlan& plan, int T, const TuningRule& rule,
                    bool parallel) {
  plan.validate();
  CellResult cell;
  cell.cell = CellKey{T, rule};
  cell.lambda = rule.lambda_at(T);
  cell.beta_T = plan.model.path.beta_at(T, cell.lambda);
  cell.beta0T = static_cast<double>(T) * cell.beta_T;
  cell.tilde_beta0T = cell.lambda > 0.0
                          ? Eigen::VectorXd(cell.beta0T / std::sqrt(cell.lambda))
                          : Eigen::VectorXd(Eigen::VectorXd::Zero(plan.model.k));
  cell.records.resize(plan.replications);

  const std::uint64_t stream = cell.cell.stream();
  std::exception_ptr err;

#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (parallel)
#endif
  for (int r = 0; r < plan.replications; ++r) {
    try {
      cell.records[r] = run_one_replication(plan, T, cell.lambda, cell.beta_T, r, stream);
    } catch (const std::exception& e) {
#ifdef _OPENMP
#pragma omp critical
#endif
      if (!err)
        err = std::make_exception_ptr(EstimationError(
            "cell " + cell.cell.name() + " replication " + std::to_string(r) + ": " +
            e.what()));
    }
  }
  if (err) std::rethrow_exception(err);
  (void)parallel;
  return cell;
}

std::vector<CellResult> run_experiment(const ExperimentPlan& plan, bool parallel) {
  plan.validate();
  std::vector<CellResult> cells;
  cells.reserve(plan.sample_sizes.size() * plan.tuning_rules.size());
  for (const auto& rule : plan.tuning_rules)
    for (int T : plan.sample_sizes) cells.push_back(run_cell(plan, T, rule, parallel));
  return cells;
}

namespace {

double quantile_sorted(const std::vector<double>& sorted, double p) {
  const double idx = p * (sorted.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(idx));
  const std::size_t hi = static_cast<std::size_t>(std::ceil(idx));
  const double frac = idx - lo;
  return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
}

}  // namespace

KdeCurve kde(const Eigen::VectorXd& sample, std::optional<double> bandwidth) {
  const int n = static_cast<int>(sample.size());
  if (n < 2) throw ConfigError("kernel density needs at least two points");

  double h;
  if (bandwidth) {
    h = *bandwidth;
    if (!(h > 0.0)) throw ConfigError("bandwidth must be positive");
  } else {
    const double mean = sample.mean();
    const double sd = std::sqrt((sample.array() - mean).square().sum() / (n - 1));
    std::vector<double> sorted(sample.data(), sample.data() + n);
    std::sort(sorted.begin(), sorted.end());
    const double iqr = quantile_sorted(sorted, 0.75) - quantile_sorted(sorted, 0.25);
    double spread = sd;
    if (iqr > 0.0) spread = std::min(spread, iqr / 1.34);
    if (!(spread > 0.0)) throw EstimationError("sample has zero spread");
    h = 0.9 * spread * std::pow(static_cast<double>(n), -0.2);
  }

  constexpr int kGridPoints = 512;
  const double lo = sample.minCoeff() - 3.0 * h;
  const double hi = sample.maxCoeff() + 3.0 * h;
  const double dx = (hi - lo) / (kGridPoints - 1);
  constexpr double inv_sqrt_2pi = 0.3989422804014327;

  KdeCurve curve;
  curve.bandwidth = h;
  curve.x.resize(kGridPoints);
  curve.density.resize(kGridPoints);
  for (int g = 0; g < kGridPoints; ++g) {
    const double xg = lo + g * dx;
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
      const double z = (xg - sample(i)) / h;
      acc += std::exp(-0.5 * z * z);
    }
    curve.x(g) = xg;
    curve.density(g) = acc * inv_sqrt_2pi / (n * h);
  }
  return curve;
}

double curve_mass(const KdeCurve& curve) {
  double mass = 0.0;
  for (int g = 1; g < curve.x.size(); ++g)
    mass += 0.5 * (curve.density(g) + curve.density(g - 1)) * (curve.x(g) - curve.x(g - 1));
  return mass;
}

MixedDistributionSummary summarize_mixed(const std::vector<ReplicationRecord>& records,
                                         double atom_value, int coord) {
  if (records.empty()) throw ConfigError("no records to summarize");
  const int n = static_cast<int>(records.size());

  int inactive = 0;
  std::vector<double> cont;
  cont.reserve(records.size());
  for (const auto& rec : records) {
    if (!rec.active_set.at(coord))
      ++inactive;
    else
      cont.push_back(rec.scaled_error_al(coord));
  }

  MixedDistributionSummary s;
  s.n_total = n;
  s.atom_prob = static_cast<double>(inactive) / n;
  s.atom_location = atom_value;
  s.continuous_sample = Eigen::Map<Eigen::VectorXd>(cont.data(), cont.size());
  if (cont.size() >= 2) {
    s.curve = kde(s.continuous_sample);
    s.curve.density *= 1.0 - s.atom_prob;
    s.bandwidth = s.curve.bandwidth;
    s.has_kde = true;
  }
  return s;
}

double selection_frequency(const std::vector<ReplicationRecord>& records, int coord) {
  if (records.empty()) throw ConfigError("no records");
  int inactive = 0;
  for (const auto& rec : records)
    if (!rec.active_set.at(coord)) ++inactive;
  return static_cast<double>(inactive) / records.size();
}

double ecdf_ks(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  if (a.size() == 0 || b.size() == 0) throw ConfigError("KS needs non-empty samples");
  std::vector<double> sa(a.data(), a.data() + a.size());
  std::vector<double> sb(b.data(), b.data() + b.size());
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());

  const double na = static_cast<double>(sa.size());
  const double nb = static_cast<double>(sb.size());
  std::size_t ia = 0, ib = 0;
  double ks = 0.0;
  while (ia < sa.size() && ib < sb.size()) {
    const double v = std::min(sa[ia], sb[ib]);
    while (ia < sa.size() && sa[ia] <= v) ++ia;
    while (ib < sb.size() && sb[ib] <= v) ++ib;
    ks = std::max(ks, std::abs(ia / na - ib / nb));
  }
  return ks;
}

ComparisonReport compare(const MixedDistributionSummary& finite,
                         const std::vector<limit::MixedDraw>& limit_draws) {
  if (limit_draws.empty()) throw ConfigError("no limit draws");
  int atoms = 0;
  std::vector<double> cont;
  cont.reserve(limit_draws.size());
  for (const auto& d : limit_draws) {
    if (d.atom)
      ++atoms;
    else if (!d.escape)
      cont.push_back(d.value);
  }

  ComparisonReport rep;
  rep.n_finite = finite.n_total;
  rep.n_limit = static_cast<int>(limit_draws.size());
  rep.atom_prob_diff =
      std::abs(finite.atom_prob - static_cast<double>(atoms) / limit_draws.size());
  if (finite.continuous_sample.size() > 0 && !cont.empty()) {
    Eigen::Map<Eigen::VectorXd> cl(cont.data(), cont.size());
    rep.ks_continuous = ecdf_ks(finite.continuous_sample, cl);
    rep.ks_defined = true;
  }
  return rep;
}

}  // namespace alcoint::mc
