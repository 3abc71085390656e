#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "alcoint/dgp.hpp"
#include "alcoint/estimators.hpp"
#include "alcoint/limitdist.hpp"
#include "alcoint/tuning.hpp"

namespace alcoint::mc {

enum class Scaling { ByT, ByTOverSqrtLambda };

struct ExperimentPlan {
  dgp::ModelConfig model;
  std::vector<int> sample_sizes;
  std::vector<TuningRule> tuning_rules;
  Scaling scaling = Scaling::ByT;
  int replications = 10000;
  std::uint64_t seed = 0;
  double cd_tol = -1.0;     // multivariate solver tolerance; < 0 = scale default
  int cd_max_iter = 100000;

  void validate() const;
};

struct ReplicationRecord {
  int rep_id = 0;
  Eigen::VectorXd beta_ols;
  Eigen::VectorXd beta_al;
  std::vector<bool> active_set;
  Eigen::VectorXd scaled_error_ols;
  Eigen::VectorXd scaled_error_al;
};

struct CellKey {
  int T = 0;
  TuningRule rule;

  std::string name() const;      // "T{T}_lam{rule}"
  std::uint64_t stream() const;  // seed stream id, stable across plans
};

struct CellResult {
  CellKey cell;
  double lambda = 0.0;
  Eigen::VectorXd beta_T;
  Eigen::VectorXd beta0T;        // T * beta_T
  Eigen::VectorXd tilde_beta0T;  // lambda^-1/2 T * beta_T
  std::vector<ReplicationRecord> records;
};

// One (T, rule) cell. Replication r draws its stream from
// (plan.seed, cell.stream(), r), so results do not depend on scheduling.
CellResult run_cell(const ExperimentPlan& plan, int T, const TuningRule& rule,
                    bool parallel = true);

// All cells of the plan grid (sample_sizes x tuning_rules).
std::vector<CellResult> run_experiment(const ExperimentPlan& plan, bool parallel = true);

struct KdeCurve {
  Eigen::VectorXd x;        // 512-point grid
  Eigen::VectorXd density;
  double bandwidth = 0.0;
};

// Gaussian kernel density on an even grid spanning the sample range plus
// three bandwidths; default bandwidth 0.9 min(sd, IQR/1.34) n^{-1/5}.
KdeCurve kde(const Eigen::VectorXd& sample, std::optional<double> bandwidth = {});

struct MixedDistributionSummary {
  double atom_prob = 0.0;
  double atom_location = 0.0;
  Eigen::VectorXd continuous_sample;
  KdeCurve curve;      // rescaled to integrate to 1 - atom_prob
  double bandwidth = 0.0;
  bool has_kde = false;
  int n_total = 0;
};

// Splits the scaled adaptive-LASSO errors of a cell into the exact-zero atom
// (detected via the solver flags) and the continuous remainder.
MixedDistributionSummary summarize_mixed(const std::vector<ReplicationRecord>& records,
                                         double atom_value, int coord = 0);

struct ComparisonReport {
  double atom_prob_diff = 0.0;
  double ks_continuous = 0.0;
  bool ks_defined = false;
  int n_finite = 0;
  int n_limit = 0;
};

ComparisonReport compare(const MixedDistributionSummary& finite,
                         const std::vector<limit::MixedDraw>& limit_draws);

double selection_frequency(const std::vector<ReplicationRecord>& records, int coord = 0);

// Two-sample Kolmogorov-Smirnov statistic.
double ecdf_ks(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

// Trapezoid integral of a KDE curve (mass check helper).
double curve_mass(const KdeCurve& curve);

}  // namespace alcoint::mc
