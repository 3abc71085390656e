#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

#include "alcoint/extended_real.hpp"
#include "alcoint/rng.hpp"

namespace alcoint::limit {

// Discretization grid for Brownian paths: `steps` increments on [0, 1], paths
// scaled by the long-run covariance omega of the (1+k)-dimensional error.
struct BrownianGrid {
  int steps = 10000;
  int dim = 2;  // 1 + k
  Eigen::MatrixXd omega;

  int k() const { return dim - 1; }
  void validate() const;

  static BrownianGrid standard(int k, int steps = 10000);
};

enum class PathVariant { UnitRoot, OrnsteinUhlenbeck };

// One joint draw of the limit building blocks:
//   zeta_vv  = int_0^1 B_v B_v' dr          (left-endpoint Riemann sum)
//   ito_term = int_0^1 B_v dB_u + delta_vu  (left-endpoint Ito sum)
//   Z        = zeta_vv^-1 ito_term
// The OU variant replaces B_v with the mean-reverting path driven by dB_v.
struct FunctionalSample {
  Eigen::MatrixXd zeta_vv;
  Eigen::VectorXd ito_term;
  Eigen::VectorXd Z;
  PathVariant variant = PathVariant::UnitRoot;
};

FunctionalSample sample_brownian_functionals(const BrownianGrid& grid,
                                             const Eigen::VectorXd& delta_vu, Rng& rng);

FunctionalSample sample_ou_functionals(const BrownianGrid& grid, const Eigen::VectorXd& c,
                                       const Eigen::VectorXd& delta_vu, Rng& rng);

// Batch of independent draws, one derived stream per draw; identical output
// for the serial and OpenMP paths.
std::vector<FunctionalSample> sample_functional_batch(
    const BrownianGrid& grid, const Eigen::VectorXd& delta_vu,
    const std::optional<Eigen::VectorXd>& c, int draws, std::uint64_t seed,
    bool parallel = true);

// One draw from a mixed (atom + continuous) limit law. `escape` marks total
// mass running off to ±inf (value is ±inf then).
struct MixedDraw {
  bool atom = false;
  bool escape = false;
  double value = 0.0;
};

// P(zeta^{1/2} |Z + beta0| <= sqrt(lambda0/2)); exact 0 for lambda0 = 0 or
// |beta0| = inf, Monte Carlo otherwise. Univariate.
double limit_selection_prob_conservative(double lambda0, ExtendedReal beta0, int draws,
                                         const BrownianGrid& grid, std::uint64_t seed,
                                         bool parallel = true);

// P(zeta^{1/2} <= 1/(sqrt(2)|tilde_beta0|)); exact 1 for tilde_beta0 = 0,
// exact 0 for |tilde_beta0| = inf. Univariate.
double limit_selection_prob_consistent(ExtendedReal tilde_beta0, int draws,
                                       const BrownianGrid& grid, std::uint64_t seed,
                                       bool parallel = true);

// Mixed law of the T-scaled error under bounded tuning: continuous branch
// Z - lambda0 / (2 zeta (Z + beta0)), atom at -beta0 otherwise.
MixedDraw sample_limit_conservative(double lambda0, ExtendedReal beta0,
                                    const FunctionalSample& fs);

// Mixed law of the sqrt(lambda)-scaled error under diverging tuning:
// -1/(2 tilde_beta0 zeta) vs. atom at -tilde_beta0; degenerate 0 when
// tilde_beta0 is 0 or ±inf.
MixedDraw sample_limit_consistent(ExtendedReal tilde_beta0, const FunctionalSample& fs);

// T-scaled error under diverging tuning: atom at -beta0 when tilde_beta0 = 0,
// escape to -sign(tilde_beta0) inf when 0 < |tilde_beta0| < inf, and
// Z - 1/(2 zeta bar_beta0) when |tilde_beta0| = inf.
MixedDraw sample_limit_consistent_rateT(ExtendedReal beta0, ExtendedReal tilde_beta0,
                                        ExtendedReal bar_beta0, const FunctionalSample& fs);

enum class SelectionRegime { Conservative, Consistent };

struct LimitParams {
  ExtendedReal lambda0 = 0.0;
  ExtVec beta0;
  ExtVec tilde_beta0;
  ExtVec bar_beta0;
  Eigen::VectorXd delta_vu;
  SelectionRegime regime = SelectionRegime::Conservative;

  void validate(int k) const;
};

// The three limit objectives for the multivariate estimator: V (T scaling,
// bounded tuning), Vtilde (sqrt(lambda) scaling, diverging tuning), Vbar
// (T scaling, diverging tuning).
enum class LimitMode { V, Vtilde, Vbar };

// Per-coordinate penalty classification of the limit objective.
enum class CoordClass {
  Free,      // no penalty
  Pinned,    // infinite penalty, coordinate fixed at its kink
  Weighted,  // finite weight w_j |z_j - kink_j|
  Linear     // penalty linear in z_j, folded into the linear term
};

// Quadratic-plus-separable-kink program
//   min_z z' gram z - 2 z' linear + sum_j weight_j |z_j - kink_j|
// with Pinned coordinates held at their kink.
struct LimitProgram {
  Eigen::MatrixXd gram;
  Eigen::VectorXd linear;
  std::vector<CoordClass> cls;
  Eigen::VectorXd kink;
  Eigen::VectorXd weight;
};

LimitProgram build_limit_program(LimitMode mode, const LimitParams& params,
                                 const FunctionalSample& fs);

double limit_program_objective(const LimitProgram& prog, const Eigen::VectorXd& z);

struct MultivariateDraw {
  Eigen::VectorXd z;
  std::vector<bool> at_kink;  // exact-zero event of the estimator, per coordinate
  double kkt_residual = 0.0;
  int iterations = 0;
};

MultivariateDraw solve_limit_program(const LimitProgram& prog, double tol = 1e-10,
                                     int max_iter = 200000);

// argmin of the selected limit objective for one functional draw.
MultivariateDraw sample_limit_multivariate(LimitMode mode, const LimitParams& params,
                                           const FunctionalSample& fs, double tol = 1e-10,
                                           int max_iter = 200000);

// Frequency of the exact-zero event for one coordinate; the regimes with a
// deterministic answer (pinned -> 1, free/linear -> 0) skip the simulation.
double limit_selection_prob_multivariate(LimitMode mode, const LimitParams& params,
                                         int coord, int draws, const BrownianGrid& grid,
                                         std::uint64_t seed, bool parallel = true);

}  // namespace alcoint::limit
