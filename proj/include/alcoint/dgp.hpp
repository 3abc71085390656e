#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <vector>

#include "alcoint/extended_real.hpp"
#include "alcoint/rng.hpp"
#include "alcoint/tuning.hpp"

namespace alcoint::dgp {

enum class InnovationFamily { Gaussian };

// Martingale-difference innovations eps_t with conditional covariance sigma.
struct InnovationSpec {
  int dim = 2;  // 1 + k
  Eigen::MatrixXd sigma;
  InnovationFamily family = InnovationFamily::Gaussian;

  void validate() const;
};

// Truncated moving-average filter w_t = sum_{j=0..q} C_j eps_{t-j}. The
// identity filter (q = 0, C_0 = I) gives i.i.d. errors.
struct LinearProcessSpec {
  std::vector<Eigen::MatrixXd> coeffs;  // C_0 .. C_q
  InnovationSpec innovation;

  int lag_order() const { return static_cast<int>(coeffs.size()) - 1; }
  Eigen::MatrixXd filter_sum() const;  // C(1) = sum_j C_j
  void validate() const;

  static LinearProcessSpec iid(const Eigen::MatrixXd& sigma);
};

enum class RegressorKind { UnitRoot, LocalToUnity };

struct RegressorDynamics {
  RegressorKind kind = RegressorKind::UnitRoot;
  Eigen::VectorXd c;   // mean-reversion coefficients, LocalToUnity only
  Eigen::VectorXd x0;  // initial condition; empty means zero

  void validate(int k) const;
  Eigen::VectorXd initial(int k) const;
};

enum class PathRule { Fixed, PowerLaw, TuningCoupled, Custom };

// Limits of the scaled coefficient sequence: beta0 = lim T*beta_T,
// tilde_beta0 = lim lambda_T^{-1/2} T*beta_T, bar_beta0 = lim lambda_T^{-1} T*beta_T.
struct PathLimits {
  ExtVec beta0;
  ExtVec tilde_beta0;
  ExtVec bar_beta0;
};

// Coefficient sequence beta_T. Fixed: beta. PowerLaw: beta * T^-delta.
// TuningCoupled: beta * sqrt(lambda_T) / T. Custom: arbitrary callable.
struct CoefficientPath {
  PathRule rule = PathRule::Fixed;
  Eigen::VectorXd beta;
  double delta = 0.0;
  std::function<Eigen::VectorXd(double, double)> custom;  // (T, lambda) -> beta_T
  std::optional<PathLimits> limits;  // explicit; required for Custom

  Eigen::VectorXd beta_at(double T, double lambda) const;
  int size() const { return static_cast<int>(beta.size()); }

  static CoefficientPath fixed(const Eigen::VectorXd& beta);
  static CoefficientPath power_law(const Eigen::VectorXd& beta, double delta);
  static CoefficientPath tuning_coupled(const Eigen::VectorXd& beta);
};

// Limits of (T, T/sqrt(lambda), T/lambda) * beta_T under the given rule,
// derived symbolically for the standard rules; Custom needs explicit limits.
PathLimits derive_path_limits(const CoefficientPath& path, const TuningRule& rule);

// Numerical consistency check of declared limits against the rule, evaluated
// at large T. Throws ConfigError on mismatch.
void check_path_limits(const CoefficientPath& path, const TuningRule& rule,
                       const PathLimits& claimed);

enum class RegressionFlavor { Cointegrating, Predictive };

struct ModelConfig {
  int k = 1;
  LinearProcessSpec errors;
  RegressorDynamics dynamics;
  CoefficientPath path;
  RegressionFlavor flavor = RegressionFlavor::Cointegrating;

  void validate() const;
};

// n i.i.d. draws with covariance spec.sigma, one per row. Deterministic given
// the stream.
Eigen::MatrixXd gen_innovations(const InnovationSpec& spec, int n, Rng& rng);

// Applies the MA filter; the first q rows of eps are warm-up, output has
// eps.rows() - q rows. Column 0 is u_t, the rest are v_t.
Eigen::MatrixXd gen_errors(const LinearProcessSpec& spec, const Eigen::MatrixXd& eps);

// UnitRoot: x_t = x_{t-1} + v_t. LocalToUnity: x_t = (I - diag(c)/T) x_{t-1} + v_t.
Eigen::MatrixXd build_regressors(const Eigen::MatrixXd& v, const RegressorDynamics& dyn,
                                 int T);

// Cointegrating: y_t = x_t' beta + u_t, t = 1..T.
// Predictive: y_t = x_{t-1}' beta + u_t, t = 2..T (length T-1).
Eigen::VectorXd build_response(const Eigen::MatrixXd& x, const Eigen::VectorXd& beta,
                               const Eigen::VectorXd& u, RegressionFlavor flavor);

struct LongRunMoments {
  Eigen::MatrixXd omega;     // (1+k)x(1+k) long-run covariance
  Eigen::VectorXd delta_vu;  // sum_{h>=h0} E(v_0 u_h)
};

// Exact long-run moments of the truncated filter. With predictive = true the
// one-sided sum starts at h = 1 instead of h = 0.
LongRunMoments long_run_moments(const LinearProcessSpec& spec, bool predictive = false);

}  // namespace alcoint::dgp
