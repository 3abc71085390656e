#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "alcoint/dgp.hpp"
#include "alcoint/errors.hpp"

namespace alcoint::est {

struct Dataset {
  Eigen::VectorXd y;
  Eigen::MatrixXd X;

  int n() const { return static_cast<int>(y.size()); }
  int k() const { return static_cast<int>(X.cols()); }
  void validate() const;
};

// Assembles the regression view of a generated path; the predictive flavor
// regresses y_t on x_{t-1}, t = 2..T.
Dataset make_dataset(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                     dgp::RegressionFlavor flavor);

struct TuningParams {
  double lambda = 1.0;  // >= 0; 0 means unpenalized
  double gamma = 1.0;   // weight exponent, >= 1
  std::optional<Eigen::VectorXd> weights;  // overrides |beta_ols|^-gamma

  void validate() const;
};

struct FitResult {
  Eigen::VectorXd beta_ols;
  Eigen::VectorXd beta_al;
  std::vector<bool> active_set;  // tracked symbolically, never by |value| < eps
  Eigen::VectorXd weights;       // penalty weights actually applied (may hold inf)
  double lambda;
  double lambda_std = std::numeric_limits<double>::quiet_NaN();  // k = 1 only
  double kkt_residual = 0.0;
  int iterations = 0;
  std::vector<std::string> warnings;
};

struct OlsFit {
  Eigen::VectorXd beta;
  Eigen::VectorXd residuals;
};

OlsFit ols_fit(const Dataset& data);

// Exact solution for k = 1: beta_ols - lambda_std / beta_ols when
// |beta_ols| > sqrt(lambda_std), exact zero otherwise, with
// lambda_std = lambda / (2 sum x_t^2).
FitResult adaptive_lasso_univariate(const Dataset& data, double lambda);

// Cyclic coordinate descent with exact soft-threshold updates; converged when
// the size-scaled KKT residual drops to tol (default 1e-10 * sum y^2).
FitResult adaptive_lasso_multivariate(const Dataset& data, const TuningParams& tuning,
                                      double tol = -1.0, int max_iter = 100000);

// sum (y - Xb)^2 + lambda * sum_j w_j |b_j|; +inf if a pinned coordinate
// (infinite weight) is nonzero.
double penalized_objective(const Dataset& data, const Eigen::VectorXd& b,
                           const TuningParams& tuning);

// Size-scaled subgradient optimality violation of a fit:
// active j:   |2 X_j'(y - X b) - lambda w_j sign(b_j)| / n
// inactive j: max(0, |2 X_j'(y - X b)| - lambda w_j) / n
double kkt_residual(const Dataset& data, const FitResult& fit, const TuningParams& tuning);

struct EnergyCheck {
  double lhs;    // (b_al - b_ols)' X'X (b_al - b_ols)
  double bound;  // k * lambda / 2
};

EnergyCheck kkt_energy_check(const Dataset& data, const FitResult& fit,
                             const TuningParams& tuning);

// Finite-sample quantities of the univariate fit and the scaled estimation
// error rebuilt from them; the rebuilt values must match the direct ones
// exactly (up to floating point).
struct ScaledErrorDecomposition {
  double Z_T;             // T (beta_ols - beta_true)
  double zeta_vvT;        // T^-2 sum x_t^2
  double beta0T;          // T beta_true
  double tilde_beta0T;    // lambda^-1/2 T beta_true
  double bar_beta0T;      // lambda^-1 T beta_true
  double scaled_error;    // T (beta_al - beta_true), direct
  double reconstructed_scaled_error;       // conservative-form identity
  double reconstructed_scaled_error_alt;   // bar-form identity
  double consistent_scaled_error;          // lambda^-1/2 T (beta_al - beta_true), direct
  double reconstructed_consistent_error;   // tilde-form identity
  bool zero_event;    // beta_al == 0 (solver flag)
  bool cutoff_event;  // zeta^{1/2} |Z_T + beta0T| <= sqrt(lambda/2)
};

ScaledErrorDecomposition finite_sample_decomposition(const Dataset& data,
                                                     double beta_true, double lambda);

// Effective penalty weights |beta_ols|^-gamma (or the explicit override);
// exact-zero preliminary coordinates map to +inf.
Eigen::VectorXd effective_weights(const Eigen::VectorXd& beta_ols,
                                  const TuningParams& tuning);

// Smallest eigenvalue of T^-2 X'X; diagnostic only.
double gram_min_eigenvalue(const Dataset& data);

}  // namespace alcoint::est
