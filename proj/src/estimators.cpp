#include "alcoint/estimators.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>

namespace alcoint::est {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

void Dataset::validate() const {
  if (k() < 1) throw ConfigError("dataset needs at least one regressor");
  if (n() <= k()) throw ConfigError("dataset needs n > k");
  if (X.rows() != y.size()) throw ConfigError("X and y row counts differ");
}

Dataset make_dataset(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                     dgp::RegressionFlavor flavor) {
  Dataset d;
  if (flavor == dgp::RegressionFlavor::Cointegrating) {
    d.X = x;
  } else {
    d.X = x.topRows(x.rows() - 1);
  }
  d.y = y;
  if (d.X.rows() != d.y.size()) throw ConfigError("response length does not match flavor");
  return d;
}

void TuningParams::validate() const {
  if (!(lambda >= 0.0)) throw ConfigError("lambda must be >= 0");
  if (!(gamma >= 1.0)) throw ConfigError("gamma must be >= 1");
  if (weights) {
    if ((weights->array() <= 0.0).any() || !weights->allFinite())
      throw ConfigError("explicit weights must be finite and positive");
  }
}

OlsFit ols_fit(const Dataset& data) {
  data.validate();
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(data.X);
  if (qr.rank() < data.k()) throw EstimationError("Gram matrix X'X is singular");
  OlsFit fit;
  fit.beta = qr.solve(data.y);
  fit.residuals = data.y - data.X * fit.beta;
  return fit;
}

Eigen::VectorXd effective_weights(const Eigen::VectorXd& beta_ols,
                                  const TuningParams& tuning) {
  if (tuning.weights) {
    if (tuning.weights->size() != beta_ols.size())
      throw ConfigError("weights length must equal k");
    return *tuning.weights;
  }
  Eigen::VectorXd w(beta_ols.size());
  for (int j = 0; j < beta_ols.size(); ++j)
    w(j) = beta_ols(j) == 0.0 ? kInf : std::pow(std::abs(beta_ols(j)), -tuning.gamma);
  return w;
}

FitResult adaptive_lasso_univariate(const Dataset& data, double lambda) {
  data.validate();
  if (data.k() != 1) throw UsageError("univariate solver needs k = 1");
  if (!(lambda >= 0.0)) throw ConfigError("lambda must be >= 0");

  const Eigen::VectorXd x = data.X.col(0);
  const double sxx = x.squaredNorm();
  if (sxx <= 0.0) throw EstimationError("regressor has zero variation");
  const double beta_ols = x.dot(data.y) / sxx;
  const double lambda_std = 0.5 * lambda / sxx;

  FitResult fit;
  fit.lambda = lambda;
  fit.lambda_std = lambda_std;
  fit.beta_ols = Eigen::VectorXd::Constant(1, beta_ols);
  fit.beta_al = Eigen::VectorXd::Zero(1);
  fit.active_set = {false};
  fit.iterations = 0;
  fit.weights = Eigen::VectorXd::Constant(1, beta_ols == 0.0 ? kInf : 1.0 / std::abs(beta_ols));

  if (beta_ols == 0.0) {
    fit.warnings.push_back("preliminary estimate is exactly zero; coordinate pinned");
  } else if (std::abs(beta_ols) > std::sqrt(lambda_std)) {
    fit.beta_al(0) = beta_ols - lambda_std / beta_ols;
    fit.active_set[0] = true;
  }
  TuningParams tp;
  tp.lambda = lambda;
  fit.kkt_residual = kkt_residual(data, fit, tp);
  return fit;
}

namespace {

double soft_threshold(double z, double gamma) {
  if (z > gamma) return z - gamma;
  if (z < -gamma) return z + gamma;
  return 0.0;
}

// Size-scaled KKT violation from the gradient g = 2(X'y - X'X b).
double kkt_from_gradient(const Eigen::VectorXd& g, const Eigen::VectorXd& b,
                         const Eigen::VectorXd& w, double lambda, int n) {
  double worst = 0.0;
  for (int j = 0; j < b.size(); ++j) {
    double viol;
    if (b(j) != 0.0) {
      viol = std::abs(g(j) - lambda * w(j) * ((b(j) > 0) - (b(j) < 0)));
    } else if (std::isinf(w(j))) {
      viol = 0.0;  // pinned coordinate, any gradient is admissible
    } else {
      viol = std::max(0.0, std::abs(g(j)) - lambda * w(j));
    }
    worst = std::max(worst, viol);
  }
  return worst / n;
}

}  // namespace

FitResult adaptive_lasso_multivariate(const Dataset& data, const TuningParams& tuning,
                                      double tol, int max_iter) {
  data.validate();
  tuning.validate();
  if (!(max_iter >= 1)) throw ConfigError("max_iter must be >= 1");
  if (tol == 0.0 || (tol < 0.0 && tol != -1.0))
    throw ConfigError("tol must be positive (or -1 for the scale default)");
  if (tol < 0.0) tol = 1e-10 * data.y.squaredNorm();

  const int k = data.k();
  const int n = data.n();
  const double lambda = tuning.lambda;

  const OlsFit ols = ols_fit(data);
  const Eigen::VectorXd w = effective_weights(ols.beta, tuning);

  const Eigen::MatrixXd G = data.X.transpose() * data.X;
  const Eigen::VectorXd c = data.X.transpose() * data.y;

  FitResult fit;
  fit.lambda = lambda;
  fit.beta_ols = ols.beta;
  fit.weights = w;
  fit.beta_al = Eigen::VectorXd::Zero(k);
  fit.active_set.assign(k, false);
  if (k == 1) fit.lambda_std = 0.5 * lambda / G(0, 0);

  std::vector<bool> pinned(k, false);
  for (int j = 0; j < k; ++j) {
    if (std::isinf(w(j))) {
      pinned[j] = true;
      fit.warnings.push_back("preliminary estimate exactly zero for coordinate " +
                             std::to_string(j + 1) + "; coordinate pinned");
    }
  }

  Eigen::VectorXd b = Eigen::VectorXd::Zero(k);
  Eigen::VectorXd Gb = Eigen::VectorXd::Zero(k);

  double resid = kInf;
  int iter = 0;
  for (; iter < max_iter; ++iter) {
    for (int j = 0; j < k; ++j) {
      if (pinned[j]) continue;
      const double rho = c(j) - Gb(j) + G(j, j) * b(j);
      const double next = soft_threshold(rho, 0.5 * lambda * w(j)) / G(j, j);
      const double delta = next - b(j);
      if (delta != 0.0) {
        Gb += G.col(j) * delta;
        b(j) = next;
      }
    }
    resid = kkt_from_gradient(2.0 * (c - Gb), b, w, lambda, n);
    if (resid <= tol) break;
  }

  fit.beta_al = b;
  for (int j = 0; j < k; ++j) fit.active_set[j] = b(j) != 0.0;
  fit.kkt_residual = resid;
  fit.iterations = iter + 1;

  if (resid > tol) {
    std::vector<double> last(b.data(), b.data() + k);
    throw ConvergenceError("coordinate descent exceeded max_iter", last, resid, iter);
  }
  return fit;
}

double penalized_objective(const Dataset& data, const Eigen::VectorXd& b,
                           const TuningParams& tuning) {
  data.validate();
  tuning.validate();
  if (b.size() != data.k()) throw ConfigError("candidate length must equal k");
  const Eigen::VectorXd w =
      tuning.weights ? *tuning.weights : effective_weights(ols_fit(data).beta, tuning);
  double penalty = 0.0;
  for (int j = 0; j < b.size(); ++j) {
    if (std::isinf(w(j))) {
      if (b(j) != 0.0) return kInf;
    } else {
      penalty += w(j) * std::abs(b(j));
    }
  }
  return (data.y - data.X * b).squaredNorm() + tuning.lambda * penalty;
}

double kkt_residual(const Dataset& data, const FitResult& fit, const TuningParams& tuning) {
  const Eigen::VectorXd w =
      fit.weights.size() == data.k() ? fit.weights : effective_weights(fit.beta_ols, tuning);
  const Eigen::VectorXd g = 2.0 * data.X.transpose() * (data.y - data.X * fit.beta_al);
  return kkt_from_gradient(g, fit.beta_al, w, tuning.lambda, data.n());
}

EnergyCheck kkt_energy_check(const Dataset& data, const FitResult& fit,
                             const TuningParams& tuning) {
  const Eigen::VectorXd d = fit.beta_al - fit.beta_ols;
  EnergyCheck out;
  out.lhs = (data.X * d).squaredNorm();
  out.bound = 0.5 * data.k() * tuning.lambda;
  return out;
}

ScaledErrorDecomposition finite_sample_decomposition(const Dataset& data,
                                                     double beta_true, double lambda) {
  if (data.k() != 1) throw UsageError("finite-sample decomposition needs k = 1");
  const FitResult fit = adaptive_lasso_univariate(data, lambda);
  const double T = data.n();
  const double sxx = data.X.col(0).squaredNorm();

  ScaledErrorDecomposition d;
  d.zeta_vvT = sxx / (T * T);
  d.Z_T = T * (fit.beta_ols(0) - beta_true);
  d.beta0T = T * beta_true;
  const double inf_signed = beta_true > 0.0 ? kInf : (beta_true < 0.0 ? -kInf : 0.0);
  d.tilde_beta0T = lambda > 0.0 ? d.beta0T / std::sqrt(lambda) : inf_signed;
  d.bar_beta0T = lambda > 0.0 ? d.beta0T / lambda : inf_signed;
  d.zero_event = !fit.active_set[0];
  d.cutoff_event =
      std::sqrt(d.zeta_vvT) * std::abs(d.Z_T + d.beta0T) <= std::sqrt(0.5 * lambda);

  d.scaled_error = T * (fit.beta_al(0) - beta_true);
  const double sqrt_lambda = std::sqrt(lambda);
  d.consistent_scaled_error = lambda > 0.0 ? d.scaled_error / sqrt_lambda : 0.0;

  if (d.zero_event) {
    d.reconstructed_scaled_error = -d.beta0T;
    d.reconstructed_scaled_error_alt = -d.beta0T;
    d.reconstructed_consistent_error = -d.tilde_beta0T;
  } else {
    d.reconstructed_scaled_error =
        d.Z_T - lambda / (2.0 * d.zeta_vvT) / (d.Z_T + d.beta0T);
    d.reconstructed_scaled_error_alt =
        lambda > 0.0
            ? d.Z_T - 1.0 / (2.0 * d.zeta_vvT) / (d.Z_T / lambda + d.bar_beta0T)
            : d.Z_T;
    d.reconstructed_consistent_error =
        lambda > 0.0 ? d.Z_T / sqrt_lambda -
                           1.0 / (2.0 * d.zeta_vvT) / (d.Z_T / sqrt_lambda + d.tilde_beta0T)
                     : 0.0;
  }
  return d;
}

double gram_min_eigenvalue(const Dataset& data) {
  const double T = data.n();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(data.X.transpose() * data.X /
                                                    (T * T));
  return es.eigenvalues().minCoeff();
}

}  // namespace alcoint::est
