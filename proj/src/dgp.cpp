#include "alcoint/dgp.hpp"

#include <Eigen/Cholesky>
#include <cmath>

#include "alcoint/errors.hpp"

namespace alcoint::dgp {

namespace {

bool is_symmetric(const Eigen::MatrixXd& m) {
  return m.rows() == m.cols() && (m - m.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * (1.0 + m.cwiseAbs().maxCoeff());
}

Eigen::LLT<Eigen::MatrixXd> chol_or_throw(const Eigen::MatrixXd& m, const char* what) {
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success)
    throw ConfigError(std::string(what) + " is not positive definite");
  return llt;
}

}  // namespace

void InnovationSpec::validate() const {
  if (dim < 2) throw ConfigError("innovation dim must be >= 2 (one error plus k regressors)");
  if (sigma.rows() != dim || sigma.cols() != dim)
    throw ConfigError("innovation sigma must be dim x dim");
  if (!is_symmetric(sigma)) throw ConfigError("innovation sigma must be symmetric");
  chol_or_throw(sigma, "innovation sigma");
}

Eigen::MatrixXd LinearProcessSpec::filter_sum() const {
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(innovation.dim, innovation.dim);
  for (const auto& c : coeffs) s += c;
  return s;
}

void LinearProcessSpec::validate() const {
  innovation.validate();
  if (coeffs.empty()) throw ConfigError("linear process needs at least C_0");
  for (const auto& c : coeffs)
    if (c.rows() != innovation.dim || c.cols() != innovation.dim)
      throw ConfigError("filter coefficient has wrong shape");
  Eigen::FullPivLU<Eigen::MatrixXd> lu(filter_sum());
  if (!lu.isInvertible()) throw ConfigError("filter sum C(1) is singular");
}

LinearProcessSpec LinearProcessSpec::iid(const Eigen::MatrixXd& sigma) {
  LinearProcessSpec spec;
  spec.innovation.dim = static_cast<int>(sigma.rows());
  spec.innovation.sigma = sigma;
  spec.coeffs = {Eigen::MatrixXd::Identity(sigma.rows(), sigma.cols())};
  return spec;
}

void RegressorDynamics::validate(int k) const {
  if (kind == RegressorKind::LocalToUnity) {
    if (c.size() != k) throw ConfigError("local-to-unity needs a length-k c vector");
    if ((c.array() <= 0.0).any()) throw ConfigError("local-to-unity c entries must be > 0");
  }
  if (x0.size() != 0 && x0.size() != k) throw ConfigError("x0 must have length k");
}

Eigen::VectorXd RegressorDynamics::initial(int k) const {
  return x0.size() == k ? x0 : Eigen::VectorXd::Zero(k);
}

Eigen::VectorXd CoefficientPath::beta_at(double T, double lambda) const {
  switch (rule) {
    case PathRule::Fixed:
      return beta;
    case PathRule::PowerLaw:
      return beta * std::pow(T, -delta);
    case PathRule::TuningCoupled:
      return beta * (std::sqrt(lambda) / T);
    case PathRule::Custom:
      if (!custom) throw ConfigError("custom coefficient path has no callable");
      return custom(T, lambda);
  }
  return beta;
}

CoefficientPath CoefficientPath::fixed(const Eigen::VectorXd& beta) {
  CoefficientPath p;
  p.rule = PathRule::Fixed;
  p.beta = beta;
  return p;
}

CoefficientPath CoefficientPath::power_law(const Eigen::VectorXd& beta, double delta) {
  CoefficientPath p;
  p.rule = PathRule::PowerLaw;
  p.beta = beta;
  p.delta = delta;
  return p;
}

CoefficientPath CoefficientPath::tuning_coupled(const Eigen::VectorXd& beta) {
  CoefficientPath p;
  p.rule = PathRule::TuningCoupled;
  p.beta = beta;
  return p;
}

namespace {

// lim_{T->inf} coef * T^exp in the extended reals.
ExtendedReal power_limit(double coef, double exp) {
  if (coef == 0.0) return 0.0;
  if (exp > 0.0) return coef > 0 ? ExtendedReal::plus_inf() : ExtendedReal::minus_inf();
  if (exp < 0.0) return 0.0;
  return coef;
}

}  // namespace

PathLimits derive_path_limits(const CoefficientPath& path, const TuningRule& rule) {
  if (path.rule == PathRule::Custom) {
    if (!path.limits) throw ConfigError("custom coefficient path needs explicit limits");
    return *path.limits;
  }
  const int k = path.size();
  const double a = rule.exponent();  // lambda_T ~ T^a (a = 0 for Const)
  const bool lambda_const = !rule.diverges();
  const double lambda0 = lambda_const ? rule.value : 0.0;

  PathLimits lim;
  lim.beta0.resize(k);
  lim.tilde_beta0.resize(k);
  lim.bar_beta0.resize(k);

  for (int j = 0; j < k; ++j) {
    const double b = path.beta(j);
    // beta_T,j = b * T^p with p from the rule (TuningCoupled folds in sqrt(lambda)).
    double p;
    double coef = b;
    switch (path.rule) {
      case PathRule::Fixed:
        p = 0.0;
        break;
      case PathRule::PowerLaw:
        p = -path.delta;
        break;
      case PathRule::TuningCoupled:
        if (lambda_const) {
          p = -1.0;
          coef = b * std::sqrt(lambda0);
        } else {
          p = a / 2.0 - 1.0;
        }
        break;
      default:
        p = 0.0;
    }
    lim.beta0[j] = power_limit(coef, p + 1.0);
    if (lambda_const) {
      if (lambda0 > 0.0) {
        lim.tilde_beta0[j] = power_limit(coef / std::sqrt(lambda0), p + 1.0);
        lim.bar_beta0[j] = power_limit(coef / lambda0, p + 1.0);
      } else {
        // lambda_T == 0: the rescaled sequences blow up whenever beta0 does.
        lim.tilde_beta0[j] = lim.beta0[j].is_zero()
                                 ? ExtendedReal(0.0)
                                 : power_limit(coef, p + 1.0);
        lim.bar_beta0[j] = lim.tilde_beta0[j];
      }
    } else {
      lim.tilde_beta0[j] = power_limit(coef, p + 1.0 - a / 2.0);
      lim.bar_beta0[j] = power_limit(coef, p + 1.0 - a);
    }
  }
  return lim;
}

namespace {

void check_one_limit(double r1, double r2, const ExtendedReal& claim, const char* name) {
  const std::string msg = std::string("declared ") + name + " limit inconsistent with the coefficient path";
  if (claim.is_finite()) {
    const double c = claim.value();
    const double tol = 1e-6 + 0.05 * std::abs(c);
    const bool close = std::abs(r2 - c) <= tol;
    const bool converging = std::abs(r2 - c) < std::abs(r1 - c);
    if (!(close || converging)) throw ConfigError(msg);
  } else {
    if (!(std::abs(r2) > std::abs(r1) && std::abs(r2) > 100.0 &&
          ((claim.sign() > 0) == (r2 > 0))))
      throw ConfigError(msg);
  }
}

}  // namespace

void check_path_limits(const CoefficientPath& path, const TuningRule& rule,
                       const PathLimits& claimed) {
  const int k = path.size();
  if (static_cast<int>(claimed.beta0.size()) != k ||
      static_cast<int>(claimed.tilde_beta0.size()) != k ||
      static_cast<int>(claimed.bar_beta0.size()) != k)
    throw ConfigError("coefficient path limits must have length k");

  const double T1 = 1e6, T2 = 1e9;
  const double l1 = rule.lambda_at(T1), l2 = rule.lambda_at(T2);
  const Eigen::VectorXd b1 = path.beta_at(T1, l1);
  const Eigen::VectorXd b2 = path.beta_at(T2, l2);

  for (int j = 0; j < k; ++j) {
    check_one_limit(T1 * b1(j), T2 * b2(j), claimed.beta0[j], "beta0");
    if (l1 > 0.0 && l2 > 0.0) {
      check_one_limit(T1 / std::sqrt(l1) * b1(j), T2 / std::sqrt(l2) * b2(j),
                      claimed.tilde_beta0[j], "tilde_beta0");
      check_one_limit(T1 / l1 * b1(j), T2 / l2 * b2(j), claimed.bar_beta0[j],
                      "bar_beta0");
    }
  }
}

void ModelConfig::validate() const {
  if (k < 1) throw ConfigError("model needs k >= 1 regressors");
  errors.validate();
  if (errors.innovation.dim != 1 + k)
    throw ConfigError("innovation dim must equal 1 + k");
  dynamics.validate(k);
  if (path.size() != k) throw ConfigError("coefficient path must have length k");
}

Eigen::MatrixXd gen_innovations(const InnovationSpec& spec, int n, Rng& rng) {
  spec.validate();
  if (n < 1) throw ConfigError("need n >= 1 innovation rows");
  const Eigen::MatrixXd L = chol_or_throw(spec.sigma, "innovation sigma").matrixL();
  const int d = spec.dim;
  Eigen::MatrixXd eps(n, d);
  Eigen::VectorXd z(d);
  for (int t = 0; t < n; ++t) {
    for (int i = 0; i < d; ++i) z(i) = rng.normal();
    eps.row(t) = (L * z).transpose();
  }
  return eps;
}

Eigen::MatrixXd gen_errors(const LinearProcessSpec& spec, const Eigen::MatrixXd& eps) {
  spec.validate();
  const int q = spec.lag_order();
  const int d = spec.innovation.dim;
  if (eps.cols() != d) throw ConfigError("innovation matrix has wrong width");
  const int T = static_cast<int>(eps.rows()) - q;
  if (T < 1) throw LengthError("need at least 1 + q innovation rows for filter warm-up");
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(T, d);
  for (int j = 0; j <= q; ++j) {
    // w_t += C_j eps_{t-j}; row (q + t) of eps is eps_{t+1}, t = 0..T-1.
    w.noalias() += eps.middleRows(q - j, T) * spec.coeffs[j].transpose();
  }
  return w;
}

Eigen::MatrixXd build_regressors(const Eigen::MatrixXd& v, const RegressorDynamics& dyn,
                                 int T) {
  const int k = static_cast<int>(v.cols());
  dyn.validate(k);
  if (v.rows() < T) throw LengthError("regressor innovations shorter than T");
  Eigen::MatrixXd x(T, k);
  Eigen::VectorXd state = dyn.initial(k);
  if (dyn.kind == RegressorKind::UnitRoot) {
    for (int t = 0; t < T; ++t) {
      state += v.row(t).transpose();
      x.row(t) = state.transpose();
    }
  } else {
    const Eigen::ArrayXd ar = 1.0 - dyn.c.array() / static_cast<double>(T);
    for (int t = 0; t < T; ++t) {
      state.array() = ar * state.array() + v.row(t).transpose().array();
      x.row(t) = state.transpose();
    }
  }
  return x;
}

Eigen::VectorXd build_response(const Eigen::MatrixXd& x, const Eigen::VectorXd& beta,
                               const Eigen::VectorXd& u, RegressionFlavor flavor) {
  const int T = static_cast<int>(x.rows());
  if (beta.size() != x.cols()) throw ConfigError("beta length must match regressor width");
  if (u.size() != T) throw ConfigError("error vector length must match regressors");
  if (flavor == RegressionFlavor::Cointegrating) return x * beta + u;
  if (T < 2) throw LengthError("predictive flavor needs T >= 2");
  // y_t = x_{t-1}' beta + u_t for t = 2..T.
  return x.topRows(T - 1) * beta + u.tail(T - 1);
}

LongRunMoments long_run_moments(const LinearProcessSpec& spec, bool predictive) {
  spec.validate();
  const int q = spec.lag_order();
  const int d = spec.innovation.dim;
  const int k = d - 1;
  const Eigen::MatrixXd c1 = spec.filter_sum();

  LongRunMoments out;
  out.omega = c1 * spec.innovation.sigma * c1.transpose();
  out.delta_vu = Eigen::VectorXd::Zero(k);
  const int h0 = predictive ? 1 : 0;
  for (int h = h0; h <= q; ++h) {
    // E(w_0 w_h') = sum_j C_j Sigma C_{j+h}'
    Eigen::MatrixXd gamma = Eigen::MatrixXd::Zero(d, d);
    for (int j = 0; j + h <= q; ++j)
      gamma.noalias() += spec.coeffs[j] * spec.innovation.sigma * spec.coeffs[j + h].transpose();
    out.delta_vu += gamma.block(1, 0, k, 1);
  }
  return out;
}

}  // namespace alcoint::dgp
