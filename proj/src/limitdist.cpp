#include "alcoint/limitdist.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <exception>
#include <limits>

#include "alcoint/errors.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace alcoint::limit {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::uint64_t kFunctionalStream = 0x66756e6374696f6eull;
}  // namespace

void BrownianGrid::validate() const {
  if (steps < 100) throw ConfigError("grid needs at least 100 steps");
  if (dim < 2) throw ConfigError("grid dim must be >= 2");
  if (omega.rows() != dim || omega.cols() != dim)
    throw ConfigError("omega must be dim x dim");
  Eigen::LLT<Eigen::MatrixXd> llt(omega);
  if (llt.info() != Eigen::Success)
    throw ConfigError("omega is not symmetric positive definite");
}

BrownianGrid BrownianGrid::standard(int k, int steps) {
  BrownianGrid g;
  g.steps = steps;
  g.dim = 1 + k;
  g.omega = Eigen::MatrixXd::Identity(1 + k, 1 + k);
  return g;
}

namespace {

// Unit-root and mean-reverting paths share one kernel; c = 0 reproduces the
// pure Brownian path increment-for-increment.
FunctionalSample sample_functionals_impl(const BrownianGrid& grid,
                                         const Eigen::VectorXd& c,
                                         const Eigen::VectorXd& delta_vu, Rng& rng,
                                         PathVariant variant) {
  grid.validate();
  const int k = grid.k();
  if (delta_vu.size() != k) throw ConfigError("delta_vu must have length k");
  if (c.size() != k) throw ConfigError("c must have length k");

  const int steps = grid.steps;
  const double dr = 1.0 / steps;
  const double sq = std::sqrt(dr);
  const Eigen::MatrixXd L = Eigen::LLT<Eigen::MatrixXd>(grid.omega).matrixL();

  Eigen::MatrixXd zeta = Eigen::MatrixXd::Zero(k, k);
  Eigen::VectorXd ito = Eigen::VectorXd::Zero(k);
  Eigen::VectorXd path = Eigen::VectorXd::Zero(k);  // J(r_{t-1})
  Eigen::VectorXd z(grid.dim), dB(grid.dim);
  const Eigen::ArrayXd ar = 1.0 - c.array() * dr;

  for (int t = 0; t < steps; ++t) {
    for (int i = 0; i < grid.dim; ++i) z(i) = rng.normal();
    dB.noalias() = L * z;
    dB *= sq;
    // left-endpoint sums
    zeta.noalias() += path * path.transpose();
    ito.noalias() += path * dB(0);
    path.array() = ar * path.array() + dB.tail(k).array();
  }
  zeta *= dr;

  FunctionalSample fs;
  fs.variant = variant;
  fs.zeta_vv = zeta;
  fs.ito_term = ito + delta_vu;
  fs.Z = Eigen::LLT<Eigen::MatrixXd>(zeta).solve(fs.ito_term);
  return fs;
}

}  // namespace

FunctionalSample sample_brownian_functionals(const BrownianGrid& grid,
                                             const Eigen::VectorXd& delta_vu, Rng& rng) {
  return sample_functionals_impl(grid, Eigen::VectorXd::Zero(grid.k()), delta_vu, rng,
                                 PathVariant::UnitRoot);
}

FunctionalSample sample_ou_functionals(const BrownianGrid& grid, const Eigen::VectorXd& c,
                                       const Eigen::VectorXd& delta_vu, Rng& rng) {
  return sample_functionals_impl(grid, c, delta_vu, rng, PathVariant::OrnsteinUhlenbeck);
}

std::vector<FunctionalSample> sample_functional_batch(
    const BrownianGrid& grid, const Eigen::VectorXd& delta_vu,
    const std::optional<Eigen::VectorXd>& c, int draws, std::uint64_t seed,
    bool parallel) {
  grid.validate();
  if (draws < 1) throw ConfigError("need at least one draw");
  const Eigen::VectorXd cvec = c ? *c : Eigen::VectorXd::Zero(grid.k());
  const PathVariant variant = c ? PathVariant::OrnsteinUhlenbeck : PathVariant::UnitRoot;

  std::vector<FunctionalSample> out(draws);
  std::exception_ptr err;

#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (parallel)
#endif
  for (int i = 0; i < draws; ++i) {
    try {
      Rng rng(derive_seed(seed, kFunctionalStream, static_cast<std::uint64_t>(i)));
      out[i] = sample_functionals_impl(grid, cvec, delta_vu, rng, variant);
    } catch (...) {
#ifdef _OPENMP
#pragma omp critical
#endif
      if (!err) err = std::current_exception();
    }
  }
  if (err) std::rethrow_exception(err);
  (void)parallel;
  return out;
}

double limit_selection_prob_conservative(double lambda0, ExtendedReal beta0, int draws,
                                         const BrownianGrid& grid, std::uint64_t seed,
                                         bool parallel) {
  if (!(lambda0 >= 0.0)) throw ConfigError("lambda0 must be finite and >= 0");
  if (grid.k() != 1) throw UsageError("univariate selection probability needs k = 1");
  if (lambda0 == 0.0 || beta0.is_inf()) return 0.0;
  const auto batch = sample_functional_batch(grid, Eigen::VectorXd::Zero(1), std::nullopt,
                                             draws, seed, parallel);
  const double cutoff = std::sqrt(0.5 * lambda0);
  long hits = 0;
  for (const auto& fs : batch)
    if (std::sqrt(fs.zeta_vv(0, 0)) * std::abs(fs.Z(0) + beta0.value()) <= cutoff) ++hits;
  return static_cast<double>(hits) / draws;
}

double limit_selection_prob_consistent(ExtendedReal tilde_beta0, int draws,
                                       const BrownianGrid& grid, std::uint64_t seed,
                                       bool parallel) {
  if (grid.k() != 1) throw UsageError("univariate selection probability needs k = 1");
  if (tilde_beta0.is_zero()) return 1.0;
  if (tilde_beta0.is_inf()) return 0.0;
  const auto batch = sample_functional_batch(grid, Eigen::VectorXd::Zero(1), std::nullopt,
                                             draws, seed, parallel);
  const double cutoff = 1.0 / (std::sqrt(2.0) * std::abs(tilde_beta0.value()));
  long hits = 0;
  for (const auto& fs : batch)
    if (std::sqrt(fs.zeta_vv(0, 0)) <= cutoff) ++hits;
  return static_cast<double>(hits) / draws;
}

MixedDraw sample_limit_conservative(double lambda0, ExtendedReal beta0,
                                    const FunctionalSample& fs) {
  if (!(lambda0 >= 0.0)) throw ConfigError("lambda0 must be finite and >= 0");
  if (fs.Z.size() != 1) throw UsageError("univariate sampler needs k = 1");
  const double zeta = fs.zeta_vv(0, 0);
  const double Z = fs.Z(0);

  MixedDraw draw;
  if (beta0.is_inf()) {
    // shifted-by-infinity weight vanishes; always the continuous branch
    draw.value = Z;
    return draw;
  }
  const double b0 = beta0.value();
  if (std::sqrt(zeta) * std::abs(Z + b0) > std::sqrt(0.5 * lambda0)) {
    draw.value = lambda0 == 0.0 ? Z : Z - lambda0 / (2.0 * zeta * (Z + b0));
  } else {
    draw.atom = true;
    draw.value = -b0;
  }
  return draw;
}

MixedDraw sample_limit_consistent(ExtendedReal tilde_beta0, const FunctionalSample& fs) {
  if (fs.Z.size() != 1) throw UsageError("univariate sampler needs k = 1");
  MixedDraw draw;
  if (tilde_beta0.is_zero()) {
    draw.atom = true;
    draw.value = 0.0;
    return draw;
  }
  if (tilde_beta0.is_inf()) {
    draw.value = 0.0;
    return draw;
  }
  const double tb = tilde_beta0.value();
  const double zeta = fs.zeta_vv(0, 0);
  const double a0 = 1.0 / (std::sqrt(2.0) * std::abs(tb));
  if (std::sqrt(zeta) > a0) {
    draw.value = -1.0 / (2.0 * tb * zeta);
  } else {
    draw.atom = true;
    draw.value = -tb;
  }
  return draw;
}

namespace {

void check_rate_t_triple(const ExtendedReal& beta0, const ExtendedReal& tilde_beta0,
                         const ExtendedReal& bar_beta0) {
  // |bar| <= |tilde| <= |beta0| along lambda -> inf, with matching signs.
  auto bad = []() { return ConfigError("inconsistent (beta0, tilde_beta0, bar_beta0) triple"); };
  const int s0 = beta0.sign(), s1 = tilde_beta0.sign(), s2 = bar_beta0.sign();
  if (s1 != 0 && s0 != 0 && s1 != s0) throw bad();
  if (s2 != 0 && s1 != 0 && s2 != s1) throw bad();
  if (tilde_beta0.is_zero() && !bar_beta0.is_zero()) throw bad();
  if (!tilde_beta0.is_inf() && !tilde_beta0.is_zero()) {
    // exact-rate sequence: T beta_T diverges, lambda^-1 T beta_T vanishes
    if (!beta0.is_inf() || !bar_beta0.is_zero()) throw bad();
  }
  if (bar_beta0.is_inf() && !tilde_beta0.is_inf()) throw bad();
  if (tilde_beta0.is_inf() && !beta0.is_inf()) throw bad();
}

}  // namespace

MixedDraw sample_limit_consistent_rateT(ExtendedReal beta0, ExtendedReal tilde_beta0,
                                        ExtendedReal bar_beta0,
                                        const FunctionalSample& fs) {
  if (fs.Z.size() != 1) throw UsageError("univariate sampler needs k = 1");
  check_rate_t_triple(beta0, tilde_beta0, bar_beta0);

  MixedDraw draw;
  if (tilde_beta0.is_zero()) {
    if (beta0.is_inf()) {
      draw.escape = true;
      draw.value = beta0.sign() > 0 ? -kInf : kInf;
      return draw;
    }
    draw.atom = true;
    draw.value = -beta0.value();
    return draw;
  }
  if (!tilde_beta0.is_inf()) {
    // exact consistent-cutoff rate: all mass runs off opposite the sign of
    // tilde_beta0
    draw.escape = true;
    draw.value = tilde_beta0.sign() > 0 ? -kInf : kInf;
    return draw;
  }
  const double zeta = fs.zeta_vv(0, 0);
  if (bar_beta0.is_inf()) {
    draw.value = fs.Z(0);
  } else if (bar_beta0.is_zero()) {
    draw.escape = true;
    draw.value = tilde_beta0.sign() > 0 ? -kInf : kInf;
  } else {
    draw.value = fs.Z(0) - 1.0 / (2.0 * zeta * bar_beta0.value());
  }
  return draw;
}

void LimitParams::validate(int k) const {
  auto check_len = [&](const ExtVec& v, const char* name) {
    if (!v.empty() && static_cast<int>(v.size()) != k)
      throw ConfigError(std::string(name) + " must have length k");
  };
  check_len(beta0, "beta0");
  check_len(tilde_beta0, "tilde_beta0");
  check_len(bar_beta0, "bar_beta0");
  if (delta_vu.size() != 0 && delta_vu.size() != k)
    throw ConfigError("delta_vu must have length k");
  if (regime == SelectionRegime::Conservative && !lambda0.is_finite())
    throw ConfigError("conservative regime needs finite lambda0");
  if (regime == SelectionRegime::Consistent && tilde_beta0.empty())
    throw ConfigError("consistent regime needs tilde_beta0");
}

LimitProgram build_limit_program(LimitMode mode, const LimitParams& params,
                                 const FunctionalSample& fs) {
  const int k = static_cast<int>(fs.Z.size());
  LimitProgram prog;
  prog.gram = fs.zeta_vv;
  prog.linear = Eigen::VectorXd::Zero(k);
  prog.cls.assign(k, CoordClass::Free);
  prog.kink = Eigen::VectorXd::Zero(k);
  prog.weight = Eigen::VectorXd::Zero(k);

  switch (mode) {
    case LimitMode::V: {
      if (!params.lambda0.is_finite())
        throw ConfigError("V objective needs finite lambda0");
      if (static_cast<int>(params.beta0.size()) != k)
        throw ConfigError("V objective needs beta0 of length k");
      const double lambda0 = params.lambda0.value();
      if (lambda0 < 0.0) throw ConfigError("lambda0 must be >= 0");
      prog.linear = fs.ito_term;
      for (int j = 0; j < k; ++j) {
        const ExtendedReal& b0 = params.beta0[j];
        if (b0.is_inf() || lambda0 == 0.0) continue;  // Free
        const double denom = std::abs(fs.Z(j) + b0.value());
        prog.kink(j) = -b0.value();
        if (denom == 0.0) {
          prog.cls[j] = CoordClass::Pinned;  // probability-zero tie
        } else {
          prog.cls[j] = CoordClass::Weighted;
          prog.weight(j) = lambda0 / denom;
        }
      }
      break;
    }
    case LimitMode::Vtilde: {
      if (static_cast<int>(params.tilde_beta0.size()) != k)
        throw ConfigError("Vtilde objective needs tilde_beta0 of length k");
      for (int j = 0; j < k; ++j) {
        const ExtendedReal& tb = params.tilde_beta0[j];
        if (tb.is_inf()) continue;  // Free
        if (tb.is_zero()) {
          prog.cls[j] = CoordClass::Pinned;
          continue;
        }
        prog.cls[j] = CoordClass::Weighted;
        prog.kink(j) = -tb.value();
        prog.weight(j) = 1.0 / std::abs(tb.value());
      }
      break;
    }
    case LimitMode::Vbar: {
      if (static_cast<int>(params.bar_beta0.size()) != k ||
          static_cast<int>(params.beta0.size()) != k)
        throw ConfigError("Vbar objective needs beta0 and bar_beta0 of length k");
      prog.linear = fs.ito_term;
      for (int j = 0; j < k; ++j) {
        const ExtendedReal& bb = params.bar_beta0[j];
        const ExtendedReal& b0 = params.beta0[j];
        if (bb.is_inf()) continue;  // Free
        if (bb.is_zero()) {
          if (b0.is_zero()) {
            prog.cls[j] = CoordClass::Pinned;
            continue;
          }
          throw UnsupportedRegimeError(
              "rate-T objective is unbounded below for coordinate " +
              std::to_string(j + 1) +
              " (bar_beta0 = 0 with beta0 != 0); use the univariate rate-T "
              "closed-form limits instead");
        }
        if (!(b0.is_inf() && b0.sign() == bb.sign()))
          throw ConfigError("Vbar needs beta0 = sign(bar_beta0) * inf when bar_beta0 is finite nonzero");
        // penalty z_j / bar_beta0 folds into the linear part
        prog.cls[j] = CoordClass::Linear;
        prog.linear(j) -= 0.5 / bb.value();
      }
      break;
    }
  }
  return prog;
}

double limit_program_objective(const LimitProgram& prog, const Eigen::VectorXd& z) {
  double obj = z.dot(prog.gram * z) - 2.0 * z.dot(prog.linear);
  for (int j = 0; j < z.size(); ++j) {
    if (prog.cls[j] == CoordClass::Weighted)
      obj += prog.weight(j) * std::abs(z(j) - prog.kink(j));
    if (prog.cls[j] == CoordClass::Pinned && z(j) != prog.kink(j)) return kInf;
  }
  return obj;
}

MultivariateDraw solve_limit_program(const LimitProgram& prog, double tol, int max_iter) {
  const int k = static_cast<int>(prog.linear.size());
  if (!(tol > 0.0)) throw ConfigError("tol must be positive");

  MultivariateDraw draw;
  draw.z = prog.kink;  // Weighted coordinates start on their kink, others at 0
  for (int j = 0; j < k; ++j)
    if (prog.cls[j] == CoordClass::Free || prog.cls[j] == CoordClass::Linear)
      draw.z(j) = 0.0;
  draw.at_kink.assign(k, false);

  Eigen::VectorXd Gz = prog.gram * draw.z;

  double resid = kInf;
  int iter = 0;
  for (; iter < max_iter; ++iter) {
    for (int j = 0; j < k; ++j) {
      if (prog.cls[j] == CoordClass::Pinned) continue;
      const double gjj = prog.gram(j, j);
      const double rho = prog.linear(j) - Gz(j) + gjj * draw.z(j);
      double next;
      if (prog.cls[j] == CoordClass::Weighted) {
        const double m = prog.kink(j);
        const double shifted = rho - gjj * m;
        double t;
        if (shifted > 0.5 * prog.weight(j))
          t = (shifted - 0.5 * prog.weight(j)) / gjj;
        else if (shifted < -0.5 * prog.weight(j))
          t = (shifted + 0.5 * prog.weight(j)) / gjj;
        else
          t = 0.0;
        next = m + t;
      } else {
        next = rho / gjj;
      }
      const double delta = next - draw.z(j);
      if (delta != 0.0) {
        Gz += prog.gram.col(j) * delta;
        draw.z(j) = next;
      }
    }
    // KKT violation of the current sweep
    resid = 0.0;
    for (int j = 0; j < k; ++j) {
      if (prog.cls[j] == CoordClass::Pinned) continue;
      const double g = 2.0 * (Gz(j) - prog.linear(j));
      double viol;
      if (prog.cls[j] == CoordClass::Weighted) {
        const double t = draw.z(j) - prog.kink(j);
        viol = t == 0.0 ? std::max(0.0, std::abs(g) - prog.weight(j))
                        : std::abs(g + prog.weight(j) * ((t > 0) - (t < 0)));
      } else {
        viol = std::abs(g);
      }
      resid = std::max(resid, viol);
    }
    if (resid <= tol) break;
  }

  for (int j = 0; j < k; ++j) {
    if (prog.cls[j] == CoordClass::Pinned)
      draw.at_kink[j] = true;
    else if (prog.cls[j] == CoordClass::Weighted)
      draw.at_kink[j] = draw.z(j) == prog.kink(j);
  }
  draw.kkt_residual = resid;
  draw.iterations = iter + 1;

  if (resid > tol) {
    std::vector<double> last(draw.z.data(), draw.z.data() + k);
    throw ConvergenceError("limit-law coordinate descent exceeded max_iter", last, resid,
                           iter);
  }
  return draw;
}

MultivariateDraw sample_limit_multivariate(LimitMode mode, const LimitParams& params,
                                           const FunctionalSample& fs, double tol,
                                           int max_iter) {
  params.validate(static_cast<int>(fs.Z.size()));
  return solve_limit_program(build_limit_program(mode, params, fs), tol, max_iter);
}

double limit_selection_prob_multivariate(LimitMode mode, const LimitParams& params,
                                         int coord, int draws, const BrownianGrid& grid,
                                         std::uint64_t seed, bool parallel) {
  const int k = grid.k();
  params.validate(k);
  if (coord < 0 || coord >= k) throw UsageError("coordinate index out of range");

  // regimes with a deterministic limit need no simulation
  switch (mode) {
    case LimitMode::V:
      if (params.beta0.at(coord).is_inf()) return 0.0;
      if (params.lambda0.is_finite() && params.lambda0.value() == 0.0) return 0.0;
      break;
    case LimitMode::Vtilde:
      if (params.tilde_beta0.at(coord).is_zero()) return 1.0;
      if (params.tilde_beta0.at(coord).is_inf()) return 0.0;
      break;
    case LimitMode::Vbar: {
      const ExtendedReal& bb = params.bar_beta0.at(coord);
      if (bb.is_inf()) return 0.0;
      if (bb.is_zero()) {
        if (params.beta0.at(coord).is_zero()) return 1.0;
        throw UnsupportedRegimeError(
            "rate-T selection probability undefined for bar_beta0 = 0 with beta0 != 0");
      }
      return 0.0;  // Linear regime has no kink
    }
  }

  const Eigen::VectorXd delta =
      params.delta_vu.size() == k ? params.delta_vu : Eigen::VectorXd::Zero(k);
  const auto batch =
      sample_functional_batch(grid, delta, std::nullopt, draws, seed, parallel);
  long hits = 0;
  std::exception_ptr err;
#ifdef _OPENMP
#pragma omp parallel for schedule(static) reduction(+ : hits) if (parallel)
#endif
  for (int i = 0; i < draws; ++i) {
    try {
      const auto draw = sample_limit_multivariate(mode, params, batch[i]);
      if (draw.at_kink[coord]) ++hits;
    } catch (...) {
#ifdef _OPENMP
#pragma omp critical
#endif
      if (!err) err = std::current_exception();
    }
  }
  if (err) std::rethrow_exception(err);
  return static_cast<double>(hits) / draws;
}

}  // namespace alcoint::limit
