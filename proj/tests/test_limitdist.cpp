#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <Eigen/Dense>
#include <cmath>

#include "alcoint/limitdist.hpp"
#include "alcoint/montecarlo.hpp"
#include "doctest.h"

using namespace alcoint;

namespace {

const Eigen::VectorXd kZero1 = Eigen::VectorXd::Zero(1);

struct MeanSe {
  double mean;
  double se;
};

MeanSe mean_se(const std::vector<double>& xs) {
  double m = 0, s = 0;
  for (double x : xs) m += x;
  m /= xs.size();
  for (double x : xs) s += (x - m) * (x - m);
  return {m, std::sqrt(s / xs.size() / xs.size())};
}

Eigen::VectorXd zeta_draws(const std::vector<limit::FunctionalSample>& batch) {
  Eigen::VectorXd out(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) out(i) = batch[i].zeta_vv(0, 0);
  return out;
}

// Simpson quadrature, independent of any closed form.
double simpson(double (*f)(double), double a, double b, int panels) {
  const double h = (b - a) / panels;
  double acc = f(a) + f(b);
  for (int i = 1; i < panels; ++i) acc += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return acc * h / 3.0;
}

}  // namespace

TEST_CASE("grid validation") {
  auto grid = limit::BrownianGrid::standard(1, 50);
  CHECK_THROWS_AS(grid.validate(), ConfigError);
  grid.steps = 1000;
  grid.omega(0, 0) = -1.0;
  CHECK_THROWS_AS(grid.validate(), ConfigError);
}

TEST_CASE("batch sampling is schedule-independent") {
  const auto grid = limit::BrownianGrid::standard(2, 500);
  const Eigen::VectorXd delta = Eigen::VectorXd::Constant(2, 0.3);
  const auto ser = limit::sample_functional_batch(grid, delta, {}, 64, 555, false);
  const auto par = limit::sample_functional_batch(grid, delta, {}, 64, 555, true);
  for (std::size_t i = 0; i < ser.size(); ++i) {
    CHECK(ser[i].zeta_vv == par[i].zeta_vv);
    CHECK(ser[i].Z == par[i].Z);
  }
}

TEST_CASE("functional moments match closed forms") {
  const auto grid = limit::BrownianGrid::standard(1, 2000);
  const auto batch = limit::sample_functional_batch(grid, kZero1, {}, 30000, 1001);

  std::vector<double> zetas, zs;
  for (const auto& fs : batch) {
    zetas.push_back(fs.zeta_vv(0, 0));
    zs.push_back(fs.Z(0));
  }
  const auto zeta = mean_se(zetas);
  CHECK(std::abs(zeta.mean - 0.5) < 3 * zeta.se);  // E int B^2 = int r dr = 1/2
  const auto z = mean_se(zs);
  CHECK(std::abs(z.mean) < 3 * z.se);
}

TEST_CASE("exogeneity with non-unit variances keeps Z centered") {
  limit::BrownianGrid grid = limit::BrownianGrid::standard(1, 2000);
  grid.omega << 2.0, 0.0, 0.0, 3.0;
  const auto batch = limit::sample_functional_batch(grid, kZero1, {}, 20000, 1002);
  std::vector<double> zs;
  for (const auto& fs : batch) zs.push_back(fs.Z(0));
  const auto z = mean_se(zs);
  CHECK(std::abs(z.mean) < 3 * z.se);
}

TEST_CASE("refining the grid leaves the functional law unchanged") {
  const auto coarse = limit::BrownianGrid::standard(1, 2000);
  const auto fine = limit::BrownianGrid::standard(1, 4000);
  const auto a = limit::sample_functional_batch(coarse, kZero1, {}, 50000, 2001);
  const auto b = limit::sample_functional_batch(fine, kZero1, {}, 50000, 2002);
  CHECK(mc::ecdf_ks(zeta_draws(a), zeta_draws(b)) < 0.01);
}

TEST_CASE("mean-reverting path reduces to the random walk at c = 0") {
  const auto grid = limit::BrownianGrid::standard(1, 1000);
  Rng a(42), b(42);
  const auto ur = limit::sample_brownian_functionals(grid, kZero1, a);
  const auto ou = limit::sample_ou_functionals(grid, Eigen::VectorXd::Zero(1), kZero1, b);
  CHECK(ur.zeta_vv(0, 0) == ou.zeta_vv(0, 0));
  CHECK(ur.Z(0) == ou.Z(0));
  CHECK(ou.variant == limit::PathVariant::OrnsteinUhlenbeck);
}

TEST_CASE("strong mean reversion shrinks the path variation") {
  const auto grid = limit::BrownianGrid::standard(1, 2000);
  const Eigen::VectorXd c = Eigen::VectorXd::Constant(1, 100.0);
  std::vector<double> ur, ou;
  for (int i = 0; i < 2000; ++i) {
    Rng ra(derive_seed(3001, 0, i)), rb(derive_seed(3002, 0, i));
    ur.push_back(limit::sample_brownian_functionals(grid, kZero1, ra).zeta_vv(0, 0));
    ou.push_back(limit::sample_ou_functionals(grid, c, kZero1, rb).zeta_vv(0, 0));
  }
  const auto m_ur = mean_se(ur), m_ou = mean_se(ou);
  CHECK(m_ou.mean * 10 < m_ur.mean);
  double var_ur = 0, var_ou = 0;
  for (double x : ur) var_ur += (x - m_ur.mean) * (x - m_ur.mean);
  for (double x : ou) var_ou += (x - m_ou.mean) * (x - m_ou.mean);
  CHECK(var_ou * 10 < var_ur);
}

TEST_CASE("mean path variation of the c = 1 process matches quadrature") {
  // E int J^2 dr = int (1 - e^{-2r})/2 dr, integrated numerically
  const double expected = simpson([](double r) { return (1.0 - std::exp(-2.0 * r)) / 2.0; },
                                  0.0, 1.0, 2000);
  const auto grid = limit::BrownianGrid::standard(1, 4000);
  const Eigen::VectorXd c = Eigen::VectorXd::Ones(1);
  std::vector<double> draws;
  for (int i = 0; i < 20000; ++i) {
    Rng rng(derive_seed(3003, 0, i));
    draws.push_back(limit::sample_ou_functionals(grid, c, kZero1, rng).zeta_vv(0, 0));
  }
  const auto m = mean_se(draws);
  CHECK(std::abs(m.mean - expected) < 3 * m.se);
}

TEST_CASE("conservative selection probability") {
  const auto grid = limit::BrownianGrid::standard(1, 2000);
  SUBCASE("degenerate cases are exact") {
    CHECK(limit::limit_selection_prob_conservative(0.0, 1.0, 10, grid, 1) == 0.0);
    CHECK(limit::limit_selection_prob_conservative(1.0, ExtendedReal::plus_inf(), 10, grid,
                                                   1) == 0.0);
  }
  SUBCASE("cutoff operating point") {
    const double p = limit::limit_selection_prob_conservative(1.0, 1.0, 30000, grid, 4001);
    CHECK(std::abs(p - 0.43) < 0.02);
  }
}

TEST_CASE("consistent selection probability") {
  const auto grid = limit::BrownianGrid::standard(1, 2000);
  CHECK(limit::limit_selection_prob_consistent(0.0, 10, grid, 1) == 1.0);
  CHECK(limit::limit_selection_prob_consistent(ExtendedReal::minus_inf(), 10, grid, 1) ==
        0.0);
  const double p = limit::limit_selection_prob_consistent(1.0, 30000, grid, 4002);
  CHECK(std::abs(p - 0.68) < 0.02);
}

TEST_CASE("conservative mixed draw") {
  const auto grid = limit::BrownianGrid::standard(1, 1000);
  Rng rng(5);
  const auto fs = limit::sample_brownian_functionals(grid, kZero1, rng);

  SUBCASE("zero penalty is the ols limit") {
    const auto d = limit::sample_limit_conservative(0.0, 0.5, fs);
    CHECK_FALSE(d.atom);
    CHECK(d.value == fs.Z(0));
  }
  SUBCASE("infinite beta0 drops the shift") {
    const auto d = limit::sample_limit_conservative(1.0, ExtendedReal::plus_inf(), fs);
    CHECK_FALSE(d.atom);
    CHECK(d.value == fs.Z(0));
  }
  SUBCASE("atom frequency is internally consistent with the probability") {
    for (double lambda0 : {0.5, 1.0, 2.0}) {
      for (double beta0 : {0.0, 1.0, -2.0}) {
        const auto batch = limit::sample_functional_batch(
            grid, kZero1, {}, 30000, derive_seed(5001, std::llround(10 * lambda0),
                                                 std::llround(10 * (beta0 + 3))));
        long atoms = 0;
        for (const auto& s : batch)
          atoms += limit::sample_limit_conservative(lambda0, beta0, s).atom;
        const double freq = static_cast<double>(atoms) / batch.size();
        const double prob = limit::limit_selection_prob_conservative(
            lambda0, beta0, 30000, grid, derive_seed(5002, std::llround(10 * lambda0),
                                                     std::llround(10 * (beta0 + 3))));
        CHECK(std::abs(freq - prob) < 0.01);
      }
    }
  }
}

TEST_CASE("consistent mixed draw") {
  const auto grid = limit::BrownianGrid::standard(1, 2000);
  Rng rng(6);
  const auto fs = limit::sample_brownian_functionals(grid, kZero1, rng);

  CHECK(limit::sample_limit_consistent(0.0, fs).value == 0.0);
  CHECK(limit::sample_limit_consistent(0.0, fs).atom);
  CHECK(limit::sample_limit_consistent(ExtendedReal::plus_inf(), fs).value == 0.0);
  CHECK_FALSE(limit::sample_limit_consistent(ExtendedReal::plus_inf(), fs).atom);

  const auto batch = limit::sample_functional_batch(grid, kZero1, {}, 20000, 6001);
  long atoms = 0;
  for (const auto& s : batch) {
    const auto d = limit::sample_limit_consistent(1.0, s);
    if (d.atom) {
      CHECK(d.value == -1.0);
      ++atoms;
    } else {
      CHECK(d.value < 0.0);  // -1/(2 zeta) with positive tilde_beta0
    }
  }
  CHECK(std::abs(static_cast<double>(atoms) / batch.size() - 0.68) < 0.01);
}

TEST_CASE("rate-T mixed draw under diverging tuning") {
  const auto grid = limit::BrownianGrid::standard(1, 1000);
  Rng rng(7);
  const auto fs = limit::sample_brownian_functionals(grid, kZero1, rng);
  const auto inf = ExtendedReal::plus_inf();

  SUBCASE("vanishing tilde_beta0 collapses to an atom at -beta0") {
    const auto d = limit::sample_limit_consistent_rateT(1.0, 0.0, 0.0, fs);
    CHECK(d.atom);
    CHECK(d.value == -1.0);
  }
  SUBCASE("exact cutoff rate escapes opposite the sign of tilde_beta0") {
    const auto d = limit::sample_limit_consistent_rateT(inf, 1.0, 0.0, fs);
    CHECK(d.escape);
    CHECK(d.value == -std::numeric_limits<double>::infinity());
    const auto d2 = limit::sample_limit_consistent_rateT(ExtendedReal::minus_inf(), -1.0,
                                                         0.0, fs);
    CHECK(d2.value == std::numeric_limits<double>::infinity());
  }
  SUBCASE("infinite bar_beta0 is the ols limit") {
    const auto d = limit::sample_limit_consistent_rateT(inf, inf, inf, fs);
    CHECK_FALSE(d.atom);
    CHECK(d.value == fs.Z(0));
  }
  SUBCASE("finite bar_beta0 shifts the ols limit to the left") {
    const auto batch = limit::sample_functional_batch(grid, kZero1, {}, 20000, 7001);
    std::vector<double> shifts;
    for (const auto& s : batch)
      shifts.push_back(limit::sample_limit_consistent_rateT(inf, inf, 1.0, s).value -
                       s.Z(0));
    const auto m = mean_se(shifts);
    // independent estimate of -E[1/(2 zeta)]
    const auto oracle_batch = limit::sample_functional_batch(grid, kZero1, {}, 20000, 7002);
    std::vector<double> oracle;
    for (const auto& s : oracle_batch) oracle.push_back(-0.5 / s.zeta_vv(0, 0));
    const auto mo = mean_se(oracle);
    CHECK(std::abs(m.mean - mo.mean) < 3 * (m.se + mo.se));
  }
  SUBCASE("inconsistent triples are rejected") {
    CHECK_THROWS_AS(limit::sample_limit_consistent_rateT(1.0, 1.0, 1.0, fs), ConfigError);
    CHECK_THROWS_AS(limit::sample_limit_consistent_rateT(inf, 0.5, 1.0, fs), ConfigError);
    CHECK_THROWS_AS(limit::sample_limit_consistent_rateT(0.0, 1.0, 0.0, fs), ConfigError);
  }
}

TEST_CASE("limit params validation") {
  limit::LimitParams p;
  p.regime = limit::SelectionRegime::Conservative;
  p.lambda0 = ExtendedReal::plus_inf();
  CHECK_THROWS_AS(p.validate(1), ConfigError);
  p.lambda0 = 1.0;
  p.beta0 = {ExtendedReal(0.0), ExtendedReal(1.0)};
  CHECK_THROWS_AS(p.validate(1), ConfigError);
  limit::LimitParams q;
  q.regime = limit::SelectionRegime::Consistent;
  CHECK_THROWS_AS(q.validate(1), ConfigError);
}

TEST_CASE("argmin sampler special cases") {
  const auto grid = limit::BrownianGrid::standard(2, 1000);
  Rng rng(8);
  const auto fs = limit::sample_brownian_functionals(grid, Eigen::VectorXd::Zero(2), rng);

  SUBCASE("zero penalty returns the ols limit vector") {
    limit::LimitParams params;
    params.lambda0 = 0.0;
    params.beta0 = {ExtendedReal(0.0), ExtendedReal(1.0)};
    const auto d = limit::sample_limit_multivariate(limit::LimitMode::V, params, fs, 1e-12);
    CHECK((d.z - fs.Z).cwiseAbs().maxCoeff() < 1e-8);
    CHECK_FALSE(d.at_kink[0]);
  }
  SUBCASE("all-pinned consistent objective returns zero") {
    limit::LimitParams params;
    params.regime = limit::SelectionRegime::Consistent;
    params.tilde_beta0 = {ExtendedReal(0.0), ExtendedReal(0.0)};
    const auto d =
        limit::sample_limit_multivariate(limit::LimitMode::Vtilde, params, fs, 1e-12);
    CHECK(d.z.cwiseAbs().maxCoeff() == 0.0);
    CHECK(d.at_kink[0]);
    CHECK(d.at_kink[1]);
  }
  SUBCASE("degenerate rate-T regime is refused") {
    limit::LimitParams params;
    params.regime = limit::SelectionRegime::Consistent;
    params.tilde_beta0 = {ExtendedReal(0.0), ExtendedReal(0.0)};
    params.beta0 = {ExtendedReal(1.0), ExtendedReal(0.0)};
    params.bar_beta0 = {ExtendedReal(0.0), ExtendedReal(0.0)};
    CHECK_THROWS_AS(
        limit::sample_limit_multivariate(limit::LimitMode::Vbar, params, fs, 1e-12),
        UnsupportedRegimeError);
  }
}

TEST_CASE("argmin sampler agrees with the closed forms path by path") {
  const auto grid = limit::BrownianGrid::standard(1, 1000);
  const auto batch = limit::sample_functional_batch(grid, kZero1, {}, 500, 9001);
  const auto inf = ExtendedReal::plus_inf();

  SUBCASE("bounded-tuning objective") {
    for (double beta0 : {0.0, 1.0, -2.0}) {
      limit::LimitParams params;
      params.lambda0 = 1.0;
      params.beta0 = {ExtendedReal(beta0)};
      for (const auto& fs : batch) {
        const auto solved =
            limit::sample_limit_multivariate(limit::LimitMode::V, params, fs, 1e-13);
        const auto closed = limit::sample_limit_conservative(1.0, beta0, fs);
        CHECK(solved.at_kink[0] == closed.atom);
        CHECK(std::abs(solved.z(0) - closed.value) < 1e-7);
      }
    }
  }
  SUBCASE("diverging-tuning objective") {
    limit::LimitParams params;
    params.regime = limit::SelectionRegime::Consistent;
    params.tilde_beta0 = {ExtendedReal(1.0)};
    for (const auto& fs : batch) {
      const auto solved =
          limit::sample_limit_multivariate(limit::LimitMode::Vtilde, params, fs, 1e-13);
      const auto closed = limit::sample_limit_consistent(1.0, fs);
      CHECK(solved.at_kink[0] == closed.atom);
      CHECK(std::abs(solved.z(0) - closed.value) < 1e-7);
    }
  }
  SUBCASE("rate-T objective") {
    limit::LimitParams params;
    params.regime = limit::SelectionRegime::Consistent;
    params.tilde_beta0 = {inf};
    params.beta0 = {inf};
    params.bar_beta0 = {ExtendedReal(1.0)};
    for (const auto& fs : batch) {
      const auto solved =
          limit::sample_limit_multivariate(limit::LimitMode::Vbar, params, fs, 1e-13);
      const auto closed = limit::sample_limit_consistent_rateT(inf, inf, 1.0, fs);
      CHECK(std::abs(solved.z(0) - closed.value) < 1e-7);
    }
  }
}

TEST_CASE("argmin output carries a convexity certificate") {
  const auto grid = limit::BrownianGrid::standard(2, 1000);
  const auto batch = limit::sample_functional_batch(grid, Eigen::VectorXd::Zero(2), {}, 50,
                                                    9002);
  limit::LimitParams params;
  params.lambda0 = 1.5;
  params.beta0 = {ExtendedReal(0.0), ExtendedReal(-1.0)};
  Rng rng(10);
  for (const auto& fs : batch) {
    const auto prog = limit::build_limit_program(limit::LimitMode::V, params, fs);
    const auto d = limit::solve_limit_program(prog, 1e-12);
    CHECK(d.kkt_residual <= 1e-12);
    const double at_solution = limit::limit_program_objective(prog, d.z);
    for (int probe = 0; probe < 100; ++probe) {
      Eigen::VectorXd z = d.z;
      const double radius = std::pow(10.0, -3 + probe % 4);
      for (int j = 0; j < 2; ++j) z(j) += radius * rng.normal();
      CHECK(at_solution <= limit::limit_program_objective(prog, z) + 1e-9);
    }
  }
}

TEST_CASE("multivariate selection probabilities") {
  const auto grid1 = limit::BrownianGrid::standard(1, 2000);

  SUBCASE("deterministic regimes skip simulation") {
    limit::LimitParams params;
    params.regime = limit::SelectionRegime::Consistent;
    params.tilde_beta0 = {ExtendedReal(0.0)};
    CHECK(limit::limit_selection_prob_multivariate(limit::LimitMode::Vtilde, params, 0, 10,
                                                   grid1, 1) == 1.0);
    params.tilde_beta0 = {ExtendedReal::plus_inf()};
    CHECK(limit::limit_selection_prob_multivariate(limit::LimitMode::Vtilde, params, 0, 10,
                                                   grid1, 1) == 0.0);
    limit::LimitParams vbar;
    vbar.regime = limit::SelectionRegime::Consistent;
    vbar.tilde_beta0 = {ExtendedReal::plus_inf()};
    vbar.beta0 = {ExtendedReal::plus_inf()};
    vbar.bar_beta0 = {ExtendedReal(2.0)};
    CHECK(limit::limit_selection_prob_multivariate(limit::LimitMode::Vbar, vbar, 0, 10,
                                                   grid1, 1) == 0.0);
  }
  SUBCASE("k = 1 reduction matches the univariate probability") {
    limit::LimitParams params;
    params.regime = limit::SelectionRegime::Consistent;
    params.tilde_beta0 = {ExtendedReal(1.0)};
    const double p_multi = limit::limit_selection_prob_multivariate(
        limit::LimitMode::Vtilde, params, 0, 20000, grid1, 9101);
    const double p_uni = limit::limit_selection_prob_consistent(1.0, 20000, grid1, 9102);
    CHECK(std::abs(p_multi - p_uni) < 0.01);
  }
}
