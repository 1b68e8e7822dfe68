#include "fastogda/diagnostics.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

#include "fastogda/operator.hpp"

using namespace fastogda;

namespace {

OperatorSpec scalar_identity() {
  return OperatorSpec::from_affine(Matrix::Identity(1, 1), Vector::Zero(1), 1.0);
}

IterateLog synthetic_power_law(double exponent, long n) {
  IterateLog log;
  for (long k = 0; k <= n; ++k) {
    IterateRecord r;
    r.k = k;
    r.residual = k == 0 ? 1.0 : std::pow(static_cast<double>(k), exponent);
    r.velocity = r.residual;
    log.records.push_back(r);
  }
  return log;
}

}  // namespace

TEST_CASE("implicit energy hand value and reductions") {
  Vector zk = Vector::Constant(1, 1.0);   // z^1 - z* = 1
  Vector zkm1 = zk;                       // z^1 - z^0 = 0
  Vector v = Vector::Constant(1, 1.0);
  Vector zstar = Vector::Zero(1);
  EnergyConfig cfg{/*lambda=*/1.0, /*gamma=*/1.6, /*s=*/1.0, /*alpha=*/3.0, std::nullopt};
  BetaSchedule beta;
  const double e = energy_implicit(1, zk, zkm1, v, zstar, cfg, beta);
  CHECK(e == doctest::Approx(10.5).epsilon(1e-15));

  // stationary at z*: zero
  CHECK(energy_implicit(1, zstar, zstar, Vector::Zero(1), zstar, cfg, beta) == 0.0);

  // lambda = 0 reduction
  EnergyConfig cfg0 = cfg;
  cfg0.lambda = 0.0;
  Vector dz = Vector::Constant(1, 0.25);
  Vector zprev = zk - dz;
  const double k = 2.0;
  const double direct = energy_implicit(2, zk, zprev, v, zstar, cfg0, beta);
  const double expected = 0.5 * std::pow(2.0 * k * 0.25 + 1.0 * k * 1.0, 2) +
                          0.5 * (k + 3.0) * k * 1.0;
  CHECK(direct == doctest::Approx(expected).epsilon(1e-14));

  EnergyConfig bad = cfg;
  bad.lambda = 5.0;
  CHECK_THROWS_AS(energy_implicit(1, zk, zkm1, v, zstar, bad, beta), std::invalid_argument);
}

TEST_CASE("implicit energy groupings cross-check at lambda = alpha-1") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> normal;
  BetaSchedule beta{BetaKind::polynomial, 1.3, 0.7};
  EnergyConfig cfg{/*lambda=*/2.0, /*gamma=*/1.6, /*s=*/0.6, /*alpha=*/3.0, std::nullopt};
  for (int trial = 0; trial < 200; ++trial) {
    const long k = 1 + static_cast<long>(rng() % 50);
    Vector zk(3), zkm1(3), v(3), zstar(3);
    for (Eigen::Index j = 0; j < 3; ++j) {
      zk(j) = normal(rng);
      zkm1(j) = normal(rng);
      v(j) = normal(rng);
      zstar(j) = normal(rng);
    }
    const double a = energy_implicit(k, zk, zkm1, v, zstar, cfg, beta);
    const double b = energy_implicit_grouped(k, zk, zkm1, v, zstar, cfg, beta);
    CHECK(std::abs(a - b) <= 1e-12 * (1.0 + std::abs(a)));
  }
}

TEST_CASE("explicit energy hand value and gamma -> 2 limit") {
  Vector zk = Vector::Constant(1, 1.0);
  Vector zkm1 = zk;
  Vector vbar = Vector::Constant(1, 1.0);
  Vector zstar = Vector::Zero(1);
  EnergyConfig cfg{/*lambda=*/1.0, /*gamma=*/1.5, /*s=*/1.0, /*alpha=*/3.0, std::nullopt};
  const double e = energy_explicit(1, zk, zkm1, vbar, zstar, cfg);
  CHECK(e == doctest::Approx(10.25).epsilon(1e-15));

  CHECK(energy_explicit(1, zstar, zstar, Vector::Zero(1), zstar, cfg) == 0.0);

  // gamma -> 2- kills the two (2-gamma)-weighted terms
  EnergyConfig near2 = cfg;
  near2.gamma = 2.0 - 1e-12;
  Vector u = 2.0 * zk + 2.0 * (zk - zkm1) + near2.gamma * 1.0 * vbar;
  const double remaining = 0.5 * u.squaredNorm() + 2.0 * 1.0 * (3.0 - 1.0 - 1.0) * zk.squaredNorm();
  CHECK(energy_explicit(1, zk, zkm1, vbar, zstar, near2) ==
        doctest::Approx(remaining).epsilon(1e-9));

  EnergyConfig bad = cfg;
  bad.gamma = 2.0;
  CHECK_THROWS_AS(energy_explicit(1, zk, zkm1, vbar, zstar, bad), std::invalid_argument);
}

TEST_CASE("regularized energy: k1 formula, stationary value, log requirements") {
  EnergyConfig cfg{/*lambda=*/1.0, /*gamma=*/1.6, /*s=*/0.4, /*alpha=*/3.0, 1.0};
  CHECK(regularized_nonnegative_from(cfg) == 2);

  IterateLog bare;  // no history retained
  bare.records.resize(5);
  CHECK_THROWS_AS(energy_regularized(2, bare, Vector::Zero(1), cfg), InsufficientLogError);

  // all-stationary history: F vanishes
  IterateLog still;
  Vector zstar = Vector::Zero(1);
  for (long k = 0; k <= 4; ++k) {
    still.iterates.push_back(zstar);
    still.v_iterates.push_back(Vector::Zero(1));
    still.v_bars.push_back(k == 0 ? Vector() : Vector::Zero(1));
  }
  CHECK(energy_regularized(3, still, zstar, cfg) == 0.0);
}

TEST_CASE("regularized energy tail is nonincreasing along the explicit run") {
  OperatorSpec op = scalar_identity();
  SolverConfig cfg;
  cfg.z0 = Vector::Constant(1, 1.0);
  cfg.step = 0.4;
  cfg.alpha = 3.0;
  cfg.stop.k_max = 2000;
  cfg.stop.tol_op = 0.0;
  cfg.stop.tol_vec = 0.0;
  cfg.keep_history = true;
  IterateLog log = run_fast_ogda_explicit(op, cfg);

  EnergyConfig ecfg{/*lambda=*/1.0, /*gamma=*/1.6, /*s=*/0.4, /*alpha=*/3.0, 1.0};
  const long k1 = regularized_nonnegative_from(ecfg);
  Vector zstar = Vector::Zero(1);
  std::vector<double> series;
  for (long k = std::max(2L, k1); k <= 2000; ++k)
    series.push_back(energy_regularized(k, log, zstar, ecfg));
  for (double f : series) CHECK(f >= -1e-10);
  auto idx = tail_monotone_index(series, 1e-10 * (1.0 + series.front()));
  REQUIRE(idx.has_value());
  CHECK(*idx <= series.size() / 2);
}

TEST_CASE("tail_monotone_index handles the stated examples") {
  std::vector<double> dec{5, 4, 3, 2, 1};
  CHECK(tail_monotone_index(dec, 0.0) == 0);
  std::vector<double> bump{1, 2, 1, 0.5};
  CHECK(tail_monotone_index(bump, 0.0) == 1);
  std::vector<double> flat{2, 2, 2};
  CHECK(tail_monotone_index(flat, 0.0) == 0);
  std::vector<double> rising{1, 2, 3};
  CHECK_FALSE(tail_monotone_index(rising, 0.0).has_value());
}

TEST_CASE("rate_slope recovers exact power laws") {
  IterateLog inv_k = synthetic_power_law(-1.0, 2000);
  RateFit f1 = rate_slope(inv_k, RateMetric::residual, 0.5);
  CHECK(std::abs(f1.slope + 1.0) <= 1e-9);
  CHECK(f1.r_squared >= 1.0 - 1e-12);

  IterateLog inv_k2 = synthetic_power_law(-2.0, 2000);
  RateFit f2 = rate_slope(inv_k2, RateMetric::residual, 0.5);
  CHECK(std::abs(f2.slope + 2.0) <= 1e-9);
  CHECK(f2.k_lo >= 1000);
  CHECK(f2.k_hi == 2000);
}

TEST_CASE("rate_slope rejects starved windows and floors noise") {
  IterateLog tiny = synthetic_power_law(-1.0, 60);
  CHECK_THROWS_AS(rate_slope(tiny, RateMetric::residual, 0.1), InsufficientDataError);

  // values below 1e-13 of the initial metric are excluded from the fit
  IterateLog floored = synthetic_power_law(-1.0, 4000);
  for (auto& r : floored.records)
    if (r.k > 2000) r.residual = 1e-16;
  RateFit f = rate_slope(floored, RateMetric::residual, 0.75);
  CHECK(f.k_hi <= 2000);
  CHECK(std::abs(f.slope + 1.0) <= 1e-6);
}

TEST_CASE("fast methods reach the theoretical velocity exponent on an affine test") {
  OperatorSpec op = saddle_operator(build_ouyang_xu_structured(10), 1.0);
  SolverConfig cfg;
  cfg.z0 = Vector::Zero(op.dim());
  cfg.alpha = 3.0;
  cfg.stop.k_max = 20000;
  cfg.stop.tol_op = 0.0;
  cfg.stop.tol_vec = 0.0;

  cfg.step = 0.48;
  IterateLog ex = run_fast_ogda_explicit(op, cfg);
  CHECK(rate_slope(ex, RateMetric::velocity, 0.5).slope <= -0.9);

  cfg.step = 1.0;
  IterateLog im = run_fast_ogda_implicit(op, cfg, BetaSchedule{});
  CHECK(rate_slope(im, RateMetric::velocity, 0.5).slope <= -0.9);
}

TEST_CASE("summability proxies are Cauchy for the explicit method") {
  OperatorSpec op = saddle_operator(build_ouyang_xu_structured(8), 1.0);
  SolverConfig cfg;
  cfg.z0 = Vector::Zero(op.dim());
  cfg.step = 0.48;
  cfg.alpha = 3.0;
  cfg.stop.k_max = 20000;
  cfg.stop.tol_op = 0.0;
  cfg.stop.tol_vec = 0.0;
  IterateLog log = run_fast_ogda_explicit(op, cfg);

  double sum_vel = 0.0, sum_res_bar = 0.0;
  double tail_vel = 0.0, tail_res_bar = 0.0;
  const long split = cfg.stop.k_max * 9 / 10;  // last decade of the horizon
  for (const auto& r : log.records) {
    if (r.k < 1) continue;
    const double v = static_cast<double>(r.k) * r.velocity * r.velocity;
    sum_vel += v;
    if (r.k >= split) tail_vel += v;
    if (std::isfinite(r.residual_bar)) {
      const double b = static_cast<double>(r.k) * r.residual_bar * r.residual_bar;
      sum_res_bar += b;
      if (r.k >= split) tail_res_bar += b;
    }
  }
  CHECK(tail_vel < 0.01 * sum_vel);
  CHECK(tail_res_bar < 0.01 * sum_res_bar);
}

TEST_CASE("implicit energy is tail-monotone along Algorithm runs") {
  OperatorSpec op = saddle_operator(build_ouyang_xu_structured(6), 1.0);
  SolverConfig cfg;
  cfg.z0 = Vector::Zero(op.dim());
  cfg.step = 1.0;
  cfg.alpha = 3.0;
  cfg.stop.k_max = 500;
  cfg.stop.tol_op = 0.0;
  cfg.stop.tol_vec = 0.0;
  cfg.keep_history = true;
  BetaSchedule beta;
  IterateLog log = run_fast_ogda_implicit(op, cfg, beta);

  const GrowthCheck growth = check_growth_discrete(cfg.alpha, beta);
  REQUIRE(growth.pass);
  const double eps = growth.margin;
  EnergyConfig ecfg;
  ecfg.alpha = cfg.alpha;
  ecfg.s = cfg.step;
  ecfg.lambda = cfg.alpha - 1.0 - eps / 8.0;  // midpoint of (alpha-1-eps/4, alpha-1)
  Vector zstar = reference_solution(op, 1e-10).z_star;

  std::vector<double> energies;
  for (long k = 1; k <= 500; ++k)
    energies.push_back(
        energy_implicit(k, log.iterates[k], log.iterates[k - 1], log.v_iterates[k], zstar,
                        ecfg, beta));
  for (double e : energies) CHECK(e >= -1e-10);
  auto idx = tail_monotone_index(energies, 1e-10 * (1.0 + energies.front()));
  REQUIRE(idx.has_value());
  CHECK(*idx <= 10 * 3);  // 10 ceil(alpha)
}
