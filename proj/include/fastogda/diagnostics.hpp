// Discrete Lyapunov energies along solver logs and empirical rate-exponent fits.
#pragma once

#include "fastogda/solvers.hpp"

#include <optional>
#include <span>
#include <vector>

namespace fastogda {

struct EnergyConfig {
  double lambda = 0.0;
  double gamma = 1.6;  // explicit scheme only, 0 < gamma < 2
  double s = 0.0;
  double alpha = 3.0;
  std::optional<double> lipschitz;  // needed by the regularized energy
};

/// Discrete energy of the implicit scheme at iterate k (>= 1), nonnegative for
/// 0 <= lambda <= alpha-1:
///   1/2 ||2 lambda (z^k - z*) + 2k (z^k - z^{k-1}) + s k beta_{k-1} V(z^k)||^2
///   + 2 lambda (alpha-1-lambda) ||z^k - z*||^2
///   + 2 lambda s k beta_{k-1} <z^k - z*, V(z^k)>
///   + 1/2 s^2 (k+alpha) k beta_k beta_{k-1} ||V(z^k)||^2.
double energy_implicit(long k, const Vector& zk, const Vector& zkm1, const Vector& vzk,
                       const Vector& z_star, const EnergyConfig& cfg, const BetaSchedule& beta);

/// Same quantity through the alternative grouping
///   2 lambda (alpha-1) ||z^k - z*||^2 + 4 lambda k <z^k - z*, z^k - z^{k-1} + s beta_{k-1} V(z^k)>
///   + 1/2 k^2 ||2(z^k - z^{k-1}) + s beta_{k-1} V(z^k)||^2 + 1/2 s^2 (k+alpha) k beta_k beta_{k-1} ||V||^2,
/// used to cross-check the expansion.
double energy_implicit_grouped(long k, const Vector& zk, const Vector& zkm1, const Vector& vzk,
                               const Vector& z_star, const EnergyConfig& cfg,
                               const BetaSchedule& beta);

/// Discrete energy of the explicit scheme at iterate k (>= 1); may be negative.
/// Uses u_lambda^k = 2 lambda (z^k - z*) + 2k (z^k - z^{k-1}) + gamma s k V(zbar^{k-1}).
double energy_explicit(long k, const Vector& zk, const Vector& zkm1, const Vector& vbar_km1,
                       const Vector& z_star, const EnergyConfig& cfg);

struct InsufficientLogError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Regularized explicit energy F_lambda^k (k >= 2); requires the log to carry
/// full history (z^k, V(z^k), V(zbar^{k-1}), V(zbar^{k-2})) and a Lipschitz bound.
/// Nonnegative from k_1 = ceil(2 lambda (alpha-2) / ((2-gamma) alpha)) when
/// 1 < gamma < 2 and lambda <= gamma (alpha-1)/2.
double energy_regularized(long k, const IterateLog& log, const Vector& z_star,
                          const EnergyConfig& cfg);

/// First index of the regime where F_lambda^k is guaranteed nonnegative.
long regularized_nonnegative_from(const EnergyConfig& cfg);

/// Smallest index i such that series[j+1] <= series[j] + tol for all j >= i;
/// empty when no such index exists.
std::optional<std::size_t> tail_monotone_index(std::span<const double> series, double tol);

enum class RateMetric { residual, velocity, gap };

struct RateFit {
  double slope = 0.0;  // least-squares slope of log(metric) vs log k
  long k_lo = 0;
  long k_hi = 0;
  double r_squared = 0.0;
};

struct InsufficientDataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Fits log(metric) against log(k) over the last window_fraction of recorded
/// iterations. Values at the floating-point noise floor (below 1e-13 of the
/// initial metric) and nonpositive values are excluded; at least 50 usable
/// records are required.
RateFit rate_slope(const IterateLog& log, RateMetric metric, double window_fraction);

}  // namespace fastogda
