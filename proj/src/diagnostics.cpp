#include "fastogda/diagnostics.hpp"

#include <algorithm>
#include <cmath>

namespace fastogda {

namespace {

void require_lambda(double lambda, double alpha, const char* who) {
  if (lambda < 0.0 || lambda > alpha - 1.0)
    throw std::invalid_argument(std::string(who) + ": lambda must lie in [0, alpha-1]");
}

}  // namespace

double energy_implicit(long k, const Vector& zk, const Vector& zkm1, const Vector& vzk,
                       const Vector& z_star, const EnergyConfig& cfg,
                       const BetaSchedule& beta) {
  if (k < 1) throw std::invalid_argument("energy_implicit: k must be >= 1");
  require_lambda(cfg.lambda, cfg.alpha, "energy_implicit");
  const double kd = static_cast<double>(k);
  const double bk = beta[k], bkm1 = beta[k - 1];
  const double lam = cfg.lambda, s = cfg.s;
  Vector diff = zk - z_star;
  Vector mix = 2.0 * lam * diff + 2.0 * kd * (zk - zkm1) + s * kd * bkm1 * vzk;
  return 0.5 * mix.squaredNorm() + 2.0 * lam * (cfg.alpha - 1.0 - lam) * diff.squaredNorm() +
         2.0 * lam * s * kd * bkm1 * diff.dot(vzk) +
         0.5 * s * s * (kd + cfg.alpha) * kd * bk * bkm1 * vzk.squaredNorm();
}

double energy_implicit_grouped(long k, const Vector& zk, const Vector& zkm1, const Vector& vzk,
                               const Vector& z_star, const EnergyConfig& cfg,
                               const BetaSchedule& beta) {
  if (k < 1) throw std::invalid_argument("energy_implicit_grouped: k must be >= 1");
  require_lambda(cfg.lambda, cfg.alpha, "energy_implicit_grouped");
  const double kd = static_cast<double>(k);
  const double bk = beta[k], bkm1 = beta[k - 1];
  const double lam = cfg.lambda, s = cfg.s;
  Vector diff = zk - z_star;
  Vector inner = zk - zkm1 + s * bkm1 * vzk;
  Vector doubled = 2.0 * (zk - zkm1) + s * bkm1 * vzk;
  return 2.0 * lam * (cfg.alpha - 1.0) * diff.squaredNorm() + 4.0 * lam * kd * diff.dot(inner) +
         0.5 * kd * kd * doubled.squaredNorm() +
         0.5 * s * s * (kd + cfg.alpha) * kd * bk * bkm1 * vzk.squaredNorm();
}

double energy_explicit(long k, const Vector& zk, const Vector& zkm1, const Vector& vbar_km1,
                       const Vector& z_star, const EnergyConfig& cfg) {
  if (k < 1) throw std::invalid_argument("energy_explicit: k must be >= 1");
  require_lambda(cfg.lambda, cfg.alpha, "energy_explicit");
  if (!(cfg.gamma > 0.0) || !(cfg.gamma < 2.0))
    throw std::invalid_argument("energy_explicit: gamma must lie in (0, 2)");
  const double kd = static_cast<double>(k);
  const double lam = cfg.lambda, s = cfg.s, g = cfg.gamma;
  Vector diff = zk - z_star;
  Vector u = 2.0 * lam * diff + 2.0 * kd * (zk - zkm1) + g * s * kd * vbar_km1;
  return 0.5 * u.squaredNorm() + 2.0 * lam * (cfg.alpha - 1.0 - lam) * diff.squaredNorm() +
         2.0 * (2.0 - g) * lam * s * kd * diff.dot(vbar_km1) +
         0.5 * (2.0 - g) * s * s * kd * (g * kd + cfg.alpha) * vbar_km1.squaredNorm();
}

long regularized_nonnegative_from(const EnergyConfig& cfg) {
  return static_cast<long>(
      std::ceil(2.0 * cfg.lambda * (cfg.alpha - 2.0) / ((2.0 - cfg.gamma) * cfg.alpha)));
}

double energy_regularized(long k, const IterateLog& log, const Vector& z_star,
                          const EnergyConfig& cfg) {
  if (k < 2) throw std::invalid_argument("energy_regularized: k must be >= 2");
  if (!cfg.lipschitz)
    throw std::invalid_argument("energy_regularized: requires a Lipschitz bound");
  const auto n = static_cast<std::size_t>(k);
  if (log.iterates.size() <= n || log.v_iterates.size() <= n || log.v_bars.size() <= n ||
      log.v_bars[n].size() == 0 || log.v_bars[n - 1].size() == 0)
    throw InsufficientLogError(
        "energy_regularized: log lacks the cached operator values (run with keep_history)");

  const Vector& zk = log.iterates[n];
  const Vector& zkm1 = log.iterates[n - 1];
  const Vector& vzk = log.v_iterates[n];
  const Vector& vbar_km1 = log.v_bars[n];      // V(zbar^{k-1})
  const Vector& vbar_km2 = log.v_bars[n - 1];  // V(zbar^{k-2})

  const double kd = static_cast<double>(k);
  const double s = cfg.s, g = cfg.gamma, L = *cfg.lipschitz;
  const double base = energy_explicit(k, zk, zkm1, vbar_km1, z_star, cfg);
  const double sqk = std::sqrt(kd);
  return base - 2.0 * (2.0 - g) * s * kd * kd * (zk - zkm1).dot(vzk - vbar_km1) +
         0.5 * (2.0 - g) * s * s * kd * sqk * (2.0 * s * L * sqk + cfg.alpha) *
             (vbar_km1 - vbar_km2).squaredNorm() -
         0.5 * cfg.lambda * (cfg.alpha - 2.0) * s * s * (2.0 - cfg.alpha / (kd + cfg.alpha)) *
             vbar_km1.squaredNorm();
}

std::optional<std::size_t> tail_monotone_index(std::span<const double> series, double tol) {
  if (series.size() <= 1) return series.empty() ? std::optional<std::size_t>{} : 0;
  std::size_t idx = series.size() - 1;  // monotone tail of length one
  for (std::size_t j = series.size() - 1; j-- > 0;) {
    if (series[j + 1] <= series[j] + tol)
      idx = j;
    else if (idx == series.size() - 1)
      return std::nullopt;  // the very last transition already violates
    else
      break;
  }
  return idx;
}

RateFit rate_slope(const IterateLog& log, RateMetric metric, double window_fraction) {
  if (!(window_fraction > 0.0) || window_fraction > 1.0)
    throw std::invalid_argument("rate_slope: window_fraction must lie in (0, 1]");
  auto value = [&](const IterateRecord& r) {
    switch (metric) {
      case RateMetric::residual: return r.residual;
      case RateMetric::velocity: return r.velocity;
      case RateMetric::gap: return r.gap;
    }
    return std::numeric_limits<double>::quiet_NaN();
  };

  double initial = std::numeric_limits<double>::quiet_NaN();
  for (const auto& r : log.records) {
    const double v = value(r);
    if (std::isfinite(v) && v > 0.0) {
      initial = v;
      break;
    }
  }
  if (!std::isfinite(initial))
    throw InsufficientDataError("rate_slope: no positive metric values in the log");
  const double floor = 1e-13 * initial;

  const std::size_t total = log.records.size();
  const auto start = static_cast<std::size_t>(std::floor((1.0 - window_fraction) * total));

  std::vector<double> xs, ys;
  RateFit fit;
  fit.k_lo = 0;
  for (std::size_t i = start; i < total; ++i) {
    const auto& r = log.records[i];
    const double v = value(r);
    if (r.k < 1 || !std::isfinite(v) || v <= floor) continue;
    if (xs.empty()) fit.k_lo = r.k;
    fit.k_hi = r.k;
    xs.push_back(std::log(static_cast<double>(r.k)));
    ys.push_back(std::log(v));
  }
  if (xs.size() < 50)
    throw InsufficientDataError("rate_slope: fewer than 50 usable records in the window");

  const double n = static_cast<double>(xs.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx, dy = ys[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx == 0.0) throw InsufficientDataError("rate_slope: degenerate window");
  fit.slope = sxy / sxx;
  fit.r_squared = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  return fit;
}

}  // namespace fastogda
