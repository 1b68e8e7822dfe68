// Second-order dynamics for V(z) = 0 integrated through the first-order
// reformulation in (z, u), with Lyapunov-energy monitoring.
#pragma once

#include "fastogda/operator.hpp"
#include "fastogda/solvers.hpp"  // BetaKind

#include <cmath>
#include <optional>
#include <tuple>
#include <vector>

namespace fastogda {

/// Time-scaling function beta(t) = beta0 * t^rho (constant kind ignores rho);
/// derivative available analytically.
struct BetaFunction {
  BetaKind kind = BetaKind::constant;
  double beta0 = 1.0;
  double rho = 0.0;

  double value(double t) const {
    return kind == BetaKind::constant ? beta0 : beta0 * std::pow(t, rho);
  }
  double derivative(double t) const {
    return kind == BetaKind::constant || rho == 0.0 ? 0.0
                                                    : beta0 * rho * std::pow(t, rho - 1.0);
  }
};

struct GrowthCheckContinuous {
  bool pass = false;
  double margin = 0.0;  // (alpha - 2) - rho
};

/// Growth condition sup_t t beta'(t)/beta(t) <= alpha - 2 (strict: <). For the
/// polynomial family the ratio is identically rho.
GrowthCheckContinuous check_growth(double alpha, const BetaFunction& beta, bool strict);

/// State of the first-order reformulation. The auxiliary variable is
/// u(t) = 2(alpha-1) z + 2t z' + 2t beta(t) V(z); z' is recoverable from (z, u).
struct ContinuousState {
  double t = 0.0;
  Vector z;
  Vector u;
};

/// z'(t) = u/(2t) - (alpha-1) z / t - beta(t) V(z).
Vector recover_zdot(const ContinuousState& state, double alpha, const BetaFunction& beta,
                    const Vector& vz);

/// Right-hand side of the reformulated system:
///   z' = u/(2t) - (alpha-1) z / t - beta V(z)
///   u' = (t beta'(t) + (2-alpha) beta(t)) V(z)
/// Only V-evaluations are needed; the d/dt V(z(t)) term never appears.
std::pair<Vector, Vector> ode_rhs(const ContinuousState& state, double alpha,
                                  const BetaFunction& beta, const OperatorSpec& op);

struct TrajectorySample {
  double t = 0.0;
  double residual = 0.0;  // ||V(z(t))||
  double velocity = 0.0;  // ||z'(t)||
  double energy = std::numeric_limits<double>::quiet_NaN();  // E_{alpha-1}(t)
  double w = 0.0;
  double gap_inner = std::numeric_limits<double>::quiet_NaN();  // <z - z*, V(z)>
};

struct ContinuousTrajectory {
  std::vector<TrajectorySample> samples;
  std::vector<std::tuple<double, Vector, Vector>> snapshots;  // (t, z, z'), thinned
  Vector final_z;
  Vector final_zdot;
  // config echo
  double alpha = 0.0;
  BetaFunction beta;
  double t0 = 0.0;
  double dt = 0.0;
  bool energy_reference_trusted = true;  // false when the reference residual exceeds 1e-9
};

struct IntegrationDivergence : std::runtime_error {
  IntegrationDivergence(const std::string& what, double at_t)
      : std::runtime_error(what), t(at_t) {}
  double t;
};

/// Fixed-step classical fourth-order integration of the reformulated system on
/// [t0, t_end], with u(t0) = 2(alpha-1) z0 + 2 t0 zdot0 + 2 t0 beta(t0) V(z0).
/// Scalar samples are recorded every step; (z, z') snapshots are thinned by
/// snapshot_every (0 disables them). Energies require z_star; when it is absent
/// an affine reference is computed, otherwise energies are NaN.
ContinuousTrajectory integrate(const OperatorSpec& op, const Vector& z0, const Vector& zdot0,
                               double t0, double t_end, double dt, double alpha,
                               const BetaFunction& beta,
                               std::optional<Vector> z_star = std::nullopt,
                               long snapshot_every = 0);

/// Lyapunov energy E_lambda(t) for 0 <= lambda <= alpha - 1:
///   1/2 ||2 lambda (z - z*) + t(2 z' + beta V)||^2 + 2 lambda (alpha-1-lambda) ||z - z*||^2
///   + 2 lambda t beta <z - z*, V> + 1/2 t^2 beta^2 ||V||^2.
double energy_continuous(double t, const Vector& z, const Vector& zdot, const Vector& vz,
                         double alpha, const BetaFunction& beta, double lambda,
                         const Vector& z_star);

/// w(t) = ((alpha - 2) beta(t)/t - beta'(t)) / 2; nonnegative under the growth condition.
double w_coefficient(double t, double alpha, const BetaFunction& beta);

}  // namespace fastogda
