#include "fastogda/continuous.hpp"

namespace fastogda {

GrowthCheckContinuous check_growth(double alpha, const BetaFunction& beta, bool strict) {
  GrowthCheckContinuous out;
  if (!(beta.beta0 > 0.0)) return out;
  const double rho = beta.kind == BetaKind::constant ? 0.0 : beta.rho;
  if (rho < 0.0) return out;
  out.margin = (alpha - 2.0) - rho;
  out.pass = strict ? out.margin > 0.0 : out.margin >= 0.0;
  return out;
}

Vector recover_zdot(const ContinuousState& state, double alpha, const BetaFunction& beta,
                    const Vector& vz) {
  const double t = state.t;
  return state.u / (2.0 * t) - ((alpha - 1.0) / t) * state.z - beta.value(t) * vz;
}

namespace {

// rhs with the operator value already in hand; shared by ode_rhs and the integrator.
std::pair<Vector, Vector> rhs_with_value(double t, const Vector& z, const Vector& u,
                                         double alpha, const BetaFunction& beta,
                                         const Vector& vz) {
  const double b = beta.value(t);
  Vector dz = u / (2.0 * t) - ((alpha - 1.0) / t) * z - b * vz;
  Vector du = (t * beta.derivative(t) + (2.0 - alpha) * b) * vz;
  return {std::move(dz), std::move(du)};
}

}  // namespace

std::pair<Vector, Vector> ode_rhs(const ContinuousState& state, double alpha,
                                  const BetaFunction& beta, const OperatorSpec& op) {
  if (!(state.t > 0.0)) throw std::invalid_argument("ode_rhs: t must be positive");
  return rhs_with_value(state.t, state.z, state.u, alpha, beta, op(state.z));
}

double w_coefficient(double t, double alpha, const BetaFunction& beta) {
  return 0.5 * ((alpha - 2.0) * beta.value(t) / t - beta.derivative(t));
}

double energy_continuous(double t, const Vector& z, const Vector& zdot, const Vector& vz,
                         double alpha, const BetaFunction& beta, double lambda,
                         const Vector& z_star) {
  if (lambda < 0.0 || lambda > alpha - 1.0)
    throw std::invalid_argument("energy_continuous: lambda must lie in [0, alpha-1]");
  const double b = beta.value(t);
  Vector diff = z - z_star;
  Vector mix = 2.0 * lambda * diff + t * (2.0 * zdot + b * vz);
  const double tb = t * b;
  return 0.5 * mix.squaredNorm() + 2.0 * lambda * (alpha - 1.0 - lambda) * diff.squaredNorm() +
         2.0 * lambda * tb * diff.dot(vz) + 0.5 * tb * tb * vz.squaredNorm();
}

ContinuousTrajectory integrate(const OperatorSpec& op, const Vector& z0, const Vector& zdot0,
                               double t0, double t_end, double dt, double alpha,
                               const BetaFunction& beta, std::optional<Vector> z_star,
                               long snapshot_every) {
  if (!(dt > 0.0)) throw std::invalid_argument("integrate: dt must be positive");
  if (!(t0 > 0.0)) throw std::invalid_argument("integrate: t0 must be positive");
  if (t_end < t0) throw std::invalid_argument("integrate: t_end must be >= t0");
  if (!(alpha > 2.0)) throw std::invalid_argument("integrate: alpha must exceed 2");
  if (z0.size() != op.dim() || zdot0.size() != op.dim())
    throw std::invalid_argument("integrate: initial condition has wrong dimension");
  if (!check_growth(alpha, beta, /*strict=*/false).pass)
    throw std::invalid_argument("integrate: beta violates the growth condition");

  ContinuousTrajectory traj;
  traj.alpha = alpha;
  traj.beta = beta;
  traj.t0 = t0;
  traj.dt = dt;

  if (!z_star && op.affine_form()) {
    try {
      SolutionRef ref = reference_solution(op, 1e-9);
      traj.energy_reference_trusted = ref.residual <= 1e-9;
      z_star = std::move(ref.z_star);
    } catch (const NoReferenceError&) {
      traj.energy_reference_trusted = false;
    }
  }

  const long n_steps = std::lround((t_end - t0) / dt);
  double t = t0;
  Vector z = z0;
  Vector u = 2.0 * (alpha - 1.0) * z0 + 2.0 * t0 * zdot0 + 2.0 * t0 * beta.value(t0) * op(z0);

  const double lambda_e = alpha - 1.0;
  auto sample = [&](double ts, const Vector& zs, const Vector& us, const Vector& vz,
                    long step_index) {
    Vector zdot = us / (2.0 * ts) - ((alpha - 1.0) / ts) * zs - beta.value(ts) * vz;
    TrajectorySample smp;
    smp.t = ts;
    smp.residual = vz.norm();
    smp.velocity = zdot.norm();
    smp.w = w_coefficient(ts, alpha, beta);
    if (z_star) {
      smp.energy = energy_continuous(ts, zs, zdot, vz, alpha, beta, lambda_e, *z_star);
      smp.gap_inner = (zs - *z_star).dot(vz);
    }
    traj.samples.push_back(smp);
    if (snapshot_every > 0 && step_index % snapshot_every == 0)
      traj.snapshots.emplace_back(ts, zs, zdot);
    if (!zs.allFinite() || !std::isfinite(smp.residual))
      throw IntegrationDivergence("integrate: non-finite state", ts);
    return zdot;
  };

  Vector vz = op(z);
  Vector zdot = sample(t, z, u, vz, 0);

  for (long i = 0; i < n_steps; ++i) {
    // classical RK4; stage 1 reuses the sample's operator value
    auto [k1z, k1u] = rhs_with_value(t, z, u, alpha, beta, vz);
    const double th = t + 0.5 * dt;
    Vector z2 = z + 0.5 * dt * k1z, u2 = u + 0.5 * dt * k1u;
    auto [k2z, k2u] = rhs_with_value(th, z2, u2, alpha, beta, op(z2));
    Vector z3 = z + 0.5 * dt * k2z, u3 = u + 0.5 * dt * k2u;
    auto [k3z, k3u] = rhs_with_value(th, z3, u3, alpha, beta, op(z3));
    const double tn = t + dt;
    Vector z4 = z + dt * k3z, u4 = u + dt * k3u;
    auto [k4z, k4u] = rhs_with_value(tn, z4, u4, alpha, beta, op(z4));

    z += (dt / 6.0) * (k1z + 2.0 * k2z + 2.0 * k3z + k4z);
    u += (dt / 6.0) * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
    t = t0 + (i + 1) * dt;

    vz = op(z);
    zdot = sample(t, z, u, vz, i + 1);
  }

  traj.final_z = std::move(z);
  traj.final_zdot = std::move(zdot);
  return traj;
}

}  // namespace fastogda
