#include "fastogda/solvers.hpp"

#include <algorithm>
#include <cmath>

namespace fastogda {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Shared bookkeeping for all run_* loops: scalar records every iteration,
// thinned snapshots, optional dense history, stop/divergence handling.
class RunState {
 public:
  RunState(std::string method, const OperatorSpec& op, const SolverConfig& cfg)
      : op_(op), cfg_(cfg) {
    log_.method = std::move(method);
    if (cfg.z0.size() != op.dim())
      throw std::invalid_argument(log_.method + ": z0 has wrong dimension");
    if (cfg.z_star) delta0_ = (cfg.z0 - *cfg.z_star).norm();
    blowup_ = 1e12 * (1.0 + cfg.z0.norm());
  }

  Vector eval_algo(const Vector& z) {
    ++log_.evals_algo;
    return op_(z);
  }
  Vector eval_diag(const Vector& z) {
    ++log_.evals_diag;
    return op_(z);
  }

  // Records iterate k. Returns true when the run should halt (stop criteria met
  // or divergence detected).
  bool record(long k, const Vector& z, const Vector& vz, double velocity,
              double residual_bar = kNaN, const Vector* vbar = nullptr,
              double inner_residual = kNaN) {
    IterateRecord rec;
    rec.k = k;
    rec.residual = vz.norm();
    rec.velocity = velocity;
    rec.residual_bar = residual_bar;
    rec.inner_residual = inner_residual;
    rec.iterate_norm = z.norm();
    if (cfg_.z_star) rec.gap = (z - *cfg_.z_star).dot(vz) + delta0_ * vz.norm();
    if (k == 0) initial_residual_ = rec.residual;
    log_.records.push_back(rec);

    if (cfg_.record_every > 0 && k % cfg_.record_every == 0)
      log_.snapshots.emplace_back(k, z);
    if (cfg_.keep_history) {
      log_.iterates.push_back(z);
      log_.v_iterates.push_back(vz);
      log_.v_bars.push_back(vbar ? *vbar : Vector());
    }

    if (!z.allFinite() || !std::isfinite(rec.residual) || z.norm() > blowup_) {
      log_.status = RunStatus::diverged;
      log_.diverged_at = k;
      log_.final_iterate = z;
      return true;
    }
    if (stop_satisfied(rec.residual, velocity, initial_residual_, z.norm(), cfg_.stop)) {
      log_.stopped_at = k;
      log_.status = RunStatus::stopped;
      log_.final_iterate = z;
      return true;
    }
    return false;
  }

  void finish(const Vector& z) {
    if (log_.status == RunStatus::reached_kmax) log_.final_iterate = z;
  }

  void warn(std::string msg) { log_.warnings.push_back(std::move(msg)); }

  long long* algo_counter() { return &log_.evals_algo; }
  IterateLog take() { return std::move(log_); }
  double initial_residual() const { return initial_residual_; }

 private:
  const OperatorSpec& op_;
  const SolverConfig& cfg_;
  IterateLog log_;
  double delta0_ = kNaN;
  double initial_residual_ = kNaN;
  double blowup_ = 0.0;
};

Vector second_point(const SolverConfig& cfg) {
  return cfg.z1.size() > 0 ? cfg.z1 : cfg.z0;
}

Vector bar_start(const SolverConfig& cfg) {
  return cfg.zbar0.size() > 0 ? cfg.zbar0 : second_point(cfg);
}

void require_positive_step(const SolverConfig& cfg, const char* who) {
  if (!(cfg.step > 0.0)) throw std::invalid_argument(std::string(who) + ": step must be positive");
}

void require_alpha(const SolverConfig& cfg, const char* who) {
  if (!(cfg.alpha > 2.0)) throw std::invalid_argument(std::string(who) + ": alpha must exceed 2");
}

double next_eag_step(double s, long k, double L) {
  const double sL2 = s * s * L * L;
  if (sL2 >= 1.0)
    throw std::invalid_argument("run_eag: step recursion undefined (s_k^2 L^2 >= 1)");
  return s * (1.0 - sL2 / (static_cast<double>((k + 1)) * (k + 3) * (1.0 - sL2)));
}

}  // namespace

GrowthCheck check_growth_discrete(double alpha, const BetaSchedule& beta, long k_probe) {
  GrowthCheck out;
  if (!(beta.beta0 > 0.0)) return out;
  double sup = 0.0;
  double prev = beta[0];
  for (long k = 1; k <= k_probe; ++k) {
    const double cur = beta[k];
    if (cur < prev) return out;  // not nondecreasing
    sup = std::max(sup, static_cast<double>(k) * (cur - prev) / cur);
    prev = cur;
  }
  if (beta.kind == BetaKind::polynomial) {
    if (beta.rho < 0.0) return out;
    sup = std::max(sup, beta.rho);  // the scan approaches rho from below
  }
  out.sup_ratio = sup;
  out.margin = (alpha - 2.0) - sup;
  out.pass = sup < alpha - 2.0;
  return out;
}

IterateLog run_eg(const OperatorSpec& op, const SolverConfig& cfg) {
  require_positive_step(cfg, "run_eg");
  RunState st("eg", op, cfg);
  const double s = cfg.step;
  if (op.lipschitz_bound() && s >= 1.0 / *op.lipschitz_bound())
    st.warn("run_eg: step exceeds 1/L; convergence is not guaranteed");

  Vector z = cfg.z0;
  Vector v = st.eval_algo(z);
  if (st.record(0, z, v, kNaN)) return st.take();

  for (long k = 0; k < cfg.stop.k_max; ++k) {
    Vector zbar = z - s * v;
    Vector vbar = st.eval_algo(zbar);
    Vector znext = z - s * vbar;
    Vector vnext = st.eval_algo(znext);  // doubles as V(z^{k+1}) of the next pass
    const double vel = (znext - z).norm();
    z = std::move(znext);
    v = std::move(vnext);
    if (st.record(k + 1, z, v, vel, vbar.norm())) return st.take();
  }
  st.finish(z);
  return st.take();
}

IterateLog run_ogda(const OperatorSpec& op, const SolverConfig& cfg) {
  require_positive_step(cfg, "run_ogda");
  RunState st("ogda", op, cfg);
  const double s = cfg.step;
  if (op.lipschitz_bound() && s >= 0.5 / *op.lipschitz_bound())
    st.warn("run_ogda: step exceeds 1/(2L); convergence is not guaranteed");

  Vector zprev = cfg.z0;
  Vector z = second_point(cfg);
  Vector vprev = st.eval_algo(zprev);
  if (st.record(0, zprev, vprev, kNaN)) return st.take();
  Vector v = (z == zprev) ? vprev : st.eval_algo(z);
  if (st.record(1, z, v, (z - zprev).norm())) return st.take();

  for (long k = 1; k < cfg.stop.k_max; ++k) {
    Vector znext = z - 2.0 * s * v + s * vprev;
    Vector vnext = st.eval_algo(znext);
    const double vel = (znext - z).norm();
    zprev = std::move(z);
    vprev = std::move(v);
    z = std::move(znext);
    v = std::move(vnext);
    if (st.record(k + 1, z, v, vel)) return st.take();
  }
  st.finish(z);
  return st.take();
}

IterateLog run_eag(const OperatorSpec& op, const SolverConfig& cfg, EagMode mode, double s0) {
  if (!(s0 > 0.0)) throw std::invalid_argument("run_eag: s0 must be positive");
  const bool variable = mode == EagMode::variable_step;
  if (variable && !op.lipschitz_bound())
    throw std::invalid_argument("run_eag: variable step mode requires a Lipschitz bound");
  const double L = op.lipschitz_bound().value_or(0.0);
  if (variable && s0 * s0 * L * L >= 1.0)
    throw std::invalid_argument("run_eag: step recursion undefined (s0^2 L^2 >= 1)");

  RunState st(variable ? "eag-v" : "eag", op, cfg);
  if (variable && s0 >= 0.75 / L)
    st.warn("run_eag: s0 outside (0, 3/(4L)); step sequence may not stay admissible");
  if (!variable && op.lipschitz_bound() && s0 > 0.125 / L)
    st.warn("run_eag: constant step exceeds 1/(8L)");

  const Vector anchor = cfg.z0;
  Vector z = cfg.z0;
  Vector v = st.eval_algo(z);
  if (st.record(0, z, v, kNaN)) return st.take();

  double s = s0;
  for (long k = 0; k < cfg.stop.k_max; ++k) {
    Vector pull = (anchor - z) / static_cast<double>(k + 2);
    Vector zbar = z + pull - s * v;
    Vector vbar = st.eval_algo(zbar);
    Vector znext = z + pull - s * vbar;
    Vector vnext = st.eval_algo(znext);
    const double vel = (znext - z).norm();
    z = std::move(znext);
    v = std::move(vnext);
    if (variable) s = next_eag_step(s, k, L);
    if (st.record(k + 1, z, v, vel, vbar.norm())) return st.take();
  }
  st.finish(z);
  return st.take();
}

IterateLog run_nesterov_eag(const OperatorSpec& op, const SolverConfig& cfg) {
  if (!op.lipschitz_bound() || !(*op.lipschitz_bound() > 0.0))
    throw std::invalid_argument("run_nesterov_eag: requires a positive Lipschitz bound");
  const double L = *op.lipschitz_bound();

  RunState st("nesterov-eag", op, cfg);
  const Vector anchor = cfg.z0;
  Vector z = cfg.z0;
  Vector v = st.eval_algo(z);
  if (st.record(0, z, v, kNaN)) return st.take();

  for (long k = 0; k < cfg.stop.k_max; ++k) {
    const double s_first = static_cast<double>(k + 1) / (L * (k + 2));
    Vector pull = (anchor - z) / static_cast<double>(k + 2);
    Vector zbar = z + pull - s_first * v;
    Vector vbar = st.eval_algo(zbar);
    Vector znext = z + pull - (1.0 / L) * vbar;
    Vector vnext = st.eval_algo(znext);
    const double vel = (znext - z).norm();
    z = std::move(znext);
    v = std::move(vnext);
    if (st.record(k + 1, z, v, vel, vbar.norm())) return st.take();
  }
  st.finish(z);
  return st.take();
}

IterateLog run_halpern_ogda(const OperatorSpec& op, const SolverConfig& cfg, double s0) {
  if (!(s0 > 0.0)) throw std::invalid_argument("run_halpern_ogda: s0 must be positive");
  if (!op.lipschitz_bound())
    throw std::invalid_argument("run_halpern_ogda: requires a Lipschitz bound");
  const double L = *op.lipschitz_bound();
  if (s0 * s0 * L * L >= 1.0)
    throw std::invalid_argument("run_halpern_ogda: step recursion undefined (s0^2 L^2 >= 1)");

  RunState st("halpern-ogda", op, cfg);
  if (s0 >= 0.75 / L)
    st.warn("run_halpern_ogda: s0 outside (0, 3/(4L)); step sequence may not stay admissible");

  const Vector anchor = cfg.z0;
  Vector z = cfg.z0;
  Vector zbar = bar_start(cfg);
  Vector vbar = st.eval_algo(zbar);  // V(zbar^0); zbar^0 is supplied, not computed
  Vector v0 = (zbar == z) ? vbar : st.eval_diag(z);
  if (st.record(0, z, v0, kNaN)) return st.take();

  double s = s0;
  for (long k = 0; k < cfg.stop.k_max; ++k) {
    Vector pull = (anchor - z) / static_cast<double>(k + 2);
    if (k > 0) {
      zbar = z + pull - s * vbar;  // first line uses V(zbar^{k-1})
      vbar = st.eval_algo(zbar);
    }
    Vector znext = z + pull - s * vbar;
    Vector vnext = st.eval_diag(znext);
    const double vel = (znext - z).norm();
    z = std::move(znext);
    s = next_eag_step(s, k, L);
    if (st.record(k + 1, z, vnext, vel, vbar.norm(), &vbar)) return st.take();
  }
  st.finish(z);
  return st.take();
}

IterateLog run_fast_ogda_explicit(const OperatorSpec& op, const SolverConfig& cfg) {
  require_alpha(cfg, "run_fast_ogda_explicit");
  require_positive_step(cfg, "run_fast_ogda_explicit");
  const double alpha = cfg.alpha;
  const double s = cfg.step;
  if (op.lipschitz_bound() && s * *op.lipschitz_bound() >= 0.5)
    throw std::invalid_argument("run_fast_ogda_explicit: requires s < 1/(2L)");

  RunState st("fast-ogda-explicit", op, cfg);
  Vector zprev = cfg.z0;
  Vector z = second_point(cfg);
  Vector zbar = bar_start(cfg);
  Vector vbar = st.eval_algo(zbar);

  Vector v0 = (zprev == zbar) ? vbar : st.eval_diag(zprev);
  if (st.record(0, zprev, v0, kNaN)) return st.take();
  Vector v1 = (z == zprev) ? v0 : st.eval_diag(z);
  if (st.record(1, z, v1, (z - zprev).norm(), vbar.norm(), &vbar)) return st.take();

  for (long k = 1; k < cfg.stop.k_max; ++k) {
    const double momentum = 1.0 - alpha / static_cast<double>(k + alpha);
    const double bar_coeff = alpha * s / (2.0 * (k + alpha));
    const double corr_coeff = 0.5 * s * (1.0 + static_cast<double>(k) / (k + alpha));

    Vector zbar_new = z + momentum * (z - zprev) - bar_coeff * vbar;
    Vector vbar_new = st.eval_algo(zbar_new);
    Vector znext = zbar_new - corr_coeff * (vbar_new - vbar);
    Vector vnext = st.eval_diag(znext);

    const double vel = (znext - z).norm();
    zprev = std::move(z);
    z = std::move(znext);
    zbar = std::move(zbar_new);
    vbar = std::move(vbar_new);
    if (st.record(k + 1, z, vnext, vel, vbar.norm(), &vbar)) return st.take();
  }
  st.finish(z);
  return st.take();
}

Vector fast_ogda_explicit_combined_step(long k, double alpha, double s, const Vector& zk,
                                        const Vector& zkm1, const Vector& vbar_km1,
                                        const Vector& vbar_k) {
  const double momentum = 1.0 - alpha / static_cast<double>(k + alpha);
  return zk + momentum * (zk - zkm1) - (alpha * s / (2.0 * (k + alpha))) * vbar_k -
         (s * static_cast<double>(k) / (k + alpha)) * (vbar_k - vbar_km1);
}

std::pair<double, double> implicit_coefficients(long k, double alpha, double s,
                                                const BetaSchedule& beta) {
  if (k < 1) throw std::invalid_argument("implicit_coefficients: k must be >= 1");
  const double bk = beta[k];
  const double bkm1 = beta[k - 1];
  const double sk = s * (alpha * bk + static_cast<double>(k) * (bk - bkm1)) /
                    (2.0 * (static_cast<double>(k) + alpha));
  const double tk = s * static_cast<double>(k) * bkm1 / (static_cast<double>(k) + alpha);
  return {sk, tk};
}

namespace {

// Solves (I + cM) x = b with one cached LU per c, refreshed when c drifts by
// more than 1e-12 relative. Iterative refinement keeps the residual at the
// inner tolerance even when c is large.
class AffineResolvent {
 public:
  explicit AffineResolvent(const AffineForm& form) : form_(form) {}

  Vector apply(double c, const Vector& anchor, double tol) {
    if (!lu_valid_ || std::abs(c - c_cached_) > 1e-12 * std::abs(c_cached_)) {
      const Eigen::Index d = form_.M.rows();
      lu_.compute(Matrix::Identity(d, d) + c * form_.M);
      c_cached_ = c;
      lu_valid_ = true;
    }
    Vector b = anchor - c * form_.q;
    Vector x = lu_.solve(b);
    for (int refine = 0; refine < 3; ++refine) {
      Vector r = b - x - c * (form_.M * x);
      if (r.norm() <= tol) break;
      x += lu_.solve(r);
    }
    return x;
  }

 private:
  const AffineForm& form_;
  Eigen::PartialPivLU<Matrix> lu_;
  double c_cached_ = 0.0;
  bool lu_valid_ = false;
};

// Relaxed forward iteration on the 1-strongly-monotone map F(z) = z + cV(z) - anchor.
Vector resolvent_forward(const OperatorSpec& op, double c, const Vector& anchor, double tol,
                         long long* eval_count) {
  auto eval = [&](const Vector& z) {
    if (eval_count) ++*eval_count;
    return op(z);
  };
  double eta;
  const bool have_L = op.lipschitz_bound().has_value();
  if (have_L) {
    const double cL = c * *op.lipschitz_bound();
    eta = 1.0 / ((1.0 + cL) * (1.0 + cL));
  } else {
    eta = 1.0;
  }
  Vector z = anchor;
  Vector F = z + c * eval(z) - anchor;
  double res = F.norm();
  constexpr long kCap = 10000;
  for (long it = 0; it < kCap && res > tol; ++it) {
    Vector znext = z - eta * F;
    Vector Fnext = znext + c * eval(znext) - anchor;
    const double rnext = Fnext.norm();
    if (!have_L && (rnext > res || !std::isfinite(rnext))) {
      eta *= 0.5;  // adaptive halving on residual increase
      if (eta < 1e-18)
        throw ResolventError("resolvent_solve: step collapsed before reaching tolerance", res);
      continue;
    }
    z = std::move(znext);
    F = std::move(Fnext);
    res = rnext;
  }
  if (res > tol)
    throw ResolventError("resolvent_solve: inner iteration cap reached", res);
  return z;
}

}  // namespace

Vector resolvent_solve(const OperatorSpec& op, double c, const Vector& anchor, double tol) {
  if (!(c > 0.0)) throw std::invalid_argument("resolvent_solve: c must be positive");
  if (!(tol > 0.0)) throw std::invalid_argument("resolvent_solve: tol must be positive");
  if (anchor.size() != op.dim())
    throw std::invalid_argument("resolvent_solve: anchor has wrong dimension");
  if (op.affine_form()) {
    AffineResolvent res(*op.affine_form());
    Vector z = res.apply(c, anchor, tol);
    const double r = (z + c * op(z) - anchor).norm();
    if (r > tol) throw ResolventError("resolvent_solve: linear solve missed tolerance", r);
    return z;
  }
  return resolvent_forward(op, c, anchor, tol, nullptr);
}

IterateLog run_fast_ogda_implicit(const OperatorSpec& op, const SolverConfig& cfg,
                                  const BetaSchedule& beta) {
  require_alpha(cfg, "run_fast_ogda_implicit");
  require_positive_step(cfg, "run_fast_ogda_implicit");
  const GrowthCheck growth = check_growth_discrete(cfg.alpha, beta);
  if (!growth.pass)
    throw std::invalid_argument(
        "run_fast_ogda_implicit: beta schedule violates the growth condition");

  RunState st("fast-ogda-implicit", op, cfg);
  const double alpha = cfg.alpha;
  Vector zprev = cfg.z0;
  Vector z = second_point(cfg);
  Vector vprev = st.eval_algo(zprev);
  if (st.record(0, zprev, vprev, kNaN)) return st.take();
  Vector v = (z == zprev) ? vprev : st.eval_algo(z);
  if (st.record(1, z, v, (z - zprev).norm())) return st.take();

  std::optional<AffineResolvent> affine;
  if (op.affine_form()) affine.emplace(*op.affine_form());

  for (long k = 1; k < cfg.stop.k_max; ++k) {
    const auto [sk, tk] = implicit_coefficients(k, alpha, cfg.step, beta);
    const double c = sk + tk;
    const double momentum = 1.0 - alpha / (static_cast<double>(k) + alpha);
    Vector rhs = z + momentum * (z - zprev) + tk * v;
    const double tol_inner = 1e-12 * (1.0 + rhs.norm());

    Vector znext;
    try {
      znext = affine ? affine->apply(c, rhs, tol_inner)
                     : resolvent_forward(op, c, rhs, tol_inner, st.algo_counter());
    } catch (ResolventError& e) {
      throw ResolventError(std::string(e.what()) + " (implicit step k=" + std::to_string(k) + ")",
                           e.best_residual, k);
    }
    Vector vnext = st.eval_algo(znext);
    const double inner_res = (znext + c * vnext - rhs).norm();
    const double vel = (znext - z).norm();
    zprev = std::move(z);
    v = std::move(vnext);
    z = std::move(znext);
    if (st.record(k + 1, z, v, vel, kNaN, nullptr, inner_res)) return st.take();
  }
  st.finish(z);
  return st.take();
}

}  // namespace fastogda
