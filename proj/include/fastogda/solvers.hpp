// Discrete-time methods for monotone equations V(z) = 0 with uniform logging:
// explicit/implicit Fast OGDA, EG, OGDA, EAG (constant and variable step),
// Nesterov-EAG and Halpern-OGDA.
#pragma once

#include "fastogda/operator.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace fastogda {

enum class BetaKind { constant, polynomial };

/// Time-scaling sequence for the implicit method: beta_k = beta0 * k^rho for
/// k >= 1 and beta_0 = beta0 (constant kind ignores rho).
struct BetaSchedule {
  BetaKind kind = BetaKind::constant;
  double beta0 = 1.0;
  double rho = 0.0;

  double operator[](long k) const {
    if (kind == BetaKind::constant || k <= 1) return beta0;
    return beta0 * std::pow(static_cast<double>(k), rho);
  }
};

struct GrowthCheck {
  bool pass = false;
  double sup_ratio = 0.0;  // sup_k k(beta_k - beta_{k-1}) / beta_k
  double margin = 0.0;     // (alpha - 2) - sup_ratio; the slack epsilon
};

/// Validates sup_{1<=k<=K} k(beta_k - beta_{k-1})/beta_k < alpha - 2, combining a
/// numeric scan with the analytic criterion rho < alpha - 2 for the polynomial kind.
GrowthCheck check_growth_discrete(double alpha, const BetaSchedule& beta,
                                  long k_probe = 1000000);

struct StopCriteria {
  double tol_op = 1e-6;   // relative operator-norm tolerance
  double tol_vec = 1e-5;  // relative velocity tolerance
  long k_max = 100000;
};

/// True iff both relative criteria hold at the current iterate:
/// ||V(z_k)|| / ||V(z_0)|| <= tol_op and ||z_k - z_{k-1}|| / (||z_k|| + 1) <= tol_vec.
/// A zero initial residual counts as already solved.
inline bool stop_satisfied(double residual, double velocity, double initial_residual,
                           double iterate_norm, const StopCriteria& stop) {
  if (initial_residual == 0.0) return true;
  if (!std::isfinite(velocity)) return false;
  return residual <= stop.tol_op * initial_residual &&
         velocity <= stop.tol_vec * (iterate_norm + 1.0);
}

struct SolverConfig {
  double alpha = 3.0;  // momentum parameter, required > 2 by the fast methods
  double step = 0.0;   // s
  Vector z0;
  Vector z1;     // empty: defaults to z0
  Vector zbar0;  // empty: defaults to z1
  StopCriteria stop;
  long record_every = 0;      // iterate-snapshot thinning; 0 disables snapshots
  bool keep_history = false;  // retain z^k, V(z^k), V(zbar^{k-1}) per k (diagnostics)
  std::optional<Vector> z_star;  // enables the gap-surrogate column
};

enum class RunStatus { stopped, reached_kmax, diverged };

struct IterateRecord {
  long k = 0;
  double residual = 0.0;  // ||V(z^k)||
  double velocity = std::numeric_limits<double>::quiet_NaN();  // ||z^k - z^{k-1}||
  double gap = std::numeric_limits<double>::quiet_NaN();
  double residual_bar = std::numeric_limits<double>::quiet_NaN();  // ||V(zbar^{k-1})||
  double inner_residual = std::numeric_limits<double>::quiet_NaN();  // implicit steps
  double iterate_norm = std::numeric_limits<double>::quiet_NaN();   // ||z^k||
};

/// Per-iteration trajectory of a run. Scalar records are kept for every k;
/// iterate snapshots are thinned by record_every.
struct IterateLog {
  std::string method;
  std::vector<IterateRecord> records;
  std::optional<long> stopped_at;  // first k satisfying both stop criteria
  RunStatus status = RunStatus::reached_kmax;
  std::optional<long> diverged_at;
  Vector final_iterate;
  long long evals_algo = 0;  // V-evaluations the method itself requires
  long long evals_diag = 0;  // extra V-evaluations spent on logging/stopping
  std::vector<std::pair<long, Vector>> snapshots;
  // Full history, populated only when keep_history is set. Index k holds z^k,
  // V(z^k) and V(zbar^{k-1}) (bar entries start at k = 1; entry 0 is empty).
  std::vector<Vector> iterates;
  std::vector<Vector> v_iterates;
  std::vector<Vector> v_bars;
  std::vector<std::string> warnings;
};

/// Extragradient: zbar^k = z^k - s V(z^k); z^{k+1} = z^k - s V(zbar^k).
IterateLog run_eg(const OperatorSpec& op, const SolverConfig& cfg);

/// OGDA: z^{k+1} = z^k - 2 s V(z^k) + s V(z^{k-1}).
IterateLog run_ogda(const OperatorSpec& op, const SolverConfig& cfg);

enum class EagMode { constant_step, variable_step };

/// Extra Anchored Gradient with anchor pull (z^0 - z^k)/(k+2). The variable mode
/// follows s_{k+1} = s_k (1 - s_k^2 L^2 / ((k+1)(k+3)(1 - s_k^2 L^2))), s_0 in (0, 3/(4L)).
IterateLog run_eag(const OperatorSpec& op, const SolverConfig& cfg, EagMode mode, double s0);

/// EAG with first-line steps (k+1)/(L(k+2)) and constant second-line step 1/L.
IterateLog run_nesterov_eag(const OperatorSpec& op, const SolverConfig& cfg);

/// EAG-V with V(z^k) in the first update line replaced by V(zbar^{k-1});
/// one new V-evaluation per iteration.
IterateLog run_halpern_ogda(const OperatorSpec& op, const SolverConfig& cfg, double s0);

/// Explicit Fast OGDA (requires alpha > 2 and s < 1/(2L)):
///   zbar^k  = z^k + (1 - alpha/(k+alpha))(z^k - z^{k-1}) - (alpha s / (2(k+alpha))) V(zbar^{k-1})
///   z^{k+1} = zbar^k - (s/2)(1 + k/(k+alpha)) (V(zbar^k) - V(zbar^{k-1}))
IterateLog run_fast_ogda_explicit(const OperatorSpec& op, const SolverConfig& cfg);

/// Single-update equivalent of the explicit scheme, used to cross-validate the
/// two-line form.
Vector fast_ogda_explicit_combined_step(long k, double alpha, double s, const Vector& zk,
                                        const Vector& zkm1, const Vector& vbar_km1,
                                        const Vector& vbar_k);

/// Coefficients of the implicit scheme:
///   s_k = s (alpha beta_k + k(beta_k - beta_{k-1})) / (2(k+alpha)),
///   t_k = s k beta_{k-1} / (k+alpha).
std::pair<double, double> implicit_coefficients(long k, double alpha, double s,
                                                const BetaSchedule& beta);

/// Raised when the resolvent inner solver fails to reach its tolerance.
struct ResolventError : std::runtime_error {
  ResolventError(const std::string& what, double best, long at_step = -1)
      : std::runtime_error(what), best_residual(best), step_index(at_step) {}
  double best_residual;
  long step_index;
};

/// Evaluates (Id + c V)^{-1}(anchor): a linear solve for affine V, otherwise a
/// relaxed forward iteration on F(z) = z + c V(z) - anchor.
Vector resolvent_solve(const OperatorSpec& op, double c, const Vector& anchor, double tol);

/// Implicit Fast OGDA: z^{k+1} = (Id + (s_k + t_k) V)^{-1}(z^k + (1 - alpha/(k+alpha))(z^k - z^{k-1}) + t_k V(z^k)).
/// The schedule must satisfy the growth condition sup_k k(beta_k - beta_{k-1})/beta_k < alpha - 2.
IterateLog run_fast_ogda_implicit(const OperatorSpec& op, const SolverConfig& cfg,
                                  const BetaSchedule& beta);

}  // namespace fastogda
