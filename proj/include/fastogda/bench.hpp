// The benchmark protocol: solver suites over problem collections, the relative
// stopping criteria, and Dolan-More performance profiles.
#pragma once

#include "fastogda/operator.hpp"
#include "fastogda/solvers.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace fastogda {

/// True iff both relative criteria hold simultaneously:
/// residual/initial <= tol_op and velocity/(||z||+1) <= tol_vec.
/// A zero initial residual means the problem is solved at k = 0.
bool check_stop(const IterateRecord& tail, const StopCriteria& stop, double initial_residual,
                const Vector& current_iterate);

/// One benchmark instance: a materialized problem plus a start point.
struct SuiteProblem {
  std::string id;
  SaddleProblem problem;
  Vector z0;
  std::optional<double> lipschitz;  // override; power-iteration estimate otherwise
};

/// One solver column of the suite. Steps are expressed relative to each
/// problem's Lipschitz bound, matching the reference configurations
/// (ogda 0.48/L, eg 0.96/L, fast-ogda 0.48/L, anchored s0 0.5/L).
struct SolverEntry {
  std::string id;  // eg | ogda | eag | eag-v | nesterov-eag | halpern-ogda |
                   // fast-ogda-explicit | fast-ogda-implicit
  double alpha = 3.0;
  double s_factor = 0.0;   // 0: default for the id
  double s0_factor = 0.5;  // anchored methods
  BetaSchedule beta;       // implicit method
};

struct SuiteSpec {
  std::vector<SuiteProblem> problems;
  std::vector<SolverEntry> solvers;
  StopCriteria stop;
  int threads = 0;        // 0: hardware concurrency
  long log_thin = 100;    // retained per-run records; 0 discards the logs
};

struct RunOutcome {
  long t = -1;  // first k satisfying both stop criteria; -1 when never
  long long evals_algo = 0;
  RunStatus status = RunStatus::reached_kmax;
  double final_residual = std::numeric_limits<double>::quiet_NaN();
  std::vector<IterateRecord> thinned_records;
};

struct SuiteResult {
  std::vector<std::string> problem_ids;
  std::vector<std::string> solver_ids;
  std::vector<std::vector<RunOutcome>> runs;  // [problem][solver]
  long k_max = 0;
};

struct ProfileResult {
  std::vector<std::string> solver_ids;
  std::vector<std::vector<double>> ratios;  // [problem][solver]; 0 marks unsolved
  std::vector<double> tau_grid;
  std::vector<std::vector<double>> rho;  // [solver][tau]
};

/// Runs every (problem, solver) pair; deterministic and independent of the
/// thread count. Individual divergences are recorded as unsolved.
SuiteResult run_suite(const SuiteSpec& suite);

/// Dolan-More profile: r_{p,s} = t_{p,s} / min_s t_{p,s} when solved before
/// k_max, else 0; rho_s(tau) = |{p : 0 < r_{p,s} <= tau}| / N_p.
ProfileResult perf_profile(const SuiteResult& results, double tau_max = 10.0,
                           int tau_points = 200);

/// Profile over the algorithmic V-evaluation counts instead of iteration counts
/// (the EG family spends two evaluations per iteration).
ProfileResult perf_profile_evals(const SuiteResult& results, double tau_max = 10.0,
                                 int tau_points = 200);

/// Runs one solver entry on one problem; shared by run_suite and the CLI.
IterateLog run_solver_entry(const SolverEntry& entry, const OperatorSpec& op,
                            const SolverConfig& cfg);

}  // namespace fastogda
