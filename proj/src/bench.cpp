#include "fastogda/bench.hpp"

#include <atomic>
#include <cmath>
#include <thread>

namespace fastogda {

bool check_stop(const IterateRecord& tail, const StopCriteria& stop, double initial_residual,
                const Vector& current_iterate) {
  return stop_satisfied(tail.residual, tail.velocity, initial_residual, current_iterate.norm(),
                        stop);
}

namespace {

double default_s_factor(const std::string& id) {
  if (id == "eg") return 0.96;
  if (id == "ogda" || id == "fast-ogda-explicit") return 0.48;
  if (id == "eag") return 0.125;
  if (id == "fast-ogda-implicit") return 1.0;
  return 0.0;
}

}  // namespace

IterateLog run_solver_entry(const SolverEntry& entry, const OperatorSpec& op,
                            const SolverConfig& cfg_in) {
  const double L = op.lipschitz_bound().value_or(1.0);
  SolverConfig cfg = cfg_in;
  cfg.alpha = entry.alpha;
  const double sf = entry.s_factor > 0.0 ? entry.s_factor : default_s_factor(entry.id);
  cfg.step = sf / L;
  const double s0 = entry.s0_factor / L;

  if (entry.id == "eg") return run_eg(op, cfg);
  if (entry.id == "ogda") return run_ogda(op, cfg);
  if (entry.id == "eag") return run_eag(op, cfg, EagMode::constant_step, cfg.step);
  if (entry.id == "eag-v") return run_eag(op, cfg, EagMode::variable_step, s0);
  if (entry.id == "nesterov-eag") return run_nesterov_eag(op, cfg);
  if (entry.id == "halpern-ogda") return run_halpern_ogda(op, cfg, s0);
  if (entry.id == "fast-ogda-explicit") return run_fast_ogda_explicit(op, cfg);
  if (entry.id == "fast-ogda-implicit") return run_fast_ogda_implicit(op, cfg, entry.beta);
  throw std::invalid_argument("unknown solver id: " + entry.id);
}

SuiteResult run_suite(const SuiteSpec& suite) {
  SuiteResult result;
  result.k_max = suite.stop.k_max;
  for (const auto& p : suite.problems) result.problem_ids.push_back(p.id);
  for (const auto& s : suite.solvers) result.solver_ids.push_back(s.id);

  {
    std::map<std::string, int> seen;
    for (const auto& id : result.problem_ids)
      if (++seen[id] > 1) throw std::invalid_argument("run_suite: duplicate problem id " + id);
    seen.clear();
    for (const auto& id : result.solver_ids)
      if (++seen[id] > 1) throw std::invalid_argument("run_suite: duplicate solver id " + id);
  }

  const std::size_t np = suite.problems.size();
  const std::size_t ns = suite.solvers.size();
  result.runs.assign(np, std::vector<RunOutcome>(ns));

  // Operators (and their norm estimates) are shared across solver columns.
  std::vector<OperatorSpec> ops;
  ops.reserve(np);
  for (const auto& p : suite.problems) ops.push_back(saddle_operator(p.problem, p.lipschitz));

  auto execute = [&](std::size_t pi, std::size_t si) {
    const SuiteProblem& prob = suite.problems[pi];
    SolverConfig cfg;
    cfg.z0 = prob.z0;
    cfg.stop = suite.stop;
    RunOutcome out;
    try {
      IterateLog log = run_solver_entry(suite.solvers[si], ops[pi], cfg);
      out.status = log.status;
      out.evals_algo = log.evals_algo;
      out.final_residual = log.records.empty()
                               ? std::numeric_limits<double>::quiet_NaN()
                               : log.records.back().residual;
      if (log.stopped_at) out.t = *log.stopped_at;
      if (suite.log_thin > 0) {
        for (const auto& rec : log.records)
          if (rec.k % suite.log_thin == 0 || rec.k == log.records.back().k)
            out.thinned_records.push_back(rec);
      }
    } catch (const std::exception&) {
      out.status = RunStatus::diverged;  // recorded as unsolved, never aborts the suite
      out.t = -1;
    }
    result.runs[pi][si] = std::move(out);
  };

  const std::size_t total = np * ns;
  unsigned threads = suite.threads > 0 ? static_cast<unsigned>(suite.threads)
                                       : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<std::size_t>(threads, total > 0 ? total : 1);

  if (threads <= 1) {
    for (std::size_t i = 0; i < total; ++i) execute(i / ns, i % ns);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t)
      pool.emplace_back([&]() {
        for (std::size_t i = next.fetch_add(1); i < total; i = next.fetch_add(1))
          execute(i / ns, i % ns);
      });
    for (auto& th : pool) th.join();
  }
  return result;
}

namespace {

ProfileResult profile_from_costs(const SuiteResult& results,
                                 const std::vector<std::vector<double>>& cost, double tau_max,
                                 int tau_points) {
  if (results.runs.empty()) throw std::invalid_argument("perf_profile: empty results");
  if (tau_points < 2 || !(tau_max >= 1.0))
    throw std::invalid_argument("perf_profile: need tau_max >= 1 and >= 2 grid points");

  const std::size_t np = results.runs.size();
  const std::size_t ns = results.solver_ids.size();
  ProfileResult prof;
  prof.solver_ids = results.solver_ids;
  prof.ratios.assign(np, std::vector<double>(ns, 0.0));

  for (std::size_t p = 0; p < np; ++p) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < ns; ++s)
      if (cost[p][s] >= 0.0) best = std::min(best, cost[p][s]);
    if (!std::isfinite(best)) continue;  // unsolved by every solver: all ratios stay 0
    for (std::size_t s = 0; s < ns; ++s) {
      if (cost[p][s] < 0.0) continue;
      if (best == 0.0)
        prof.ratios[p][s] = cost[p][s] == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
      else
        prof.ratios[p][s] = cost[p][s] / best;
    }
  }

  prof.tau_grid.resize(tau_points);
  for (int i = 0; i < tau_points; ++i)
    prof.tau_grid[i] = 1.0 + (tau_max - 1.0) * static_cast<double>(i) / (tau_points - 1);

  prof.rho.assign(ns, std::vector<double>(tau_points, 0.0));
  for (std::size_t s = 0; s < ns; ++s)
    for (int i = 0; i < tau_points; ++i) {
      std::size_t count = 0;
      for (std::size_t p = 0; p < np; ++p) {
        const double r = prof.ratios[p][s];
        if (r > 0.0 && r <= prof.tau_grid[i]) ++count;
      }
      prof.rho[s][i] = static_cast<double>(count) / static_cast<double>(np);
    }
  return prof;
}

}  // namespace

ProfileResult perf_profile(const SuiteResult& results, double tau_max, int tau_points) {
  const std::size_t np = results.runs.size();
  const std::size_t ns = results.solver_ids.size();
  std::vector<std::vector<double>> cost(np, std::vector<double>(ns, -1.0));
  for (std::size_t p = 0; p < np; ++p)
    for (std::size_t s = 0; s < ns; ++s) {
      const long t = results.runs[p][s].t;
      if (t >= 0 && t < results.k_max) cost[p][s] = static_cast<double>(t);
    }
  return profile_from_costs(results, cost, tau_max, tau_points);
}

ProfileResult perf_profile_evals(const SuiteResult& results, double tau_max, int tau_points) {
  const std::size_t np = results.runs.size();
  const std::size_t ns = results.solver_ids.size();
  std::vector<std::vector<double>> cost(np, std::vector<double>(ns, -1.0));
  for (std::size_t p = 0; p < np; ++p)
    for (std::size_t s = 0; s < ns; ++s) {
      const auto& run = results.runs[p][s];
      if (run.t >= 0 && run.t < results.k_max)
        cost[p][s] = static_cast<double>(run.evals_algo);
    }
  return profile_from_costs(results, cost, tau_max, tau_points);
}

}  // namespace fastogda
