// Command-line front end: generate problems, run solvers and the continuous
// dynamics, produce performance profiles and diagnostic reports.
#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <random>
#include <sstream>

#include "fastogda/bench.hpp"
#include "fastogda/continuous.hpp"
#include "fastogda/diagnostics.hpp"
#include "fastogda/io.hpp"
#include "fastogda/operator.hpp"
#include "fastogda/solvers.hpp"

namespace {

using namespace fastogda;

constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;

struct ProblemArgs {
  std::string kind = "ouyang-xu";  // ouyang-xu | random-sparse
  std::string file;                // overrides kind when set
  long n = 100;
  long m = 0;  // 0: square
  double density = 0.05;
  std::uint64_t seed = 1;
};

void add_problem_flags(CLI::App* cmd, ProblemArgs& args) {
  cmd->add_option("--problem", args.kind, "ouyang-xu or random-sparse")
      ->check(CLI::IsMember({"ouyang-xu", "random-sparse"}));
  cmd->add_option("--problem-file", args.file, "load a saved problem file instead");
  cmd->add_option("--n", args.n, "x-dimension");
  cmd->add_option("--m", args.m, "y-dimension (random-sparse; default n)");
  cmd->add_option("--density", args.density, "nonzero density (random-sparse)");
  cmd->add_option("--seed", args.seed, "generator seed (random-sparse)");
}

SaddleProblem make_problem(const ProblemArgs& args) {
  if (!args.file.empty()) return load_problem(args.file);
  if (args.kind == "ouyang-xu") return build_ouyang_xu_structured(args.n);
  const long m = args.m > 0 ? args.m : args.n;
  return build_random_sparse(args.n, m, args.density, args.seed);
}

Vector make_start(const std::string& mode, Eigen::Index dim, std::uint64_t seed) {
  if (mode == "zero") return Vector::Zero(dim);
  if (mode == "ones") return Vector::Constant(dim, 1.0);
  if (mode == "randn") {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    Vector z(dim);
    for (Eigen::Index j = 0; j < dim; ++j) z(j) = normal(rng);
    return z;
  }
  throw CLI::ValidationError("--z0", "expected zero, ones or randn");
}

double parse_double(const std::map<std::string, std::string>& kv, const std::string& key,
                    double fallback) {
  auto it = kv.find(key);
  return it == kv.end() ? fallback : std::stod(it->second);
}

long parse_long(const std::map<std::string, std::string>& kv, const std::string& key,
                long fallback) {
  auto it = kv.find(key);
  return it == kv.end() ? fallback : std::stol(it->second);
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> items;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto a = item.find_first_not_of(" \t");
    const auto b = item.find_last_not_of(" \t");
    if (a != std::string::npos) items.push_back(item.substr(a, b - a + 1));
  }
  return items;
}

int cmd_generate(const ProblemArgs& args, const std::string& out) {
  SaddleProblem p = make_problem(args);
  save_problem(p, out);
  std::printf("wrote %s (n=%ld m=%ld)\n", out.c_str(), static_cast<long>(p.n),
              static_cast<long>(p.m));
  return 0;
}

struct SolveArgs {
  ProblemArgs problem;
  std::string solver = "fast-ogda-explicit";
  double alpha = 3.0;
  double s = 0.0;   // 0: reference default for the solver
  double s0 = 0.0;  // 0: 0.5/L
  long k_max = 100000;
  double tol_op = 1e-6;
  double tol_vec = 1e-5;
  std::string z0_mode = "zero";
  std::uint64_t z0_seed = 1;
  double lipschitz = 0.0;  // 0: 1 for ouyang-xu, estimate otherwise
  std::string beta_kind = "constant";
  double beta0 = 1.0;
  double rho = 0.0;
  std::string out = "run.csv";
};

IterateLog solve_once(const SolveArgs& a, HeaderKV& header, OperatorSpec* op_out = nullptr,
                      SolverConfig* cfg_out = nullptr) {
  SaddleProblem p = make_problem(a.problem);
  std::optional<double> L;
  if (a.lipschitz > 0.0)
    L = a.lipschitz;
  else if (a.problem.file.empty() && a.problem.kind == "ouyang-xu")
    L = 1.0;
  OperatorSpec op = saddle_operator(p, L);

  SolverEntry entry;
  entry.id = a.solver;
  entry.alpha = a.alpha;
  entry.s_factor = a.s > 0.0 ? a.s * op.lipschitz_bound().value_or(1.0) : 0.0;
  entry.s0_factor = a.s0 > 0.0 ? a.s0 * op.lipschitz_bound().value_or(1.0) : 0.5;
  entry.beta.kind = a.beta_kind == "polynomial" ? BetaKind::polynomial : BetaKind::constant;
  entry.beta.beta0 = a.beta0;
  entry.beta.rho = a.rho;

  SolverConfig cfg;
  cfg.z0 = make_start(a.z0_mode, op.dim(), a.z0_seed);
  cfg.stop.k_max = a.k_max;
  cfg.stop.tol_op = a.tol_op;
  cfg.stop.tol_vec = a.tol_vec;

  header = {{"solver", a.solver},
            {"alpha", format_sig17(a.alpha)},
            {"k_max", std::to_string(a.k_max)},
            {"tol_op", format_sig17(a.tol_op)},
            {"tol_vec", format_sig17(a.tol_vec)},
            {"z0", a.z0_mode},
            {"lipschitz", format_sig17(op.lipschitz_bound().value_or(0.0))}};
  if (a.solver == "fast-ogda-implicit") {
    header.emplace_back("beta_kind", a.beta_kind);
    header.emplace_back("beta0", format_sig17(a.beta0));
    header.emplace_back("rho", format_sig17(a.rho));
  }
  if (op_out) *op_out = op;
  if (cfg_out) *cfg_out = cfg;
  IterateLog log = run_solver_entry(entry, op, cfg);
  const double L_used = op.lipschitz_bound().value_or(1.0);
  const double sf = entry.s_factor > 0.0 ? entry.s_factor : 0.0;
  header.emplace_back("s", format_sig17(sf > 0.0 ? sf / L_used : 0.0));
  return log;
}

int cmd_solve(const SolveArgs& a) {
  HeaderKV header;
  IterateLog log = solve_once(a, header);
  for (const auto& w : log.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
  write_log_csv(log, a.out, header);
  std::printf("%s: %s after %ld records", a.solver.c_str(),
              log.status == RunStatus::stopped
                  ? "stopped"
                  : (log.status == RunStatus::diverged ? "diverged" : "reached k_max"),
              static_cast<long>(log.records.size()));
  if (log.stopped_at) std::printf(" (stopped_at=%ld)", *log.stopped_at);
  if (log.diverged_at) std::printf(" (diverged_at=%ld)", *log.diverged_at);
  std::printf("; final residual %s; wrote %s\n",
              format_sig17(log.records.back().residual).c_str(), a.out.c_str());
  return 0;
}

struct IntegrateArgs {
  ProblemArgs problem;
  double alpha = 3.0;
  std::string beta_kind = "constant";
  double beta0 = 1.0;
  double rho = 0.0;
  double t0 = 1.0;
  double t_end = 100.0;
  double dt = 1e-3;
  std::string z0_mode = "zero";
  std::uint64_t z0_seed = 1;
  std::string out = "trajectory.csv";
};

int cmd_integrate(const IntegrateArgs& a) {
  SaddleProblem p = make_problem(a.problem);
  OperatorSpec op = saddle_operator(p);
  BetaFunction beta{a.beta_kind == "polynomial" ? BetaKind::polynomial : BetaKind::constant,
                    a.beta0, a.rho};
  Vector z0 = make_start(a.z0_mode, op.dim(), a.z0_seed);
  ContinuousTrajectory traj =
      integrate(op, z0, Vector::Zero(op.dim()), a.t0, a.t_end, a.dt, a.alpha, beta);
  HeaderKV header = {{"alpha", format_sig17(a.alpha)}, {"beta_kind", a.beta_kind},
                     {"beta0", format_sig17(a.beta0)}, {"rho", format_sig17(a.rho)},
                     {"t0", format_sig17(a.t0)},       {"t_end", format_sig17(a.t_end)},
                     {"dt", format_sig17(a.dt)},       {"z0", a.z0_mode}};
  write_trajectory_csv(traj, a.out, header);
  std::printf("integrated %zu samples; final residual %s; wrote %s\n", traj.samples.size(),
              format_sig17(traj.samples.back().residual).c_str(), a.out.c_str());
  return 0;
}

struct ProfileArgs {
  std::string config;
  std::string out_dir = ".";
  long seed = -1;  // overrides the config seed when >= 0
};

int cmd_profile(const ProfileArgs& a) {
  auto kv = read_config_kv(a.config);
  const std::uint64_t seed =
      a.seed >= 0 ? static_cast<std::uint64_t>(a.seed) : parse_long(kv, "seed", 7);
  const double density = parse_double(kv, "density", 0.05);
  const long matrices = parse_long(kv, "matrices_per_pair", 10);
  const long starts = parse_long(kv, "starts_per_pair", 3);

  SuiteSpec suite;
  suite.stop.tol_op = parse_double(kv, "tol_op", 1e-6);
  suite.stop.tol_vec = parse_double(kv, "tol_vec", 1e-5);
  suite.stop.k_max = parse_long(kv, "k_max", 100000);
  suite.threads = static_cast<int>(parse_long(kv, "threads", 0));
  suite.log_thin = parse_long(kv, "log_thin", 0);

  std::vector<std::pair<long, long>> pairs;
  for (const auto& item : split_list(kv.count("pairs") ? kv.at("pairs") : "30x20,45x30,60x40")) {
    const auto x = item.find('x');
    if (x == std::string::npos)
      throw CLI::ValidationError("pairs", "expected entries like 30x20");
    pairs.emplace_back(std::stol(item.substr(0, x)), std::stol(item.substr(x + 1)));
  }

  for (std::size_t pi = 0; pi < pairs.size(); ++pi) {
    const auto [n, m] = pairs[pi];
    for (long mat = 0; mat < matrices; ++mat) {
      SaddleProblem prob =
          build_random_sparse(n, m, density, seed * 1000003 + pi * 1009 + mat);
      for (long start = 0; start < starts; ++start) {
        SuiteProblem sp;
        sp.id = "n" + std::to_string(n) + "m" + std::to_string(m) + "-mat" +
                std::to_string(mat) + "-start" + std::to_string(start);
        sp.problem = prob;
        // initial points are shared per (pair, start), as in the protocol
        sp.z0 = make_start("randn", n + m, seed * 2000003 + pi * 1013 + start);
        suite.problems.push_back(std::move(sp));
      }
    }
  }

  const std::string solver_list =
      kv.count("solvers") ? kv.at("solvers")
                          : "ogda,eg,eag-v,nesterov-eag,halpern-ogda,fast-ogda-explicit";
  const double alpha = parse_double(kv, "alpha", 3.0);
  for (const auto& id : split_list(solver_list)) {
    SolverEntry entry;
    entry.id = id;
    entry.alpha = alpha;
    entry.s0_factor = parse_double(kv, "s0_factor", 0.5);
    suite.solvers.push_back(std::move(entry));
  }

  SuiteResult results = run_suite(suite);
  const double tau_max = parse_double(kv, "tau_max", 10.0);
  const int tau_points = static_cast<int>(parse_long(kv, "tau_points", 200));
  ProfileResult prof = perf_profile(results, tau_max, tau_points);
  ProfileResult prof_evals = perf_profile_evals(results, tau_max, tau_points);

  HeaderKV header = {{"config", a.config},
                     {"seed", std::to_string(seed)},
                     {"density", format_sig17(density)},
                     {"matrices_per_pair", std::to_string(matrices)},
                     {"starts_per_pair", std::to_string(starts)},
                     {"tol_op", format_sig17(suite.stop.tol_op)},
                     {"tol_vec", format_sig17(suite.stop.tol_vec)},
                     {"k_max", std::to_string(suite.stop.k_max)},
                     {"solvers", solver_list},
                     {"alpha", format_sig17(alpha)}};

  namespace fs = std::filesystem;
  fs::create_directories(a.out_dir);
  const auto path = [&](const std::string& name) { return (fs::path(a.out_dir) / name).string(); };
  write_tmatrix_csv(results, path("tmatrix.csv"), header);
  write_rmatrix_csv(results, prof, path("rmatrix.csv"), header);
  for (std::size_t s = 0; s < prof.solver_ids.size(); ++s) {
    write_profile_csv(prof, s, path("profile_" + prof.solver_ids[s] + ".csv"), header);
    write_profile_csv(prof_evals, s, path("profile_evals_" + prof.solver_ids[s] + ".csv"),
                      header);
  }
  std::printf("suite: %zu problems x %zu solvers, k_max=%ld\n", suite.problems.size(),
              suite.solvers.size(), suite.stop.k_max);
  for (std::size_t s = 0; s < prof.solver_ids.size(); ++s)
    std::printf("  rho(1) %-18s %.4f\n", prof.solver_ids[s].c_str(), prof.rho[s].front());
  std::printf("wrote tmatrix.csv, rmatrix.csv and per-solver profile CSVs to %s\n",
              a.out_dir.c_str());
  return 0;
}

struct DiagnoseArgs {
  std::string log_file;
  std::string metric = "residual";
  double window = 0.5;
  // energy mode (re-runs a solver with history)
  bool energies = false;
  SolveArgs solve;
  double lambda = -1.0;  // <0: midpoint of the implicit window / 1.0 for explicit
  double gamma = 1.6;
  std::string out = "diagnostics.csv";
};

int cmd_diagnose(const DiagnoseArgs& a) {
  if (!a.energies) {
    IterateLog log = read_log_csv(a.log_file);
    RateMetric metric = a.metric == "velocity"
                            ? RateMetric::velocity
                            : (a.metric == "gap" ? RateMetric::gap : RateMetric::residual);
    RateFit fit = rate_slope(log, metric, a.window);
    std::printf("metric=%s window=[%ld,%ld] slope=%.6f r2=%.6f\n", a.metric.c_str(), fit.k_lo,
                fit.k_hi, fit.slope, fit.r_squared);
    return 0;
  }

  SolveArgs run = a.solve;
  HeaderKV header;
  OperatorSpec op = OperatorSpec(1, [](const Vector& z) { return z; });
  SolverConfig cfg;
  {
    // re-run with full history for the energy evaluations
    SolveArgs with_history = run;
    SaddleProblem p = make_problem(with_history.problem);
    std::optional<double> L;
    if (with_history.lipschitz > 0.0)
      L = with_history.lipschitz;
    else if (with_history.problem.file.empty() && with_history.problem.kind == "ouyang-xu")
      L = 1.0;
    op = saddle_operator(p, L);
    SolverEntry entry;
    entry.id = with_history.solver;
    entry.alpha = with_history.alpha;
    entry.s_factor =
        with_history.s > 0.0 ? with_history.s * op.lipschitz_bound().value_or(1.0) : 0.0;
    entry.s0_factor = 0.5;
    entry.beta.kind = with_history.beta_kind == "polynomial" ? BetaKind::polynomial
                                                             : BetaKind::constant;
    entry.beta.beta0 = with_history.beta0;
    entry.beta.rho = with_history.rho;

    cfg.z0 = make_start(with_history.z0_mode, op.dim(), with_history.z0_seed);
    cfg.stop.k_max = with_history.k_max;
    cfg.stop.tol_op = with_history.tol_op;
    cfg.stop.tol_vec = with_history.tol_vec;
    cfg.keep_history = true;

    IterateLog log = run_solver_entry(entry, op, cfg);
    SolutionRef ref = reference_solution(op, 1e-9);

    const bool implicit = with_history.solver == "fast-ogda-implicit";
    EnergyConfig ecfg;
    ecfg.alpha = with_history.alpha;
    ecfg.gamma = a.gamma;
    ecfg.lipschitz = op.lipschitz_bound();
    const double L_used = op.lipschitz_bound().value_or(1.0);
    ecfg.s = entry.s_factor > 0.0 ? entry.s_factor / L_used
                                  : (implicit ? 1.0 : 0.48 / L_used);
    if (a.lambda >= 0.0) {
      ecfg.lambda = a.lambda;
    } else if (implicit) {
      const GrowthCheck growth = check_growth_discrete(ecfg.alpha, entry.beta);
      ecfg.lambda = ecfg.alpha - 1.0 - growth.margin / 8.0;
    } else {
      ecfg.lambda = 1.0;
    }

    std::ofstream outf(a.out);
    if (!outf) throw std::runtime_error("cannot open " + a.out);
    for (const auto& [key, value] : header) outf << "# " << key << " = " << value << "\n";
    outf << "# lambda = " << format_sig17(ecfg.lambda) << "\n";
    outf << "# gamma = " << format_sig17(ecfg.gamma) << "\n";
    outf << "k,E_lambda,F_lambda,k_residual_product\n";
    std::vector<double> e_series;
    const long kmax = static_cast<long>(log.iterates.size()) - 1;
    for (long k = 1; k <= kmax; ++k) {
      double E = std::numeric_limits<double>::quiet_NaN();
      double F = std::numeric_limits<double>::quiet_NaN();
      if (implicit) {
        E = energy_implicit(k, log.iterates[k], log.iterates[k - 1], log.v_iterates[k],
                            ref.z_star, ecfg, entry.beta);
      } else if (log.v_bars[k].size() > 0) {
        E = energy_explicit(k, log.iterates[k], log.iterates[k - 1], log.v_bars[k], ref.z_star,
                            ecfg);
        if (k >= 2 && log.v_bars[k - 1].size() > 0)
          F = energy_regularized(k, log, ref.z_star, ecfg);
      }
      if (std::isfinite(E)) e_series.push_back(E);
      outf << k << ',' << (std::isfinite(E) ? format_sig17(E) : "") << ','
           << (std::isfinite(F) ? format_sig17(F) : "") << ','
           << format_sig17(static_cast<double>(k) * log.records[k].residual) << '\n';
    }
    auto tail = tail_monotone_index(e_series, 1e-10 * (1.0 + (e_series.empty() ? 0.0 : e_series.front())));
    std::printf("energies written to %s\n", a.out.c_str());
    std::printf("lambda=%s gamma=%s reference_residual=%s\n", format_sig17(ecfg.lambda).c_str(),
                format_sig17(ecfg.gamma).c_str(), format_sig17(ref.residual).c_str());
    if (tail)
      std::printf("tail_monotone_index(E)=%zu of %zu\n", *tail, e_series.size());
    else
      std::printf("tail_monotone_index(E)=none\n");
    try {
      RateFit fit = rate_slope(log, RateMetric::residual, a.window);
      std::printf("residual slope=%.6f over [%ld,%ld] r2=%.4f\n", fit.slope, fit.k_lo, fit.k_hi,
                  fit.r_squared);
    } catch (const InsufficientDataError& e) {
      std::printf("residual slope: %s\n", e.what());
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"solvers and benchmarks for monotone equations V(z) = 0"};
  app.require_subcommand(1);

  ProblemArgs gen_args;
  std::string gen_out = "problem.txt";
  auto* gen = app.add_subcommand("generate", "write a problem file");
  add_problem_flags(gen, gen_args);
  gen->add_option("--out", gen_out, "output path");

  SolveArgs solve_args;
  auto* solve = app.add_subcommand("solve", "run one solver on one problem");
  add_problem_flags(solve, solve_args.problem);
  solve->add_option("--solver", solve_args.solver, "solver id")
      ->check(CLI::IsMember({"eg", "ogda", "eag", "eag-v", "nesterov-eag", "halpern-ogda",
                             "fast-ogda-explicit", "fast-ogda-implicit"}));
  solve->add_option("--alpha", solve_args.alpha, "momentum parameter");
  solve->add_option("--s", solve_args.s, "step size (default: reference per solver)");
  solve->add_option("--s0", solve_args.s0, "initial anchored step (default 0.5/L)");
  solve->add_option("--kmax", solve_args.k_max, "iteration cap");
  solve->add_option("--tol-op", solve_args.tol_op, "relative residual tolerance");
  solve->add_option("--tol-vec", solve_args.tol_vec, "relative velocity tolerance");
  solve->add_option("--z0", solve_args.z0_mode, "zero | ones | randn");
  solve->add_option("--z0-seed", solve_args.z0_seed, "seed for randn starts");
  solve->add_option("--lipschitz", solve_args.lipschitz, "Lipschitz bound override");
  solve->add_option("--beta-kind", solve_args.beta_kind, "constant | polynomial (implicit)");
  solve->add_option("--beta0", solve_args.beta0, "beta scale (implicit)");
  solve->add_option("--rho", solve_args.rho, "beta exponent (implicit)");
  solve->add_option("--out", solve_args.out, "log CSV path");

  IntegrateArgs int_args;
  auto* integ = app.add_subcommand("integrate", "integrate the continuous dynamics");
  add_problem_flags(integ, int_args.problem);
  integ->add_option("--alpha", int_args.alpha, "damping parameter");
  integ->add_option("--beta-kind", int_args.beta_kind, "constant | polynomial");
  integ->add_option("--beta0", int_args.beta0, "beta scale");
  integ->add_option("--rho", int_args.rho, "beta exponent");
  integ->add_option("--t0", int_args.t0, "start time (> 0)");
  integ->add_option("--t-end", int_args.t_end, "end time");
  integ->add_option("--dt", int_args.dt, "step size");
  integ->add_option("--z0", int_args.z0_mode, "zero | ones | randn");
  integ->add_option("--z0-seed", int_args.z0_seed, "seed for randn starts");
  integ->add_option("--out", int_args.out, "trajectory CSV path");

  ProfileArgs prof_args;
  auto* prof = app.add_subcommand("profile", "run a suite and write performance profiles");
  prof->add_option("--config", prof_args.config, "flat key = value config file")->required();
  prof->add_option("--out-dir", prof_args.out_dir, "output directory");
  prof->add_option("--seed", prof_args.seed, "seed override");

  DiagnoseArgs diag_args;
  auto* diag = app.add_subcommand("diagnose", "rate fits and energy reports");
  diag->add_option("--log", diag_args.log_file, "run CSV to fit");
  diag->add_option("--metric", diag_args.metric, "residual | velocity | gap")
      ->check(CLI::IsMember({"residual", "velocity", "gap"}));
  diag->add_option("--window", diag_args.window, "fit window fraction");
  diag->add_flag("--energies", diag_args.energies, "re-run a solver and report energies");
  add_problem_flags(diag, diag_args.solve.problem);
  diag->add_option("--solver", diag_args.solve.solver, "solver id (energy mode)");
  diag->add_option("--alpha", diag_args.solve.alpha, "momentum parameter (energy mode)");
  diag->add_option("--s", diag_args.solve.s, "step size (energy mode)");
  diag->add_option("--kmax", diag_args.solve.k_max, "iteration cap (energy mode)");
  diag->add_option("--z0", diag_args.solve.z0_mode, "zero | ones | randn (energy mode)");
  diag->add_option("--beta-kind", diag_args.solve.beta_kind, "constant | polynomial");
  diag->add_option("--beta0", diag_args.solve.beta0, "beta scale");
  diag->add_option("--rho", diag_args.solve.rho, "beta exponent");
  diag->add_option("--lambda", diag_args.lambda, "energy lambda (default: window midpoint)");
  diag->add_option("--gamma", diag_args.gamma, "explicit energy gamma");
  diag->add_option("--out", diag_args.out, "diagnostic CSV path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (gen->parsed()) return cmd_generate(gen_args, gen_out);
    if (solve->parsed()) return cmd_solve(solve_args);
    if (integ->parsed()) return cmd_integrate(int_args);
    if (prof->parsed()) return cmd_profile(prof_args);
    if (diag->parsed()) {
      if (!diag_args.energies && diag_args.log_file.empty()) {
        std::fprintf(stderr, "diagnose: need --log or --energies\n");
        return kExitUsage;
      }
      return cmd_diagnose(diag_args);
    }
  } catch (const CLI::ValidationError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  } catch (const std::ios_base::failure& e) {
    std::fprintf(stderr, "io error: %s\n", e.what());
    return kExitIo;
  } catch (const std::runtime_error& e) {
    // file-system level failures surface here (open/read/write)
    const std::string what = e.what();
    const bool io = what.find("cannot open") != std::string::npos ||
                    what.find("file") != std::string::npos;
    std::fprintf(stderr, "error: %s\n", what.c_str());
    return io ? kExitIo : 1;
  }
  return kExitUsage;
}
