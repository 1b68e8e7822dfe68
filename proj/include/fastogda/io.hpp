// Plain-text serialization: problem files, run/trajectory/profile CSVs and the
// flat key=value config format. All floating-point output uses 17 significant
// digits so files round-trip exactly and diff across platforms.
#pragma once

#include "fastogda/bench.hpp"
#include "fastogda/continuous.hpp"
#include "fastogda/operator.hpp"
#include "fastogda/solvers.hpp"

#include <map>
#include <string>
#include <vector>

namespace fastogda {

/// A double rendered with 17 significant digits.
std::string format_sig17(double x);

/// Problem files: named blocks, each a `name rows cols` header followed by
/// row-major entries.
void save_problem(const SaddleProblem& p, const std::string& path);
SaddleProblem load_problem(const std::string& path);

using HeaderKV = std::vector<std::pair<std::string, std::string>>;

/// Run log CSV with header `k,residual,velocity,gap,residual_bar`; empty fields
/// where a column does not apply. The resolved configuration is stamped into
/// leading `# key = value` lines.
void write_log_csv(const IterateLog& log, const std::string& path,
                   const HeaderKV& config = {});

/// Reads a CSV produced by write_log_csv back into scalar records.
IterateLog read_log_csv(const std::string& path);

/// Trajectory CSV with header `t,residual,velocity,energy,w`.
void write_trajectory_csv(const ContinuousTrajectory& traj, const std::string& path,
                          const HeaderKV& config = {});

/// Iteration-count matrix: rows problems, columns solvers; empty cell = unsolved.
void write_tmatrix_csv(const SuiteResult& results, const std::string& path,
                       const HeaderKV& config = {});

/// Ratio matrix r_{p,s} in the same layout.
void write_rmatrix_csv(const SuiteResult& results, const ProfileResult& prof,
                       const std::string& path, const HeaderKV& config = {});

/// One `tau,rho` curve per solver.
void write_profile_csv(const ProfileResult& prof, std::size_t solver_index,
                       const std::string& path, const HeaderKV& config = {});

/// Flat `key = value` configuration text; '#' starts a comment.
std::map<std::string, std::string> read_config_kv(const std::string& path);

}  // namespace fastogda
