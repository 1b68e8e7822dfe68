#include "fastogda/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace fastogda {

std::string format_sig17(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  return in;
}

void write_block(std::ofstream& out, const std::string& name, const Matrix& M) {
  out << name << ' ' << M.rows() << ' ' << M.cols() << '\n';
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    for (Eigen::Index j = 0; j < M.cols(); ++j) {
      if (j) out << ' ';
      out << format_sig17(M(i, j));
    }
    out << '\n';
  }
}

Matrix read_block(std::ifstream& in, const std::string& expected) {
  std::string name;
  Eigen::Index rows = 0, cols = 0;
  if (!(in >> name >> rows >> cols) || name != expected)
    throw std::runtime_error("problem file: expected block '" + expected + "'");
  if (rows < 0 || cols < 0) throw std::runtime_error("problem file: negative block size");
  Matrix M(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j)
      if (!(in >> M(i, j))) throw std::runtime_error("problem file: truncated block " + name);
  return M;
}

void write_comments(std::ofstream& out, const HeaderKV& config) {
  for (const auto& [key, value] : config) out << "# " << key << " = " << value << '\n';
}

std::string csv_field(double x) { return std::isfinite(x) ? format_sig17(x) : std::string(); }

}  // namespace

void save_problem(const SaddleProblem& p, const std::string& path) {
  auto out = open_out(path);
  out << "saddle_problem " << p.n << ' ' << p.m << '\n';
  write_block(out, "H", p.H);
  write_block(out, "A", p.A);
  write_block(out, "b", p.b);
  write_block(out, "h", p.h);
}

SaddleProblem load_problem(const std::string& path) {
  auto in = open_in(path);
  std::string magic;
  SaddleProblem p;
  if (!(in >> magic >> p.n >> p.m) || magic != "saddle_problem")
    throw std::runtime_error("problem file: bad header in " + path);
  p.H = read_block(in, "H");
  p.A = read_block(in, "A");
  p.b = read_block(in, "b");
  p.h = read_block(in, "h");
  if (p.H.rows() != p.n || p.H.cols() != p.n || p.A.rows() != p.m || p.A.cols() != p.n ||
      p.b.size() != p.m || p.h.size() != p.n)
    throw std::runtime_error("problem file: inconsistent dimensions in " + path);
  return p;
}

void write_log_csv(const IterateLog& log, const std::string& path, const HeaderKV& config) {
  auto out = open_out(path);
  write_comments(out, config);
  out << "k,residual,velocity,gap,residual_bar\n";
  for (const auto& r : log.records)
    out << r.k << ',' << csv_field(r.residual) << ',' << csv_field(r.velocity) << ','
        << csv_field(r.gap) << ',' << csv_field(r.residual_bar) << '\n';
}

IterateLog read_log_csv(const std::string& path) {
  auto in = open_in(path);
  IterateLog log;
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      if (line.rfind("k,residual", 0) != 0)
        throw std::runtime_error("log csv: unexpected header in " + path);
      header_seen = true;
      continue;
    }
    std::stringstream ss(line);
    std::string field;
    IterateRecord rec;
    auto next = [&](double& slot) {
      if (!std::getline(ss, field, ',')) return;
      if (!field.empty()) slot = std::stod(field);
    };
    if (!std::getline(ss, field, ',')) continue;
    rec.k = std::stol(field);
    next(rec.residual);
    next(rec.velocity);
    next(rec.gap);
    next(rec.residual_bar);
    log.records.push_back(rec);
  }
  if (!header_seen) throw std::runtime_error("log csv: missing header in " + path);
  return log;
}

void write_trajectory_csv(const ContinuousTrajectory& traj, const std::string& path,
                          const HeaderKV& config) {
  auto out = open_out(path);
  write_comments(out, config);
  out << "t,residual,velocity,energy,w\n";
  for (const auto& s : traj.samples)
    out << format_sig17(s.t) << ',' << csv_field(s.residual) << ',' << csv_field(s.velocity)
        << ',' << csv_field(s.energy) << ',' << csv_field(s.w) << '\n';
}

void write_tmatrix_csv(const SuiteResult& results, const std::string& path,
                       const HeaderKV& config) {
  auto out = open_out(path);
  write_comments(out, config);
  out << "problem";
  for (const auto& s : results.solver_ids) out << ',' << s;
  out << '\n';
  for (std::size_t p = 0; p < results.runs.size(); ++p) {
    out << results.problem_ids[p];
    for (const auto& run : results.runs[p]) {
      out << ',';
      if (run.t >= 0 && run.t < results.k_max) out << run.t;
    }
    out << '\n';
  }
}

void write_rmatrix_csv(const SuiteResult& results, const ProfileResult& prof,
                       const std::string& path, const HeaderKV& config) {
  auto out = open_out(path);
  write_comments(out, config);
  out << "problem";
  for (const auto& s : prof.solver_ids) out << ',' << s;
  out << '\n';
  for (std::size_t p = 0; p < prof.ratios.size(); ++p) {
    out << results.problem_ids[p];
    for (double r : prof.ratios[p]) out << ',' << format_sig17(r);
    out << '\n';
  }
}

void write_profile_csv(const ProfileResult& prof, std::size_t solver_index,
                       const std::string& path, const HeaderKV& config) {
  if (solver_index >= prof.solver_ids.size())
    throw std::invalid_argument("write_profile_csv: solver index out of range");
  auto out = open_out(path);
  write_comments(out, config);
  out << "tau,rho\n";
  for (std::size_t i = 0; i < prof.tau_grid.size(); ++i)
    out << format_sig17(prof.tau_grid[i]) << ',' << format_sig17(prof.rho[solver_index][i])
        << '\n';
}

std::map<std::string, std::string> read_config_kv(const std::string& path) {
  auto in = open_in(path);
  std::map<std::string, std::string> kv;
  std::string line;
  auto trim = [](std::string s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return std::string();
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
  };
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!key.empty()) kv[key] = value;
  }
  return kv;
}

}  // namespace fastogda
