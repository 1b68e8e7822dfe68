// Monotone operators, saddle-point test problems and solution-quality metrics.
#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

namespace fastogda {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Affine representation V(z) = M z + q.
struct AffineForm {
  Matrix M;
  Vector q;
};

/// A monotone operator V : R^dim -> R^dim with an optional Lipschitz bound
/// and optional affine structure. Instances are immutable after construction
/// and safe to share across threads (evaluation is a pure function).
class OperatorSpec {
 public:
  using EvalFn = std::function<Vector(const Vector&)>;

  OperatorSpec(Eigen::Index dim, EvalFn evaluate,
               std::optional<double> lipschitz_bound = std::nullopt,
               std::optional<AffineForm> affine = std::nullopt);

  /// Builds the operator V(z) = M z + q; evaluation goes through the matrix.
  static OperatorSpec from_affine(Matrix M, Vector q,
                                  std::optional<double> lipschitz_bound = std::nullopt);

  Eigen::Index dim() const { return dim_; }
  Vector operator()(const Vector& z) const;

  const std::optional<double>& lipschitz_bound() const { return lipschitz_; }
  const std::optional<AffineForm>& affine_form() const { return affine_; }

  /// Returns a copy with the Lipschitz bound replaced (e.g. the paper-pinned L=1).
  OperatorSpec with_lipschitz(double L) const;

 private:
  Eigen::Index dim_;
  EvalFn evaluate_;
  std::optional<double> lipschitz_;
  std::optional<AffineForm> affine_;
};

/// Minimax instance min_x max_y 1/2<x,Hx> - <x,h> - <y,Ax-b>.
struct SaddleProblem {
  Eigen::Index n = 0;  // x-dimension
  Eigen::Index m = 0;  // y-dimension
  Matrix H;            // n x n, symmetric PSD
  Matrix A;            // m x n
  Vector b;            // m
  Vector h;            // n
};

enum class RefMethod { direct_linear, long_run };

/// A reference zero of V together with the residual it was certified at.
struct SolutionRef {
  Vector z_star;
  double residual = 0.0;
  RefMethod method = RefMethod::direct_linear;
};

/// Raised when no reference solution could be certified; carries the best residual seen.
struct NoReferenceError : std::runtime_error {
  NoReferenceError(const std::string& what, double best)
      : std::runtime_error(what), best_residual(best) {}
  double best_residual;
};

/// The monotone map (x,y) -> (Hx - h - A^T y, Ax - b) induced by a saddle problem,
/// with affine structure M = [[H, -A^T], [A, 0]], q = (-h, -b).
/// When no Lipschitz bound is supplied, a power-iteration estimate of ||M|| is used.
OperatorSpec saddle_operator(const SaddleProblem& p,
                             std::optional<double> lipschitz_bound = std::nullopt);

/// Square structured instance: A is 1/4 times the anti-banded matrix with rows
/// (0,...,0,-1,1), ..., (-1,1,0,...,0), (1,0,...,0); H = 2 A^T A, b = (1/4)1,
/// h = (1/4)e_n. Satisfies ||A|| <= 1/2.
SaddleProblem build_ouyang_xu_structured(Eigen::Index n);

/// Random sparse instance, deterministic in the seed: entries of A, b, h are kept
/// with probability `density` and drawn i.i.d. standard normal; H := 2 A^T A.
SaddleProblem build_random_sparse(Eigen::Index n, Eigen::Index m, double density,
                                  std::uint64_t seed);

/// Computes a reference zero: a rank-revealing linear solve for affine operators,
/// otherwise a long extragradient run down to residual <= tol.
SolutionRef reference_solution(const OperatorSpec& op, double tol,
                               long max_fallback_iters = 500000);

/// Upper bound on the restricted gap at z: <z - z*, V(z)> + delta0 ||V(z)||,
/// where delta0 = ||z0 - z*|| for the run's starting point.
double gap_surrogate(const Vector& z, const SolutionRef& ref, double delta0,
                     const Vector& vz);

/// Largest singular value of M estimated by power iteration on M^T M
/// (deterministic start vector).
double operator_norm_estimate(const Matrix& M, int max_iters = 1000, double tol = 1e-13);

}  // namespace fastogda
