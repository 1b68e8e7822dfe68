#include "fastogda/operator.hpp"

#include <cmath>
#include <random>

namespace fastogda {

OperatorSpec::OperatorSpec(Eigen::Index dim, EvalFn evaluate,
                           std::optional<double> lipschitz_bound,
                           std::optional<AffineForm> affine)
    : dim_(dim),
      evaluate_(std::move(evaluate)),
      lipschitz_(lipschitz_bound),
      affine_(std::move(affine)) {
  if (dim_ <= 0) throw std::invalid_argument("OperatorSpec: dim must be positive");
  if (!evaluate_) throw std::invalid_argument("OperatorSpec: missing evaluation function");
  if (lipschitz_ && *lipschitz_ < 0.0)
    throw std::invalid_argument("OperatorSpec: Lipschitz bound must be nonnegative");
  if (affine_) {
    if (affine_->M.rows() != dim_ || affine_->M.cols() != dim_ || affine_->q.size() != dim_)
      throw std::invalid_argument("OperatorSpec: affine form dimensions do not match dim");
  }
}

OperatorSpec OperatorSpec::from_affine(Matrix M, Vector q,
                                       std::optional<double> lipschitz_bound) {
  if (M.rows() != M.cols() || M.rows() != q.size())
    throw std::invalid_argument("OperatorSpec::from_affine: M must be square and match q");
  const Eigen::Index dim = M.rows();
  AffineForm form{std::move(M), std::move(q)};
  // The lambda keeps its own copy so the OperatorSpec stays a self-contained value.
  auto eval = [form](const Vector& z) -> Vector { return form.M * z + form.q; };
  return OperatorSpec(dim, std::move(eval), lipschitz_bound, std::move(form));
}

Vector OperatorSpec::operator()(const Vector& z) const {
  if (z.size() != dim_) throw std::invalid_argument("OperatorSpec: point has wrong dimension");
  return evaluate_(z);
}

OperatorSpec OperatorSpec::with_lipschitz(double L) const {
  OperatorSpec copy = *this;
  if (L < 0.0) throw std::invalid_argument("OperatorSpec: Lipschitz bound must be nonnegative");
  copy.lipschitz_ = L;
  return copy;
}

OperatorSpec saddle_operator(const SaddleProblem& p, std::optional<double> lipschitz_bound) {
  const Eigen::Index n = p.n, m = p.m;
  if (n <= 0 || m <= 0) throw std::invalid_argument("saddle_operator: empty problem");
  if (p.H.rows() != n || p.H.cols() != n || p.A.rows() != m || p.A.cols() != n ||
      p.b.size() != m || p.h.size() != n)
    throw std::invalid_argument("saddle_operator: dimension mismatch among H, A, b, h");

  Matrix M = Matrix::Zero(n + m, n + m);
  M.topLeftCorner(n, n) = p.H;
  M.topRightCorner(n, m) = -p.A.transpose();
  M.bottomLeftCorner(m, n) = p.A;
  Vector q(n + m);
  q.head(n) = -p.h;
  q.tail(m) = -p.b;

  if (!lipschitz_bound) lipschitz_bound = operator_norm_estimate(M);
  return OperatorSpec::from_affine(std::move(M), std::move(q), lipschitz_bound);
}

SaddleProblem build_ouyang_xu_structured(Eigen::Index n) {
  if (n < 1) throw std::invalid_argument("build_ouyang_xu_structured: n must be >= 1");
  SaddleProblem p;
  p.n = n;
  p.m = n;
  p.A = Matrix::Zero(n, n);
  for (Eigen::Index i = 1; i <= n - 1; ++i) {
    p.A(i - 1, n - i - 1) = -0.25;
    p.A(i - 1, n - i) = 0.25;
  }
  p.A(n - 1, 0) = 0.25;
  p.H = 2.0 * p.A.transpose() * p.A;
  p.b = Vector::Constant(n, 0.25);
  p.h = Vector::Zero(n);
  p.h(n - 1) = 0.25;
  return p;
}

SaddleProblem build_random_sparse(Eigen::Index n, Eigen::Index m, double density,
                                  std::uint64_t seed) {
  if (m < 1 || m > n) throw std::invalid_argument("build_random_sparse: need 1 <= m <= n");
  if (!(density > 0.0) || density > 1.0)
    throw std::invalid_argument("build_random_sparse: density must lie in (0, 1]");

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  auto draw = [&]() { return unif(rng) < density ? normal(rng) : 0.0; };

  SaddleProblem p;
  p.n = n;
  p.m = m;
  p.A = Matrix::Zero(m, n);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < n; ++j) p.A(i, j) = draw();
  p.b = Vector::Zero(m);
  for (Eigen::Index i = 0; i < m; ++i) p.b(i) = draw();
  p.h = Vector::Zero(n);
  for (Eigen::Index j = 0; j < n; ++j) p.h(j) = draw();
  p.H = 2.0 * p.A.transpose() * p.A;
  return p;
}

SolutionRef reference_solution(const OperatorSpec& op, double tol, long max_fallback_iters) {
  if (!(tol > 0.0)) throw std::invalid_argument("reference_solution: tol must be positive");

  if (op.affine_form()) {
    const auto& [M, q] = *op.affine_form();
    // Rank-revealing solve handles singular-but-consistent systems (min-norm solution).
    Eigen::CompleteOrthogonalDecomposition<Matrix> cod(M);
    Vector z = cod.solve(-q);
    const double residual = (M * z + q).norm();
    if (residual <= tol) return SolutionRef{std::move(z), residual, RefMethod::direct_linear};
    // Inconsistent affine system: V has no zero, fall through to report failure below.
    throw NoReferenceError("reference_solution: affine system has no zero (inconsistent)",
                           residual);
  }

  // Extragradient fallback for non-affine operators.
  Vector z = Vector::Zero(op.dim());
  Vector v = op(z);
  double best = v.norm();
  Vector best_z = z;
  double s = op.lipschitz_bound() ? 0.9 / std::max(*op.lipschitz_bound(), 1e-300) : 1.0;
  for (long k = 0; k < max_fallback_iters; ++k) {
    if (best <= tol) break;
    Vector zbar = z - s * v;
    Vector znext = z - s * op(zbar);
    Vector vnext = op(znext);
    const double r = vnext.norm();
    if (!znext.allFinite() || (!op.lipschitz_bound() && r > 2.0 * best)) {
      // No usable bound: back off the step and restart from the best point seen.
      s *= 0.5;
      z = best_z;
      v = op(z);
      continue;
    }
    z = std::move(znext);
    v = std::move(vnext);
    if (r < best) {
      best = r;
      best_z = z;
    }
  }
  if (best <= tol) return SolutionRef{std::move(best_z), best, RefMethod::long_run};
  throw NoReferenceError("reference_solution: fallback run did not reach tolerance", best);
}

double gap_surrogate(const Vector& z, const SolutionRef& ref, double delta0, const Vector& vz) {
  return (z - ref.z_star).dot(vz) + delta0 * vz.norm();
}

double operator_norm_estimate(const Matrix& M, int max_iters, double tol) {
  const Eigen::Index n = M.cols();
  if (n == 0) return 0.0;
  Vector v = Vector::LinSpaced(n, 1.0, 2.0).normalized();
  double sigma2 = 0.0;
  for (int it = 0; it < max_iters; ++it) {
    Vector w = M.transpose() * (M * v);
    const double norm = w.norm();
    if (norm == 0.0) return 0.0;
    w /= norm;
    const double estimate = norm;  // Rayleigh quotient of M^T M at the previous unit v
    const bool settled = std::abs(estimate - sigma2) <= tol * std::max(1.0, estimate);
    sigma2 = estimate;
    v = std::move(w);
    if (settled && it > 2) break;
  }
  return std::sqrt(sigma2);
}

}  // namespace fastogda
