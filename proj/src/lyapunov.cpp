#include "delaybt/lyapunov.hpp"

#include <Eigen/Eigenvalues>

namespace dbt {

namespace {

void check_dims(const Eigen::MatrixXd& A, const std::vector<Eigen::MatrixXd>& Ns,
                const Eigen::MatrixXd& Q) {
  const Eigen::Index d = A.rows();
  if (A.cols() != d || Q.rows() != d || Q.cols() != d)
    throw std::invalid_argument("lyapunov: A/Q dimension mismatch");
  for (const auto& N : Ns)
    if (N.rows() != d || N.cols() != d)
      throw std::invalid_argument("lyapunov: N dimension mismatch");
}

void require_stable(const Eigen::MatrixXd& A) {
  const double abscissa = spectral_abscissa(A);
  if (abscissa >= -kStabilityMargin)
    throw NotStableError("matrix not Hurwitz-stable (spectral abscissa " +
                         std::to_string(abscissa) + ")");
}

Eigen::MatrixXd quadratic_terms(const std::vector<Eigen::MatrixXd>& Ns, const Eigen::MatrixXd& X) {
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(X.rows(), X.cols());
  for (const auto& N : Ns) acc.noalias() += N * X * N.transpose();
  return acc;
}

}  // namespace

double spectral_abscissa(const Eigen::MatrixXd& A) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(A, false);
  if (es.info() != Eigen::Success)
    throw SolverBreakdownError("eigenvalue computation failed");
  return es.eigenvalues().real().maxCoeff();
}

double lyapunov_residual(const Eigen::MatrixXd& A, const std::vector<Eigen::MatrixXd>& Ns,
                         const Eigen::MatrixXd& Q, const Eigen::MatrixXd& X) {
  check_dims(A, Ns, Q);
  if (X.rows() != A.rows() || X.cols() != A.rows())
    throw std::invalid_argument("lyapunov_residual: X dimension mismatch");
  Eigen::MatrixXd R = A * X + X * A.transpose() + quadratic_terms(Ns, X) + Q;
  return R.norm() / std::max(1.0, Q.norm());
}

SchurLyapunovSolver::SchurLyapunovSolver(const Eigen::MatrixXd& A) {
  Eigen::ComplexSchur<Eigen::MatrixXcd> schur(A.cast<std::complex<double>>());
  if (schur.info() != Eigen::Success)
    throw SolverBreakdownError("Schur reduction failed to converge");
  T_ = schur.matrixT();
  U_ = schur.matrixU();
}

Eigen::MatrixXd SchurLyapunovSolver::solve(const Eigen::MatrixXd& Q) const {
  const Eigen::Index d = T_.rows();
  // Transform to the Schur basis: T Y + Y T^* + Q' = 0.
  Eigen::MatrixXcd Qs = U_.adjoint() * Q.cast<std::complex<double>>() * U_;
  Eigen::MatrixXcd Y(d, d);
  Eigen::MatrixXcd M = T_;  // T + conj(T_kk) I, diagonal patched per column
  // Column k couples only to columns j >= k; sweep right to left.
  for (Eigen::Index k = d - 1; k >= 0; --k) {
    Eigen::VectorXcd rhs = -Qs.col(k);
    for (Eigen::Index j = k + 1; j < d; ++j) rhs -= std::conj(T_(k, j)) * Y.col(j);
    for (Eigen::Index i = 0; i < d; ++i) M(i, i) = T_(i, i) + std::conj(T_(k, k));
    Y.col(k) = M.triangularView<Eigen::Upper>().solve(rhs);
  }
  Eigen::MatrixXd X = (U_ * Y * U_.adjoint()).real();
  return 0.5 * (X + X.transpose());
}

LyapunovSolution solve_standard(const Eigen::MatrixXd& A, const Eigen::MatrixXd& Q) {
  check_dims(A, {}, Q);
  require_stable(A);
  SchurLyapunovSolver solver(A);
  LyapunovSolution sol;
  sol.X = solver.solve(Q);
  sol.rel_residual = lyapunov_residual(A, {}, Q, sol.X);
  sol.iterations = 0;
  sol.method = LyapMethod::SchurDirect;
  return sol;
}

LyapunovSolution solve_generalized(const Eigen::MatrixXd& A, const std::vector<Eigen::MatrixXd>& Ns,
                                   const Eigen::MatrixXd& Q, double tol, int max_iter) {
  check_dims(A, Ns, Q);
  require_stable(A);
  SchurLyapunovSolver solver(A);

  LyapunovSolution sol;
  sol.method = LyapMethod::StationaryIteration;
  sol.X = Eigen::MatrixXd::Zero(A.rows(), A.cols());
  double res = lyapunov_residual(A, Ns, Q, sol.X);
  for (int it = 0; it < max_iter; ++it) {
    sol.X = solver.solve(Q + quadratic_terms(Ns, sol.X));
    sol.iterations = it + 1;
    res = lyapunov_residual(A, Ns, Q, sol.X);
    if (res <= tol) {
      sol.rel_residual = res;
      return sol;
    }
  }
  throw NoConvergenceError(
      "generalized Lyapunov stationary iteration did not reach tol (last residual " +
          std::to_string(res) + "); the contraction condition likely fails",
      res);
}

LyapunovSolution solve_kronecker(const Eigen::MatrixXd& A, const std::vector<Eigen::MatrixXd>& Ns,
                                 const Eigen::MatrixXd& Q) {
  check_dims(A, Ns, Q);
  const Eigen::Index d = A.rows();
  if (d > 30) throw std::invalid_argument("solve_kronecker is limited to d <= 30");
  require_stable(A);
  const Eigen::Index dd = d * d;
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(dd, dd);
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(d, d);
  auto add_kron = [&](const Eigen::MatrixXd& L, const Eigen::MatrixXd& R) {
    // K += L (x) R, vec column-major: vec(R X L^T) = (L (x) R) vec(X)
    for (Eigen::Index i = 0; i < d; ++i)
      for (Eigen::Index j = 0; j < d; ++j)
        if (L(i, j) != 0.0) K.block(i * d, j * d, d, d) += L(i, j) * R;
  };
  add_kron(I, A);   // vec(A X)
  add_kron(A, I);   // vec(X A^T)
  for (const auto& N : Ns) add_kron(N, N);  // vec(N X N^T)
  Eigen::VectorXd q(Eigen::Map<const Eigen::VectorXd>(Q.data(), dd));
  Eigen::VectorXd x = K.partialPivLu().solve(-q);
  LyapunovSolution sol;
  sol.X = Eigen::Map<Eigen::MatrixXd>(x.data(), d, d);
  sol.X = 0.5 * (sol.X + sol.X.transpose()).eval();
  sol.rel_residual = lyapunov_residual(A, Ns, Q, sol.X);
  sol.iterations = 0;
  sol.method = LyapMethod::KroneckerDirect;
  return sol;
}

}  // namespace dbt
