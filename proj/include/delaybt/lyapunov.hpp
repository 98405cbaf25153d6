#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <vector>

namespace dbt {

enum class LyapMethod { SchurDirect, StationaryIteration, KroneckerDirect };

struct LyapunovSolution {
  Eigen::MatrixXd X;
  double rel_residual = 0.0;
  int iterations = 0;
  LyapMethod method = LyapMethod::SchurDirect;
};

struct NotStableError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct SolverBreakdownError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NoConvergenceError : std::runtime_error {
  double last_residual;
  NoConvergenceError(const std::string& msg, double res)
      : std::runtime_error(msg), last_residual(res) {}
};

inline constexpr double kStabilityMargin = 1e-12;
inline constexpr double kDefaultLyapTol = 1e-10;
inline constexpr int kDefaultLyapMaxIter = 500;

double spectral_abscissa(const Eigen::MatrixXd& A);

/// Relative residual ||A X + X A^T + sum_i N_i X N_i^T + Q||_F / max(1, ||Q||_F).
double lyapunov_residual(const Eigen::MatrixXd& A, const std::vector<Eigen::MatrixXd>& Ns,
                         const Eigen::MatrixXd& Q, const Eigen::MatrixXd& X);

/// Solves A X + X A^T + Q = 0 via complex Schur reduction and triangular
/// back-substitution. Requires A Hurwitz-stable.
LyapunovSolution solve_standard(const Eigen::MatrixXd& A, const Eigen::MatrixXd& Q);

/// Solves A X + X A^T + sum_i N_i X N_i^T + Q = 0 by stationary iteration
/// X_{j+1} = lyap(A, Q + sum_i N_i X_j N_i^T) started at X_0 = 0. Contractive
/// under the smallness condition on the N_i.
LyapunovSolution solve_generalized(const Eigen::MatrixXd& A, const std::vector<Eigen::MatrixXd>& Ns,
                                   const Eigen::MatrixXd& Q, double tol = kDefaultLyapTol,
                                   int max_iter = kDefaultLyapMaxIter);

/// Direct Kronecker-vectorized solve of the generalized equation; oracle path,
/// d <= 30 only (memory d^4).
LyapunovSolution solve_kronecker(const Eigen::MatrixXd& A, const std::vector<Eigen::MatrixXd>& Ns,
                                 const Eigen::MatrixXd& Q);

/// Schur factorization of A, reusable across right-hand sides. Backbone of the
/// stationary iteration.
class SchurLyapunovSolver {
 public:
  explicit SchurLyapunovSolver(const Eigen::MatrixXd& A);
  // Solves A X + X A^T + Q = 0 for the factored A; result symmetrized.
  Eigen::MatrixXd solve(const Eigen::MatrixXd& Q) const;

 private:
  Eigen::MatrixXcd T_;  // upper triangular
  Eigen::MatrixXcd U_;  // unitary, A = U T U^*
};

}  // namespace dbt
