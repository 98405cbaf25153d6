#pragma once

#include "delaybt/lyapunov.hpp"
#include "delaybt/system.hpp"

namespace dbt {

/// Which reachability Gramian rule to use. BilinearRule puts B_in B_in^T into
/// the Lyapunov inhomogeneity; SddeRule solves with B B^T only and adds
/// B_in B_in^T afterwards. The two differ whenever some N_i != 0.
enum class GramianVariant { BilinearRule, SddeRule };

struct GramianPair {
  Eigen::MatrixXd P;  // reachability
  Eigen::MatrixXd O;  // observability
  GramianVariant variant = GramianVariant::BilinearRule;
  double res_P = 0.0;
  double res_O = 0.0;
  int iterations_P = 0;
  int iterations_O = 0;
};

struct Factor {
  enum class Kind { Right, Left };  // Right: P = M M^T (d x r); Left: O = M^T M (r x d)
  Eigen::MatrixXd M;
  Kind kind = Kind::Right;
  Eigen::Index rank() const { return kind == Kind::Right ? M.cols() : M.rows(); }
};

struct IndefiniteMatrixError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct RankCollapseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct BalancedRealization {
  Eigen::MatrixXd Q;     // r0 x d
  Eigen::MatrixXd Qinv;  // d x r0, Q * Qinv = I
  Eigen::VectorXd hsv;   // nonincreasing
  DelaySystem balanced;  // r0-dimensional balanced system
};

struct ReducedModel {
  DelaySystem sys;
  Eigen::MatrixXd transform;  // r x d rows of Q
  Eigen::MatrixXd inverse;    // d x r columns of Qinv
  Eigen::VectorXd hsv_tail;   // discarded singular values
  bool gap_warning = false;   // truncation at a near-degenerate gap
};

struct HankelSpectrum {
  Eigen::VectorXd values;  // singular values of the error system, nonincreasing
  double trace_norm = 0.0;
};

GramianPair compute_gramians(const DelaySystem& sys, GramianVariant variant,
                             double tol = kDefaultLyapTol);

/// Eigendecomposition-based PSD factor keeping eigenvalues > rank_tol * lambda_max.
/// Pass rank_tol < 0 for the default d * eps.
Factor psd_factor(const Eigen::MatrixXd& M, Factor::Kind kind = Factor::Kind::Right,
                  double rank_tol = -1.0);

/// Square-root balancing: SVD of W R with O = W^T W, P = R R^T.
BalancedRealization balance_transform(const DelaySystem& sys, const GramianPair& gram);

ReducedModel truncate(const BalancedRealization& bal, Eigen::Index r);

/// Block composition of two systems with subtracted outputs (C_hat = [C, -C2]);
/// delays paired by exactly equal tau.
DelaySystem build_error_system(const DelaySystem& sys1, const DelaySystem& sys2);

/// Singular values of the error system's W_hat R_hat; their sum is the trace
/// norm of the Hankel-operator difference.
HankelSpectrum error_hankel(const DelaySystem& sys1, const DelaySystem& sys2,
                            GramianVariant variant, double tol = kDefaultLyapTol);

}  // namespace dbt
