#pragma once

#include <optional>
#include <vector>

#include "delaybt/lyapunov.hpp"

namespace dbt {

/// Sampled semigroup envelope ||exp(tA)|| <= M exp(-omega t). The estimate is
/// non-rigorous: omega carries a 1e-3 safety margin off the spectral abscissa
/// and M is a max over 200 log-spaced sample times.
struct Envelope {
  double M = 1.0;
  double omega = 0.0;
  bool sampled_estimate = true;
};

Envelope semigroup_envelope(const Eigen::MatrixXd& A);

struct VolterraCheck {
  double q = 0.0;
  bool ok = false;
};

/// Contraction number q = M * (sum_i ||N_i||_2) / sqrt(2 omega); ok iff q < 1
/// (strict). Multiple delay terms enter via the norm sum (conservative).
VolterraCheck check_volterra(double M, double omega, const std::vector<Eigen::MatrixXd>& Ns);

/// Exponential-decay criterion for the delayed semigroup:
/// M e^{alpha tau} ||N|| / (omega - alpha) < 1, strict; requires 0 <= alpha < omega.
bool check_delay_decay(double M, double omega, double alpha, double tau,
                       const std::vector<Eigen::MatrixXd>& Ns);

struct SddeMsReport {
  double delta1 = 0.0;
  double delta2 = 0.0;
  double delta3 = 0.0;
  double tau_max = 0.0;
  bool lyap_ok = false;
  bool unconditional = false;  // all N_i = 0: delta quantities degenerate
  bool pass = false;
  double G_norm = 0.0;
};

/// Mean-square stability test for dX = A X dt + sum_i (A_i X + N_i X_{t-tau}) dW^i:
/// solve G A + A^T G + sum_i (A_i+N_i)^T G (A_i+N_i) = -I for G > 0, then check
/// the delay smallness condition tau < tau_max. Solver failure is reported as
/// lyap_ok = false, not thrown.
SddeMsReport check_sdde_ms_stability(const Eigen::MatrixXd& A,
                                     const std::vector<Eigen::MatrixXd>& As,
                                     const std::vector<Eigen::MatrixXd>& Ns, double tau);

/// Direct-transcription and simplified-algebra evaluations of (delta3, tau_max);
/// both exposed so their agreement can be asserted.
std::pair<double, double> sdde_delta3_tau_max_direct(double delta1, double delta2, double g_norm,
                                                     double sum_n2, double a_norm);
std::pair<double, double> sdde_delta3_tau_max_alt(double delta1, double delta2, double g_norm,
                                                  double sum_n2, double a_norm);

double spectral_norm(const Eigen::MatrixXd& M);

}  // namespace dbt
