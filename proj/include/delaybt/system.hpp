#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

namespace dbt {

enum class SystemKind { DeterministicDelay, BilinearDelay, StochasticDelay };

std::string to_string(SystemKind kind);
SystemKind kind_from_string(const std::string& s);

struct DelayTerm {
  Eigen::MatrixXd N;
  double tau = 0.0;
};

/// Linear time-invariant delay system
///   x'(t) = A x(t) + sum_i N_i x(t - tau_i) [* v(t) | dW^i] + B u(t),
///   y(t)  = C x(t),
/// with admissible initial states spanned by the columns of B_in.
/// One representation serves full, reduced, and error systems.
struct DelaySystem {
  Eigen::MatrixXd A;
  std::vector<DelayTerm> delays;
  Eigen::MatrixXd B;
  Eigen::MatrixXd B_in;
  Eigen::MatrixXd C;
  SystemKind kind = SystemKind::DeterministicDelay;

  Eigen::Index dim() const { return A.rows(); }
  Eigen::Index n_controls() const { return B.cols(); }
  Eigen::Index n_init() const { return B_in.cols(); }
  Eigen::Index n_outputs() const { return C.rows(); }
  double max_tau() const;
};

struct Violation {
  std::string code;
  std::string detail;
};
using ValidationReport = std::vector<Violation>;

/// Returns every invariant violation; empty report means the system is valid.
ValidationReport validate_system(const DelaySystem& sys);

bool is_valid(const DelaySystem& sys);
void require_valid(const DelaySystem& sys);

/// Control signal u(t) (or bilinear multiplier v(t)) on a uniform grid.
struct SignalSpec {
  enum class Form { Zero, Constant, SineAllOnes, Sampled };
  Form form = Form::Zero;
  Eigen::Index dim = 0;
  Eigen::VectorXd constant;   // Constant
  double freq = 0.0;          // SineAllOnes: u(t) = sin(freq*t) * 1
  Eigen::MatrixXd samples;    // Sampled: row j = value at t_j

  static SignalSpec zero(Eigen::Index dim);
  static SignalSpec constant_signal(const Eigen::VectorXd& c);
  static SignalSpec sine_all_ones(double freq, Eigen::Index dim);
  static SignalSpec sampled(const Eigen::MatrixXd& values);

  /// Value at grid node j (time t = j*dt).
  Eigen::VectorXd eval(Eigen::Index j, double t) const;
  bool is_zero() const { return form == Form::Zero; }
};

/// History function on [-max tau, 0).
struct HistorySpec {
  enum class Form { Zero, Sampled };
  Form form = Form::Zero;
  Eigen::MatrixXd samples;  // row h = value at t = (h - rows)*dt, h = 0..rows-1

  static HistorySpec zero() { return {}; }
  static HistorySpec sampled(const Eigen::MatrixXd& values);

  /// Value at negative grid offset (j < 0, t = j*dt); lag counts back from 0.
  Eigen::VectorXd eval(Eigen::Index j_neg, Eigen::Index dim) const;
};

/// Initial state, either as coordinates w in the B_in column frame or as an
/// explicit state vector.
struct InitialState {
  std::optional<Eigen::VectorXd> w;
  std::optional<Eigen::VectorXd> explicit_state;

  static InitialState coordinates(const Eigen::VectorXd& w);
  static InitialState state(const Eigen::VectorXd& x);

  Eigen::VectorXd resolve(const DelaySystem& sys) const;
};

}  // namespace dbt
