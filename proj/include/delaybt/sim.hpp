#pragma once

#include <cstdint>
#include <filesystem>

#include "delaybt/grid.hpp"
#include "delaybt/system.hpp"

namespace dbt {

enum class NoiseMode { NotApplicable, Independent, Common };

struct IncommensurateDelayError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct TrajectoryEnsemble {
  Grid grid;
  int n_paths = 1;
  std::vector<Eigen::MatrixXd> states;   // per path, (steps+1) x d
  std::vector<Eigen::MatrixXd> outputs;  // per path, (steps+1) x m
  std::uint64_t seed = 0;
  NoiseMode noise_mode = NoiseMode::NotApplicable;
};

/// Forward Euler for x' = A x + sum_i N_i x(t - tau_i) + B u(t).
/// Every tau_i must be an integer multiple of dt (no history interpolation).
TrajectoryEnsemble simulate_dde(const DelaySystem& sys, const SignalSpec& u,
                                const InitialState& x0, const HistorySpec& hist,
                                const Grid& grid);

/// Forward Euler with the delay term multiplied by the scalar signal v(t).
TrajectoryEnsemble simulate_bilinear_dde(const DelaySystem& sys, const SignalSpec& u,
                                         const SignalSpec& v, const InitialState& x0,
                                         const HistorySpec& hist, const Grid& grid);

/// Euler-Maruyama for dX = (A X + B u) dt + sum_i N_i X(t - tau_i) dW^i with one
/// scalar Brownian increment per delay term. Increments come from a counter
/// stream keyed by (seed, path, term, step).
TrajectoryEnsemble simulate_sdde(const DelaySystem& sys, const SignalSpec& u,
                                 const InitialState& xi, const HistorySpec& hist,
                                 const Grid& grid, int n_paths, NoiseMode mode,
                                 std::uint64_t seed);

struct ErrorEstimate {
  double value = 0.0;
  double std_error = 0.0;
};

/// Monte-Carlo L2 output distance sqrt( mean_p dt * sum_j ||y1 - y2||^2 ).
ErrorEstimate l2_output_error(const TrajectoryEnsemble& e1, const TrajectoryEnsemble& e2);

double l2_output_norm(const TrajectoryEnsemble& e);

/// CSV dump with columns t, path, [x_1..x_d,] y_1..y_m.
void dump_trajectories_csv(const TrajectoryEnsemble& e, const std::filesystem::path& path,
                           bool with_states = false);

}  // namespace dbt
