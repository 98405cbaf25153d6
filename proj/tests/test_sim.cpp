#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <filesystem>
#include <fstream>

#include "delaybt/sim.hpp"
#include "doctest.h"

using namespace dbt;

namespace {

Eigen::MatrixXd scalar(double v) { return Eigen::MatrixXd::Constant(1, 1, v); }

DelaySystem scalar_dde(double a, double n, double tau) {
  DelaySystem sys;
  sys.A = scalar(a);
  if (n != 0.0 || tau > 0.0) sys.delays.push_back({scalar(n), tau});
  sys.B = scalar(1.0);
  sys.B_in = scalar(1.0);
  sys.C = scalar(1.0);
  return sys;
}

double max_error_vs_exp(double dt) {
  DelaySystem sys = scalar_dde(-1.0, 0.0, 0.0);
  sys.delays.clear();
  const Grid grid = Grid::from_horizon(1.0, dt);
  auto traj = simulate_dde(sys, SignalSpec::zero(1), InitialState::state(scalar(1.0).col(0)),
                           HistorySpec::zero(), grid);
  double err = 0.0;
  for (long j = 0; j <= grid.steps; ++j)
    err = std::max(err, std::abs(traj.states[0](j, 0) - std::exp(-j * dt)));
  return err;
}

}  // namespace

TEST_CASE("delay term is inactive while t < tau with zero history") {
  DelaySystem sys = scalar_dde(-1.0, 0.5, 1.0);
  const Grid grid = Grid::from_horizon(1.0, 0.01);
  auto traj = simulate_dde(sys, SignalSpec::zero(1), InitialState::state(scalar(1.0).col(0)),
                           HistorySpec::zero(), grid);
  for (long j = 0; j <= grid.steps; ++j)
    CHECK(std::abs(traj.states[0](j, 0) - std::exp(-j * 0.01)) <= 2.0 * 0.01);
}

TEST_CASE("forward Euler is first order: halving dt halves the error") {
  const double e1 = max_error_vs_exp(0.01);
  const double e2 = max_error_vs_exp(0.005);
  CHECK(e1 / e2 >= 1.7);
  CHECK(e1 / e2 <= 2.3);
}

TEST_CASE("zero input and zero state stay exactly zero") {
  DelaySystem sys = scalar_dde(-1.0, 0.5, 0.1);
  auto traj = simulate_dde(sys, SignalSpec::zero(1), InitialState{}, HistorySpec::zero(),
                           Grid::from_horizon(1.0, 0.01));
  CHECK(traj.states[0].cwiseAbs().maxCoeff() == 0.0);
  CHECK(traj.outputs[0].cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("incommensurate delay is rejected") {
  DelaySystem sys = scalar_dde(-1.0, 0.5, 0.105);
  CHECK_THROWS_AS(simulate_dde(sys, SignalSpec::zero(1), InitialState{}, HistorySpec::zero(),
                               Grid::from_horizon(1.0, 0.01)),
                  IncommensurateDelayError);
  CHECK_THROWS_AS(simulate_sdde(sys, SignalSpec::zero(1), InitialState{}, HistorySpec::zero(),
                                Grid::from_horizon(1.0, 0.01), 2, NoiseMode::Independent, 1),
                  IncommensurateDelayError);
}

TEST_CASE("sampled history feeds the delay term") {
  // x' = x(t - dt): first step reads the last history row.
  DelaySystem sys = scalar_dde(0.0, 1.0, 0.05);
  Eigen::MatrixXd hist_vals(1, 1);
  hist_vals << 2.0;
  const Grid grid{0.05, 2};
  auto traj = simulate_dde(sys, SignalSpec::zero(1), InitialState{},
                           HistorySpec::sampled(hist_vals), grid);
  CHECK(traj.states[0](0, 0) == 0.0);
  CHECK(traj.states[0](1, 0) == doctest::Approx(0.05 * 2.0));  // dt * history value
  CHECK(traj.states[0](2, 0) == doctest::Approx(0.1));         // dt * x(0) added zero
}

TEST_CASE("bilinear v = 1 matches the plain delay scheme") {
  DelaySystem sys = scalar_dde(-1.0, 0.5, 0.1);
  const Grid grid = Grid::from_horizon(1.0, 0.01);
  const auto u = SignalSpec::sine_all_ones(3.0, 1);
  const auto x0 = InitialState::state(scalar(1.0).col(0));
  auto a = simulate_dde(sys, u, x0, HistorySpec::zero(), grid);
  auto b = simulate_bilinear_dde(sys, u, SignalSpec::constant_signal(Eigen::VectorXd::Ones(1)),
                                 x0, HistorySpec::zero(), grid);
  CHECK((a.states[0] - b.states[0]).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("bilinear v = 0 removes the delay coupling") {
  DelaySystem sys = scalar_dde(-1.0, 5.0, 0.1);
  const Grid grid = Grid::from_horizon(1.0, 0.01);
  const auto x0 = InitialState::state(scalar(1.0).col(0));
  auto with_v0 = simulate_bilinear_dde(sys, SignalSpec::zero(1), SignalSpec::zero(1), x0,
                                       HistorySpec::zero(), grid);
  DelaySystem undelayed = sys;
  undelayed.delays.clear();
  auto plain = simulate_dde(undelayed, SignalSpec::zero(1), x0, HistorySpec::zero(), grid);
  CHECK((with_v0.states[0] - plain.states[0]).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("v = T0^{-1/2} on the sqrt(T0)-scaled system reproduces the delay system") {
  const double T0 = 2.0;
  DelaySystem sys = scalar_dde(-1.0, 0.5, 0.1);
  DelaySystem scaled = sys;
  scaled.delays[0].N *= std::sqrt(T0);
  const Grid grid = Grid::from_horizon(T0, 0.01);
  const auto x0 = InitialState::state(scalar(1.0).col(0));
  auto plain = simulate_dde(sys, SignalSpec::zero(1), x0, HistorySpec::zero(), grid);
  auto resc = simulate_bilinear_dde(
      scaled, SignalSpec::zero(1),
      SignalSpec::constant_signal(Eigen::VectorXd::Constant(1, 1.0 / std::sqrt(T0))), x0,
      HistorySpec::zero(), grid);
  CHECK((plain.states[0] - resc.states[0]).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("simulate_dde is linear in (x0, u) jointly") {
  DelaySystem sys = scalar_dde(-0.8, 0.4, 0.1);
  const Grid grid = Grid::from_horizon(1.0, 0.01);
  const auto h = HistorySpec::zero();
  auto t1 = simulate_dde(sys, SignalSpec::sine_all_ones(5.0, 1),
                         InitialState::state(scalar(1.0).col(0)), h, grid);
  auto t2 = simulate_dde(sys, SignalSpec::constant_signal(Eigen::VectorXd::Ones(1)),
                         InitialState::state(scalar(-0.5).col(0)), h, grid);
  // combined run: u = sin + 1 via samples, x0 = 0.5
  Eigen::MatrixXd samples(grid.steps + 1, 1);
  for (long j = 0; j <= grid.steps; ++j) samples(j, 0) = std::sin(5.0 * j * 0.01) + 1.0;
  auto t12 = simulate_dde(sys, SignalSpec::sampled(samples),
                          InitialState::state(scalar(0.5).col(0)), h, grid);
  CHECK((t12.states[0] - t1.states[0] - t2.states[0]).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("SDDE with zero noise matrices reproduces the deterministic solution exactly") {
  DelaySystem sys = scalar_dde(-1.0, 0.0, 0.1);
  sys.kind = SystemKind::StochasticDelay;
  const Grid grid = Grid::from_horizon(1.0, 0.01);
  const auto x0 = InitialState::state(scalar(1.0).col(0));
  auto sd = simulate_sdde(sys, SignalSpec::zero(1), x0, HistorySpec::zero(), grid, 4,
                          NoiseMode::Independent, 42);
  auto det = simulate_dde(sys, SignalSpec::zero(1), x0, HistorySpec::zero(), grid);
  for (int p = 0; p < 4; ++p)
    CHECK((sd.states[p] - det.states[0]).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("zero history keeps SDDE paths deterministic before the first lag") {
  DelaySystem sys = scalar_dde(-1.0, 0.7, 0.2);
  sys.kind = SystemKind::StochasticDelay;
  const Grid grid = Grid::from_horizon(1.0, 0.01);
  auto traj = simulate_sdde(sys, SignalSpec::zero(1), InitialState::state(scalar(1.0).col(0)),
                            HistorySpec::zero(), grid, 5, NoiseMode::Independent, 3);
  const long lag = 20;
  for (int p = 1; p < 5; ++p) {
    for (long j = 0; j <= lag; ++j)
      CHECK(traj.states[p](j, 0) == traj.states[0](j, 0));
    // after the lag the diffusion is active and paths separate
    CHECK((traj.states[p] - traj.states[0]).cwiseAbs().maxCoeff() > 0.0);
  }
}

TEST_CASE("identical seeds give bit-identical ensembles") {
  DelaySystem sys = scalar_dde(-1.0, 0.5, 0.1);
  sys.kind = SystemKind::StochasticDelay;
  const Grid grid = Grid::from_horizon(1.0, 0.01);
  const auto x0 = InitialState::state(scalar(1.0).col(0));
  auto a = simulate_sdde(sys, SignalSpec::zero(1), x0, HistorySpec::zero(), grid, 3,
                         NoiseMode::Independent, 7);
  auto b = simulate_sdde(sys, SignalSpec::zero(1), x0, HistorySpec::zero(), grid, 3,
                         NoiseMode::Independent, 7);
  for (int p = 0; p < 3; ++p) CHECK((a.states[p] - b.states[p]).cwiseAbs().maxCoeff() == 0.0);
  auto c = simulate_sdde(sys, SignalSpec::zero(1), x0, HistorySpec::zero(), grid, 3,
                         NoiseMode::Independent, 8);
  CHECK((a.states[0] - c.states[0]).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("l2_output_error: identical, constant difference, mismatch") {
  DelaySystem sys = scalar_dde(-1.0, 0.0, 0.1);
  const Grid grid = Grid::from_horizon(1.0, 0.01);
  auto t = simulate_dde(sys, SignalSpec::zero(1), InitialState::state(scalar(1.0).col(0)),
                        HistorySpec::zero(), grid);
  auto self = l2_output_error(t, t);
  CHECK(self.value == 0.0);
  CHECK(self.std_error == 0.0);

  TrajectoryEnsemble a, b;
  a.grid = b.grid = grid;
  a.n_paths = b.n_paths = 1;
  a.states.push_back(Eigen::MatrixXd::Zero(grid.steps + 1, 1));
  b.states = a.states;
  a.outputs.push_back(Eigen::MatrixXd::Ones(grid.steps + 1, 1));
  b.outputs.push_back(Eigen::MatrixXd::Zero(grid.steps + 1, 1));
  CHECK(l2_output_error(a, b).value == doctest::Approx(1.0).epsilon(1e-9));

  TrajectoryEnsemble c = a;
  c.grid = Grid::from_horizon(1.0, 0.02);
  CHECK_THROWS_AS(l2_output_error(a, c), std::invalid_argument);
}

TEST_CASE("outputs equal C times states on every node") {
  DelaySystem sys = scalar_dde(-1.0, 0.3, 0.1);
  sys.C = scalar(2.5);
  const Grid grid = Grid::from_horizon(0.5, 0.01);
  auto t = simulate_dde(sys, SignalSpec::sine_all_ones(2.0, 1),
                        InitialState::state(scalar(1.0).col(0)), HistorySpec::zero(), grid);
  CHECK((t.outputs[0] - 2.5 * t.states[0]).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("trajectory CSV dump has the documented columns") {
  DelaySystem sys = scalar_dde(-1.0, 0.0, 0.1);
  auto t = simulate_dde(sys, SignalSpec::zero(1), InitialState::state(scalar(1.0).col(0)),
                        HistorySpec::zero(), Grid::from_horizon(0.1, 0.05));
  const auto path = std::filesystem::temp_directory_path() / "delaybt_traj.csv";
  dump_trajectories_csv(t, path, true);
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  CHECK(header == "t,path,x_1,y_1");
  int lines = 0;
  for (std::string line; std::getline(in, line);) ++lines;
  CHECK(lines == 3);  // steps + 1 nodes
  std::filesystem::remove(path);
}
