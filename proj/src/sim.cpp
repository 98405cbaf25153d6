#include "delaybt/sim.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "delaybt/rng.hpp"

namespace dbt {

namespace {

std::vector<long> delay_lags(const DelaySystem& sys, const Grid& grid) {
  std::vector<long> lags;
  for (const auto& t : sys.delays) {
    const long l = static_cast<long>(t.tau / grid.dt + 0.5);
    if (l < 1 || std::abs(static_cast<double>(l) * grid.dt - t.tau) > 1e-9 * t.tau)
      throw IncommensurateDelayError("delay tau=" + std::to_string(t.tau) +
                                     " is not an integer multiple of dt=" +
                                     std::to_string(grid.dt));
    lags.push_back(l);
  }
  return lags;
}

// State at grid offset j (may be negative -> history buffer).
Eigen::VectorXd lagged_state(const Eigen::MatrixXd& x, const HistorySpec& hist, long j,
                             Eigen::Index d) {
  if (j >= 0) return x.row(j).transpose();
  return hist.eval(j, d);
}

void fill_outputs(TrajectoryEnsemble& e, const DelaySystem& sys) {
  e.outputs.clear();
  for (const auto& x : e.states) e.outputs.push_back(x * sys.C.transpose());
}

}  // namespace

TrajectoryEnsemble simulate_bilinear_dde(const DelaySystem& sys, const SignalSpec& u,
                                         const SignalSpec& v, const InitialState& x0,
                                         const HistorySpec& hist, const Grid& grid) {
  require_valid(sys);
  const auto lags = delay_lags(sys, grid);
  const Eigen::Index d = sys.dim();

  TrajectoryEnsemble e;
  e.grid = grid;
  e.n_paths = 1;
  e.noise_mode = NoiseMode::NotApplicable;
  Eigen::MatrixXd x(grid.steps + 1, d);
  x.row(0) = x0.resolve(sys).transpose();
  for (long j = 0; j < grid.steps; ++j) {
    const double t = static_cast<double>(j) * grid.dt;
    Eigen::VectorXd acc = sys.A * x.row(j).transpose();
    if (!u.is_zero()) acc.noalias() += sys.B * u.eval(j, t);
    const double vj = v.is_zero() ? 0.0 : v.eval(j, t)(0);
    if (vj != 0.0)
      for (size_t i = 0; i < sys.delays.size(); ++i)
        acc.noalias() += vj * (sys.delays[i].N * lagged_state(x, hist, j - lags[i], d));
    x.row(j + 1) = x.row(j) + grid.dt * acc.transpose();
  }
  e.states.push_back(std::move(x));
  fill_outputs(e, sys);
  return e;
}

TrajectoryEnsemble simulate_dde(const DelaySystem& sys, const SignalSpec& u,
                                const InitialState& x0, const HistorySpec& hist,
                                const Grid& grid) {
  // v = 1 turns the bilinear scheme into the plain delay scheme.
  SignalSpec one = SignalSpec::constant_signal(Eigen::VectorXd::Ones(1));
  TrajectoryEnsemble e = simulate_bilinear_dde(sys, u, one, x0, hist, grid);
  e.noise_mode = NoiseMode::NotApplicable;
  return e;
}

TrajectoryEnsemble simulate_sdde(const DelaySystem& sys, const SignalSpec& u,
                                 const InitialState& xi, const HistorySpec& hist,
                                 const Grid& grid, int n_paths, NoiseMode mode,
                                 std::uint64_t seed) {
  require_valid(sys);
  if (n_paths < 1) throw std::invalid_argument("simulate_sdde: n_paths must be >= 1");
  const auto lags = delay_lags(sys, grid);
  const Eigen::Index d = sys.dim();
  const double sqrt_dt = std::sqrt(grid.dt);
  const Eigen::VectorXd x_init = xi.resolve(sys);

  TrajectoryEnsemble e;
  e.grid = grid;
  e.n_paths = n_paths;
  e.seed = seed;
  e.noise_mode = mode;
  e.states.resize(n_paths);

  for (int p = 0; p < n_paths; ++p) {
    Eigen::MatrixXd x(grid.steps + 1, d);
    x.row(0) = x_init.transpose();
    for (long j = 0; j < grid.steps; ++j) {
      const double t = static_cast<double>(j) * grid.dt;
      Eigen::VectorXd next = x.row(j).transpose() + grid.dt * (sys.A * x.row(j).transpose());
      if (!u.is_zero()) next.noalias() += grid.dt * (sys.B * u.eval(j, t));
      for (size_t i = 0; i < sys.delays.size(); ++i) {
        const Eigen::VectorXd xd = lagged_state(x, hist, j - lags[i], d);
        if (!xd.isZero(0.0)) {
          const double dw = sqrt_dt * counter_normal(seed, static_cast<std::uint64_t>(p),
                                                     static_cast<std::uint64_t>(i),
                                                     static_cast<std::uint64_t>(j));
          next.noalias() += dw * (sys.delays[i].N * xd);
        }
      }
      x.row(j + 1) = next.transpose();
    }
    e.states[p] = std::move(x);
  }
  fill_outputs(e, sys);
  return e;
}

ErrorEstimate l2_output_error(const TrajectoryEnsemble& e1, const TrajectoryEnsemble& e2) {
  if (e1.grid.dt != e2.grid.dt || e1.grid.steps != e2.grid.steps)
    throw std::invalid_argument("l2_output_error: grid mismatch");
  if (e1.n_paths != e2.n_paths)
    throw std::invalid_argument("l2_output_error: path count mismatch");
  if (e1.outputs.at(0).cols() != e2.outputs.at(0).cols())
    throw std::invalid_argument("l2_output_error: output dimension mismatch");

  const int P = e1.n_paths;
  Eigen::VectorXd per_path(P);
  // left rectangle rule on [0, T), matching signal_norms
  for (int p = 0; p < P; ++p)
    per_path(p) = e1.grid.dt * (e1.outputs[p].topRows(e1.grid.steps) -
                                e2.outputs[p].topRows(e1.grid.steps))
                                   .squaredNorm();

  ErrorEstimate est;
  const double mean = per_path.mean();
  est.value = std::sqrt(std::max(0.0, mean));
  if (P > 1 && est.value > 0.0) {
    const double var = (per_path.array() - mean).square().sum() / (P - 1);
    const double se_mean = std::sqrt(var / P);
    est.std_error = se_mean / (2.0 * est.value);  // delta method through sqrt
  }
  return est;
}

double l2_output_norm(const TrajectoryEnsemble& e) {
  double acc = 0.0;
  for (const auto& y : e.outputs) acc += e.grid.dt * y.topRows(e.grid.steps).squaredNorm();
  return std::sqrt(acc / e.n_paths);
}

void dump_trajectories_csv(const TrajectoryEnsemble& e, const std::filesystem::path& path,
                           bool with_states) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  const Eigen::Index d = e.states.at(0).cols();
  const Eigen::Index m = e.outputs.at(0).cols();
  out << "t,path";
  if (with_states)
    for (Eigen::Index i = 0; i < d; ++i) out << ",x_" << (i + 1);
  for (Eigen::Index i = 0; i < m; ++i) out << ",y_" << (i + 1);
  out << "\n";
  char buf[48];
  for (int p = 0; p < e.n_paths; ++p)
    for (long j = 0; j <= e.grid.steps; ++j) {
      std::snprintf(buf, sizeof(buf), "%.12g", static_cast<double>(j) * e.grid.dt);
      out << buf << "," << p;
      if (with_states)
        for (Eigen::Index i = 0; i < d; ++i) {
          std::snprintf(buf, sizeof(buf), "%.17g", e.states[p](j, i));
          out << "," << buf;
        }
      for (Eigen::Index i = 0; i < m; ++i) {
        std::snprintf(buf, sizeof(buf), "%.17g", e.outputs[p](j, i));
        out << "," << buf;
      }
      out << "\n";
    }
}

}  // namespace dbt
