#include "delaybt/system.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dbt {

std::string to_string(SystemKind kind) {
  switch (kind) {
    case SystemKind::DeterministicDelay: return "DeterministicDelay";
    case SystemKind::BilinearDelay: return "BilinearDelay";
    case SystemKind::StochasticDelay: return "StochasticDelay";
  }
  return "?";
}

SystemKind kind_from_string(const std::string& s) {
  if (s == "DeterministicDelay") return SystemKind::DeterministicDelay;
  if (s == "BilinearDelay") return SystemKind::BilinearDelay;
  if (s == "StochasticDelay") return SystemKind::StochasticDelay;
  throw std::invalid_argument("unknown system kind: " + s);
}

double DelaySystem::max_tau() const {
  double m = 0.0;
  for (const auto& t : delays) m = std::max(m, t.tau);
  return m;
}

namespace {
bool all_finite(const Eigen::MatrixXd& m) { return m.allFinite(); }
}  // namespace

ValidationReport validate_system(const DelaySystem& sys) {
  ValidationReport rep;
  const Eigen::Index d = sys.A.rows();
  if (d == 0) rep.push_back({"empty system", "state dimension is zero"});
  if (sys.A.cols() != d)
    rep.push_back({"dimension mismatch", "A is not square"});
  if (sys.B.rows() != d)
    rep.push_back({"dimension mismatch", "B has " + std::to_string(sys.B.rows()) +
                                             " rows, expected " + std::to_string(d)});
  if (sys.B_in.rows() != d)
    rep.push_back({"dimension mismatch", "B_in row count != d"});
  if (sys.C.cols() != d)
    rep.push_back({"dimension mismatch", "C column count != d"});
  for (size_t i = 0; i < sys.delays.size(); ++i) {
    const auto& t = sys.delays[i];
    if (t.N.rows() != d || t.N.cols() != d)
      rep.push_back({"dimension mismatch", "delay matrix " + std::to_string(i) + " is not d x d"});
    if (!(t.tau > 0.0))
      rep.push_back({"nonpositive delay", "tau_" + std::to_string(i) + " must be > 0"});
    if (!all_finite(t.N))
      rep.push_back({"nonfinite entries", "delay matrix " + std::to_string(i)});
  }
  for (size_t i = 0; i < sys.delays.size(); ++i)
    for (size_t j = i + 1; j < sys.delays.size(); ++j)
      if (sys.delays[i].tau == sys.delays[j].tau)
        rep.push_back({"duplicate delay", "tau_" + std::to_string(i) + " == tau_" + std::to_string(j)});
  if (!all_finite(sys.A)) rep.push_back({"nonfinite entries", "A"});
  if (!all_finite(sys.B)) rep.push_back({"nonfinite entries", "B"});
  if (!all_finite(sys.B_in)) rep.push_back({"nonfinite entries", "B_in"});
  if (!all_finite(sys.C)) rep.push_back({"nonfinite entries", "C"});
  return rep;
}

bool is_valid(const DelaySystem& sys) { return validate_system(sys).empty(); }

void require_valid(const DelaySystem& sys) {
  auto rep = validate_system(sys);
  if (!rep.empty())
    throw std::invalid_argument("invalid system: " + rep.front().code + " (" + rep.front().detail + ")");
}

SignalSpec SignalSpec::zero(Eigen::Index dim) {
  SignalSpec s;
  s.form = Form::Zero;
  s.dim = dim;
  return s;
}

SignalSpec SignalSpec::constant_signal(const Eigen::VectorXd& c) {
  SignalSpec s;
  s.form = Form::Constant;
  s.dim = c.size();
  s.constant = c;
  return s;
}

SignalSpec SignalSpec::sine_all_ones(double freq, Eigen::Index dim) {
  SignalSpec s;
  s.form = Form::SineAllOnes;
  s.dim = dim;
  s.freq = freq;
  return s;
}

SignalSpec SignalSpec::sampled(const Eigen::MatrixXd& values) {
  if (!values.allFinite()) throw std::invalid_argument("sampled signal has nonfinite values");
  SignalSpec s;
  s.form = Form::Sampled;
  s.dim = values.cols();
  s.samples = values;
  return s;
}

Eigen::VectorXd SignalSpec::eval(Eigen::Index j, double t) const {
  switch (form) {
    case Form::Zero:
      return Eigen::VectorXd::Zero(dim);
    case Form::Constant:
      return constant;
    case Form::SineAllOnes:
      return Eigen::VectorXd::Constant(dim, std::sin(freq * t));
    case Form::Sampled:
      if (j < 0 || j >= samples.rows())
        throw std::out_of_range("sampled signal index out of range");
      return samples.row(j).transpose();
  }
  return Eigen::VectorXd::Zero(dim);
}

HistorySpec HistorySpec::sampled(const Eigen::MatrixXd& values) {
  HistorySpec h;
  h.form = Form::Sampled;
  h.samples = values;
  return h;
}

Eigen::VectorXd HistorySpec::eval(Eigen::Index j_neg, Eigen::Index dim) const {
  if (form == Form::Zero) return Eigen::VectorXd::Zero(dim);
  const Eigen::Index row = samples.rows() + j_neg;  // j_neg in [-rows, -1]
  if (row < 0 || row >= samples.rows())
    throw std::out_of_range("history lookup outside sampled window");
  return samples.row(row).transpose();
}

InitialState InitialState::coordinates(const Eigen::VectorXd& w) {
  InitialState s;
  s.w = w;
  return s;
}

InitialState InitialState::state(const Eigen::VectorXd& x) {
  InitialState s;
  s.explicit_state = x;
  return s;
}

Eigen::VectorXd InitialState::resolve(const DelaySystem& sys) const {
  if (explicit_state.has_value()) {
    if (explicit_state->size() != sys.dim())
      throw std::invalid_argument("explicit initial state has wrong dimension");
    return *explicit_state;
  }
  if (w.has_value()) {
    if (w->size() != sys.n_init())
      throw std::invalid_argument("initial coordinate vector has wrong dimension");
    return sys.B_in * (*w);
  }
  return Eigen::VectorXd::Zero(sys.dim());
}

}  // namespace dbt
