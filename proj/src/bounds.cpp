#include "delaybt/bounds.hpp"

#include <cmath>
#include <stdexcept>

namespace dbt {

SignalNorms signal_norms(const SignalSpec& u, const Grid& grid) {
  if (grid.steps < 1) throw std::invalid_argument("signal_norms: empty grid");
  SignalNorms n;
  n.T = grid.T();
  double sum1 = 0.0, sum2 = 0.0, vmax = 0.0;
  for (long j = 0; j <= grid.steps; ++j) {
    const double nv = u.eval(j, static_cast<double>(j) * grid.dt).norm();
    vmax = std::max(vmax, nv);
    if (j < grid.steps) {  // left rectangle rule
      sum1 += nv;
      sum2 += nv * nv;
    }
  }
  n.l1 = grid.dt * sum1;
  n.l2 = std::sqrt(grid.dt * sum2);
  n.linf = vmax;
  n.l2_or_inf = std::max(n.l2, n.linf);
  return n;
}

bool BoundReport::certified() const {
  for (const auto& a : assumptions)
    if (!a.satisfied) return false;
  return true;
}

namespace {
void check_nonneg(double v, const char* name) {
  if (v < 0.0 || std::isnan(v)) throw std::invalid_argument(std::string("negative input: ") + name);
}
}  // namespace

BoundReport bound_bilinear_delay(double trace_norm, double phi0_norm, const SignalNorms& u,
                                 const SignalNorms& v, bool volterra_ok, double q) {
  check_nonneg(trace_norm, "trace_norm");
  check_nonneg(phi0_norm, "phi0_norm");
  BoundReport rep;
  rep.trace_norm = trace_norm;
  const double init_term = phi0_norm * std::max(1.0, v.linf);
  const double control_term = std::max(u.l2, v.l1) * u.linf;
  rep.components["initial_state_term"] = 4.0 * trace_norm * init_term;
  rep.components["control_term"] = 4.0 * trace_norm * control_term;
  rep.bound_value = 4.0 * trace_norm * (init_term + control_term);
  rep.assumptions.push_back({"v_l2_le_1", v.l2 <= 1.0, 1.0 - v.l2});
  rep.assumptions.push_back({"volterra_contraction", volterra_ok, 1.0 - q});
  rep.assumptions.push_back({"u_v_in_H1 (assumed, not checkable from samples)", true, 0.0});
  return rep;
}

BoundReport bound_uncontrolled_delay(double trace_norm, double phi0_norm, const SignalNorms& u,
                                     double T0, bool volterra_scaled_ok, double q_scaled) {
  if (!(T0 > 0.0)) throw std::invalid_argument("bound_uncontrolled_delay: T0 must be positive");
  check_nonneg(trace_norm, "trace_norm");
  check_nonneg(phi0_norm, "phi0_norm");
  BoundReport rep;
  rep.trace_norm = trace_norm;
  const double init_term = phi0_norm * std::max(1.0, 1.0 / std::sqrt(T0));
  const double control_term = std::max(u.l2, std::sqrt(T0)) * u.linf;
  rep.components["initial_state_term"] = 4.0 * trace_norm * init_term;
  rep.components["control_term"] = 4.0 * trace_norm * control_term;
  rep.bound_value = 4.0 * trace_norm * (init_term + control_term);
  rep.assumptions.push_back(
      {"volterra_contraction_scaled_N", volterra_scaled_ok, 1.0 - q_scaled});
  rep.assumptions.push_back({"u_in_H1 (assumed, not checkable from samples)", true, 0.0});
  return rep;
}

BoundReport bound_sdde(double trace_norm, double xi_norm, double u_norm_linf_l2,
                       bool volterra_ok, double q) {
  check_nonneg(trace_norm, "trace_norm");
  check_nonneg(xi_norm, "xi_norm");
  check_nonneg(u_norm_linf_l2, "u_norm");
  BoundReport rep;
  rep.trace_norm = trace_norm;
  rep.components["initial_state_term"] = trace_norm * xi_norm;
  rep.components["control_term"] = trace_norm * 2.0 * u_norm_linf_l2;
  rep.bound_value = trace_norm * (xi_norm + 2.0 * u_norm_linf_l2);
  rep.assumptions.push_back({"volterra_contraction_both_systems", volterra_ok, 1.0 - q});
  return rep;
}

}  // namespace dbt
