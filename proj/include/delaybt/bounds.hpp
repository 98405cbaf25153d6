#pragma once

#include <map>
#include <string>
#include <vector>

#include "delaybt/grid.hpp"
#include "delaybt/system.hpp"

namespace dbt {

struct SignalNorms {
  double l1 = 0.0;
  double l2 = 0.0;
  double linf = 0.0;
  double l2_or_inf = 0.0;  // max(l2, linf)
  double T = 0.0;
};

/// Rectangle-rule L1/L2 and grid-max Linf of a signal over [0, T].
SignalNorms signal_norms(const SignalSpec& u, const Grid& grid);

struct Assumption {
  std::string name;
  bool satisfied = false;
  double margin = 0.0;
};

struct BoundReport {
  double trace_norm = 0.0;
  double bound_value = 0.0;
  std::map<std::string, double> components;
  std::vector<Assumption> assumptions;

  /// All theorem hypotheses hold; a failed hypothesis never blocks evaluation.
  bool certified() const;
};

/// Deterministic/bilinear output-error bound
///   4 * tn * ( ||phi0|| * max{1, ||v||_inf} + max{||u||_2, ||v||_1} * ||u||_inf ).
BoundReport bound_bilinear_delay(double trace_norm, double phi0_norm, const SignalNorms& u,
                                 const SignalNorms& v, bool volterra_ok, double q = 0.0);

/// Uncontrolled-delay corollary (v = T0^{-1/2}, N scaled by sqrt(T0)):
///   4 * tn * ( ||phi0|| * max{1, T0^{-1/2}} + max{||u||_2, sqrt(T0)} * ||u||_inf ).
BoundReport bound_uncontrolled_delay(double trace_norm, double phi0_norm, const SignalNorms& u,
                                     double T0, bool volterra_scaled_ok, double q_scaled = 0.0);

/// SDDE output-error bound: tn * ( ||xi|| + 2 * ||u|| ). For deterministic
/// controls the L^inf_omega L^2_t norm reduces to the plain L2 norm.
BoundReport bound_sdde(double trace_norm, double xi_norm, double u_norm_linf_l2,
                       bool volterra_ok, double q = 0.0);

}  // namespace dbt
