#pragma once

#include <stdexcept>

namespace dbt {

/// Uniform time grid t_j = j*dt, j = 0..steps.
struct Grid {
  double dt = 0.0;
  long steps = 0;

  double T() const { return dt * static_cast<double>(steps); }

  static Grid from_horizon(double T, double dt) {
    if (!(dt > 0.0) || !(T > 0.0)) throw std::invalid_argument("grid: T and dt must be positive");
    long steps = static_cast<long>(T / dt + 0.5);
    if (steps < 1) throw std::invalid_argument("grid: empty grid");
    return Grid{dt, steps};
  }
};

}  // namespace dbt
