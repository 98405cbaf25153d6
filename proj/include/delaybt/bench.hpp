#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "delaybt/balance.hpp"
#include "delaybt/bounds.hpp"
#include "delaybt/sim.hpp"
#include "delaybt/system.hpp"

namespace dbt {

struct GleUnstableError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Ring of linearized Stuart-Landau oscillators: A = alpha*I, N = circulant
/// nearest-neighbor shift, full actuation/observation defaults.
DelaySystem gen_stuart_landau(int d, double alpha, double tau);

/// Generalized Langevin chain with a fractional-Brownian memory kernel,
/// discretized to a single midpoint delay. State dimension 2*d_particles.
DelaySystem gen_gle(int d_particles, double hurst, double r_mem, double perturb_scale,
                    std::uint64_t seed);

/// Perturbed geometric Brownian motion with one delayed multiplicative noise
/// term; C observes the first r_obs coordinates at weight 1, the rest at 0.01.
DelaySystem gen_gbm(int d, int r_obs, double tau, double perturb_std, std::uint64_t seed);

enum class ExampleKind { StuartLandau, GLE, GBM, FromFile };

std::string to_string(ExampleKind k);

struct ExampleConfig {
  ExampleKind example = ExampleKind::StuartLandau;
  std::string path;  // FromFile: system manifest

  int d = 50;  // StuartLandau/GBM state dim; GLE particle count
  double alpha = -1.2;
  double hurst = 0.75;
  double r_mem = 0.2;
  double perturb_scale = 0.2;  // GLE; 0.2 keeps K positive definite at d=50
  double perturb_std = 0.01;   // GBM
  int r_obs = 10;              // GBM
  double xi_value = 0.1;       // GBM initial state xi = xi_value * 1

  double tau = 0.1;
  double T = 2.0;
  double dt = 0.01;
  std::vector<int> reduction_dims;
  int n_paths = 2000;
  std::uint64_t seed = 1;
  std::string u_form = "zero";  // zero | sin:<freq> | const:<c>
  std::string v_form = "none";
  double lyap_tol = kDefaultLyapTol;
  std::string noise = "independent";  // independent | common
  bool random_x0 = false;             // x0 ~ N(0, sqrt(0.5) I), from seed
  // Represent a SineAllOnes drive as a single effective input column before
  // reduction (exact for uniform drives; GLE only).
  bool collapse_uniform_input = true;

  static ExampleConfig defaults(ExampleKind k);
};

ExampleConfig load_config(const std::filesystem::path& path, ExampleKind k);

struct StudyRow {
  int r = 0;
  double hsv_tail_sum = 0.0;
  double trace_norm = 0.0;
  double bound = 0.0;
  double measured_error = 0.0;
  double measured_std_error = 0.0;
  bool certified = false;
};

struct StudyReport {
  ExampleConfig config;
  std::vector<StudyRow> rows;
  std::string run_manifest;  // JSON: config, seeds, estimated envelope, x0
  double envelope_M = 1.0;
  double envelope_omega = 0.0;
  double full_output_l2 = 0.0;  // denominator for relative-error readings
  Eigen::VectorXd hsv;  // full-model Hankel singular values
};

/// Reduce -> simulate -> bound -> compare over all requested reduction sizes.
StudyReport run_reduction_study(const ExampleConfig& cfg);

void write_study_csv(const StudyReport& rep, const std::filesystem::path& path);
void write_plot_script(const std::filesystem::path& csv_path,
                       const std::filesystem::path& script_path);

SignalSpec parse_control(const std::string& form, Eigen::Index dim);

}  // namespace dbt
