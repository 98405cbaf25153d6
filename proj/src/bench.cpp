#include "delaybt/bench.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "delaybt/io.hpp"
#include "delaybt/rng.hpp"
#include "delaybt/stability.hpp"
#include "json.hpp"

namespace dbt {

namespace {

Eigen::MatrixXd draw_matrix(NormalStream& ns, Eigen::Index rows, Eigen::Index cols) {
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = ns.normal();
  return m;
}

// Symmetric PSD square root via eigendecomposition.
Eigen::MatrixXd sqrtm_spd(const Eigen::MatrixXd& M) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);
  return es.operatorSqrt();
}

DelaySystem scale_delay_matrices(DelaySystem sys, double factor) {
  for (auto& t : sys.delays) t.N *= factor;
  return sys;
}

}  // namespace

DelaySystem gen_stuart_landau(int d, double alpha, double tau) {
  if (d < 2) throw std::invalid_argument("gen_stuart_landau: d must be >= 2");
  if (!(alpha < 0.0)) throw std::invalid_argument("gen_stuart_landau: alpha must be negative");
  DelaySystem sys;
  sys.A = alpha * Eigen::MatrixXd::Identity(d, d);
  Eigen::MatrixXd N = Eigen::MatrixXd::Zero(d, d);
  for (int j = 0; j < d; ++j) N(j, (j + 1) % d) = 1.0;  // x_j <- x_{(j+1) mod d}
  sys.delays.push_back({N, tau});
  sys.B = Eigen::MatrixXd::Identity(d, d);
  sys.B_in = Eigen::MatrixXd::Identity(d, d);
  sys.C = Eigen::MatrixXd::Identity(d, d);
  sys.kind = SystemKind::DeterministicDelay;
  require_valid(sys);
  return sys;
}

DelaySystem gen_gle(int d_particles, double hurst, double r_mem, double perturb_scale,
                    std::uint64_t seed) {
  if (!(hurst > 0.5 && hurst < 1.0))
    throw std::invalid_argument("gen_gle: hurst must lie in (1/2, 1)");
  if (!(r_mem > 0.0)) throw std::invalid_argument("gen_gle: r_mem must be positive");
  const int dp = d_particles;
  NormalStream ns(seed);

  Eigen::MatrixXd M, F, K;
  bool ok = false;
  for (int attempt = 0; attempt < 10 && !ok; ++attempt) {
    const Eigen::VectorXd a = draw_matrix(ns, dp, 1);
    const Eigen::VectorXd ap = draw_matrix(ns, dp, 1);
    const Eigen::MatrixXd aij = draw_matrix(ns, dp, dp);
    M = Eigen::MatrixXd::Identity(dp, dp) + perturb_scale * 0.1 * a.asDiagonal().toDenseMatrix();
    F = Eigen::MatrixXd::Identity(dp, dp) + perturb_scale * 0.1 * ap.asDiagonal().toDenseMatrix();
    const Eigen::MatrixXd absHalf = 0.5 * aij.array().abs().matrix();
    K = Eigen::MatrixXd::Identity(dp, dp) +
        perturb_scale * 0.5 * (absHalf + absHalf.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> esK(K), esM(M);
    ok = esK.eigenvalues()(0) > 0.0 && esM.eigenvalues()(0) > 0.0;
  }
  if (!ok)
    throw GleUnstableError("gen_gle: K or M not positive definite after 10 resamples");

  const Eigen::MatrixXd L1 = sqrtm_spd(K);
  const Eigen::MatrixXd L2 = sqrtm_spd(M);
  const Eigen::MatrixXd L2inv = L2.inverse();

  DelaySystem sys;
  const int d = 2 * dp;
  sys.A = Eigen::MatrixXd::Zero(d, d);
  sys.A.topRightCorner(dp, dp) = L1 * L2inv;  // L1^T L2^{-T}, both symmetric
  sys.A.bottomLeftCorner(dp, dp) = -L2inv * L1;
  sys.A.bottomRightCorner(dp, dp) = -L2inv * F * L2inv;

  const double gamma = std::pow(r_mem / 2.0, 2.0 * (hurst - 1.0));
  Eigen::MatrixXd N = Eigen::MatrixXd::Zero(d, d);
  N.bottomRightCorner(dp, dp) = r_mem * gamma * Eigen::MatrixXd::Identity(dp, dp);
  sys.delays.push_back({N, r_mem / 2.0});

  sys.B = Eigen::MatrixXd::Zero(d, d);
  sys.B.bottomRightCorner(dp, dp).setIdentity();
  sys.B_in = Eigen::MatrixXd::Identity(d, d);
  sys.C = Eigen::MatrixXd::Identity(d, d);
  sys.kind = SystemKind::DeterministicDelay;
  require_valid(sys);

  if (spectral_abscissa(sys.A) >= -kStabilityMargin)
    throw GleUnstableError("gen_gle: drift matrix A is not Hurwitz-stable");
  return sys;
}

DelaySystem gen_gbm(int d, int r_obs, double tau, double perturb_std, std::uint64_t seed) {
  if (d < 1 || r_obs < 1 || r_obs > d)
    throw std::invalid_argument("gen_gbm: need d >= r_obs >= 1");
  NormalStream ns(seed);
  DelaySystem sys;
  sys.A = -Eigen::MatrixXd::Identity(d, d) + perturb_std * draw_matrix(ns, d, d);
  sys.B = Eigen::MatrixXd::Identity(d, d) + perturb_std * draw_matrix(ns, d, d);
  Eigen::MatrixXd N =
      Eigen::MatrixXd::Identity(d, d) + perturb_std * draw_matrix(ns, d, d);
  sys.delays.push_back({N, tau});
  Eigen::VectorXd c = Eigen::VectorXd::Constant(d, 0.01);
  c.head(r_obs).setOnes();
  sys.C = c.asDiagonal();
  sys.B_in = Eigen::MatrixXd::Identity(d, d);
  sys.kind = SystemKind::StochasticDelay;
  require_valid(sys);
  return sys;
}

std::string to_string(ExampleKind k) {
  switch (k) {
    case ExampleKind::StuartLandau: return "stuart-landau";
    case ExampleKind::GLE: return "gle";
    case ExampleKind::GBM: return "gbm";
    case ExampleKind::FromFile: return "from-file";
  }
  return "?";
}

ExampleConfig ExampleConfig::defaults(ExampleKind k) {
  ExampleConfig c;
  c.example = k;
  switch (k) {
    case ExampleKind::StuartLandau:
      c.d = 50;
      c.T = 2.0;
      c.dt = 0.01;
      c.reduction_dims = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12};
      c.u_form = "zero";
      c.random_x0 = true;
      break;
    case ExampleKind::GLE:
      c.d = 50;  // particles; state dimension 100
      c.T = 10.0;
      c.dt = 0.005;
      c.reduction_dims = {10};
      c.u_form = "sin:20";
      break;
    case ExampleKind::GBM:
      c.d = 40;
      c.T = 2.0;
      c.dt = 0.01;
      c.n_paths = 2000;
      c.reduction_dims = {5, 10, 20, 30};
      c.u_form = "sin:20";
      break;
    case ExampleKind::FromFile:
      c.T = 2.0;
      c.dt = 0.01;
      c.reduction_dims = {2};
      break;
  }
  return c;
}

SignalSpec parse_control(const std::string& form, Eigen::Index dim) {
  if (form.empty() || form == "zero" || form == "none") return SignalSpec::zero(dim);
  if (form.rfind("sin:", 0) == 0)
    return SignalSpec::sine_all_ones(std::stod(form.substr(4)), dim);
  if (form.rfind("const:", 0) == 0)
    return SignalSpec::constant_signal(
        Eigen::VectorXd::Constant(dim, std::stod(form.substr(6))));
  throw std::invalid_argument("unknown control form: " + form +
                              " (expected zero | sin:<freq> | const:<c>)");
}

ExampleConfig load_config(const std::filesystem::path& path, ExampleKind k) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config: " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw IoError("malformed config " + path.string() + ": " + e.what());
  }
  if (j.contains("example")) {
    const std::string s = j["example"];
    if (s == "stuart-landau") k = ExampleKind::StuartLandau;
    else if (s == "gle") k = ExampleKind::GLE;
    else if (s == "gbm") k = ExampleKind::GBM;
    else if (s == "from-file") k = ExampleKind::FromFile;
    else throw IoError("unknown example kind in config: " + s);
  }
  ExampleConfig c = ExampleConfig::defaults(k);
  c.path = j.value("path", c.path);
  c.d = j.value("d", c.d);
  c.alpha = j.value("alpha", c.alpha);
  c.hurst = j.value("hurst", c.hurst);
  c.r_mem = j.value("r_mem", c.r_mem);
  c.perturb_scale = j.value("perturb_scale", c.perturb_scale);
  c.perturb_std = j.value("perturb_std", c.perturb_std);
  c.r_obs = j.value("r_obs", c.r_obs);
  c.xi_value = j.value("xi_value", c.xi_value);
  c.tau = j.value("tau", c.tau);
  c.T = j.value("T", c.T);
  c.dt = j.value("dt", c.dt);
  if (j.contains("reduction_dims"))
    c.reduction_dims = j["reduction_dims"].get<std::vector<int>>();
  c.n_paths = j.value("n_paths", c.n_paths);
  c.seed = j.value("seed", c.seed);
  c.u_form = j.value("u_form", c.u_form);
  c.v_form = j.value("v_form", c.v_form);
  c.lyap_tol = j.value("lyap_tol", c.lyap_tol);
  c.noise = j.value("noise", c.noise);
  c.random_x0 = j.value("random_x0", c.random_x0);
  c.collapse_uniform_input = j.value("collapse_uniform_input", c.collapse_uniform_input);
  return c;
}

namespace {

DelaySystem build_example(const ExampleConfig& cfg) {
  switch (cfg.example) {
    case ExampleKind::StuartLandau:
      return gen_stuart_landau(cfg.d, cfg.alpha, cfg.tau);
    case ExampleKind::GLE:
      return gen_gle(cfg.d, cfg.hurst, cfg.r_mem, cfg.perturb_scale, cfg.seed);
    case ExampleKind::GBM:
      return gen_gbm(cfg.d, cfg.r_obs, cfg.tau, cfg.perturb_std, cfg.seed);
    case ExampleKind::FromFile:
      return load_system(cfg.path);
  }
  throw std::logic_error("unreachable example kind");
}

Eigen::VectorXd initial_state(const ExampleConfig& cfg, const DelaySystem& sys) {
  const Eigen::Index d = sys.dim();
  if (cfg.example == ExampleKind::GBM)
    return Eigen::VectorXd::Constant(d, cfg.xi_value);
  if (cfg.random_x0) {
    NormalStream ns(cfg.seed ^ 0x5151515151515151ULL);
    Eigen::VectorXd x0(d);
    for (Eigen::Index i = 0; i < d; ++i) x0(i) = std::sqrt(0.5) * ns.normal();
    return x0;
  }
  return Eigen::VectorXd::Zero(d);
}

}  // namespace

StudyReport run_reduction_study(const ExampleConfig& cfg) {
  StudyReport rep;
  rep.config = cfg;

  DelaySystem sys = build_example(cfg);
  SignalSpec u = parse_control(cfg.u_form, sys.n_controls());

  // A spatially uniform sine drive excites only the single direction B*1; fold
  // it into one effective input column so the Gramian weighs exactly that
  // direction instead of the whole (possibly full-rank) B.
  if (cfg.example == ExampleKind::GLE && cfg.collapse_uniform_input &&
      u.form == SignalSpec::Form::SineAllOnes && sys.n_controls() > 1) {
    sys.B = (sys.B * Eigen::VectorXd::Ones(sys.n_controls())).eval();
    u = SignalSpec::sine_all_ones(u.freq, 1);
  }

  const bool stochastic = sys.kind == SystemKind::StochasticDelay;
  const bool bilinear_path =
      sys.kind == SystemKind::BilinearDelay || (cfg.v_form != "none" && !cfg.v_form.empty());
  const GramianVariant variant =
      stochastic ? GramianVariant::SddeRule : GramianVariant::BilinearRule;
  const Grid grid = Grid::from_horizon(cfg.T, cfg.dt);
  const HistorySpec hist = HistorySpec::zero();

  const GramianPair gram = compute_gramians(sys, variant, cfg.lyap_tol);
  const BalancedRealization bal = balance_transform(sys, gram);
  rep.hsv = bal.hsv;

  const Envelope env = semigroup_envelope(sys.A);
  rep.envelope_M = env.M;
  rep.envelope_omega = env.omega;

  const Eigen::VectorXd x0 = initial_state(cfg, sys);
  SignalSpec v = bilinear_path ? parse_control(cfg.v_form, 1) : SignalSpec::zero(1);

  TrajectoryEnsemble full;
  if (stochastic)
    full = simulate_sdde(sys, u, InitialState::state(x0), hist, grid, cfg.n_paths,
                         cfg.noise == "common" ? NoiseMode::Common : NoiseMode::Independent,
                         cfg.seed);
  else if (bilinear_path)
    full = simulate_bilinear_dde(sys, u, v, InitialState::state(x0), hist, grid);
  else
    full = simulate_dde(sys, u, InitialState::state(x0), hist, grid);
  rep.full_output_l2 = l2_output_norm(full);

  const SignalNorms u_norms = signal_norms(u, grid);
  const SignalNorms v_norms = signal_norms(v, grid);

  std::vector<int> dims = cfg.reduction_dims;
  std::sort(dims.begin(), dims.end());

  for (int r : dims) {
    if (r < 1 || r > bal.hsv.size())
      throw std::invalid_argument("run_reduction_study: reduction dim " + std::to_string(r) +
                                  " outside [1, " + std::to_string(bal.hsv.size()) + "]");
    StudyRow row;
    row.r = r;
    const ReducedModel red = truncate(bal, r);
    row.hsv_tail_sum = red.hsv_tail.sum();
    const Eigen::VectorXd x0r = red.transform * x0;

    TrajectoryEnsemble redtraj;
    if (stochastic) {
      const std::uint64_t red_seed = cfg.noise == "common" ? cfg.seed : cfg.seed + 1;
      redtraj = simulate_sdde(red.sys, u, InitialState::state(x0r), hist, grid, cfg.n_paths,
                              cfg.noise == "common" ? NoiseMode::Common : NoiseMode::Independent,
                              red_seed);
    } else if (bilinear_path) {
      redtraj = simulate_bilinear_dde(red.sys, u, v, InitialState::state(x0r), hist, grid);
    } else {
      redtraj = simulate_dde(red.sys, u, InitialState::state(x0r), hist, grid);
    }
    const ErrorEstimate err = l2_output_error(full, redtraj);
    row.measured_error = err.value;
    row.measured_std_error = err.std_error;

    const double phi0_norm = std::sqrt(x0.squaredNorm() + x0r.squaredNorm());
    try {
      BoundReport brep;
      if (stochastic) {
        const HankelSpectrum hank = error_hankel(sys, red.sys, variant, cfg.lyap_tol);
        row.trace_norm = hank.trace_norm;
        const DelaySystem esys = build_error_system(sys, red.sys);
        const Envelope eenv = semigroup_envelope(esys.A);
        std::vector<Eigen::MatrixXd> Ns;
        for (const auto& t : esys.delays) Ns.push_back(t.N);
        const VolterraCheck vol = check_volterra(eenv.M, eenv.omega, Ns);
        brep = bound_sdde(hank.trace_norm, phi0_norm, u_norms.l2, vol.ok, vol.q);
      } else if (bilinear_path) {
        const HankelSpectrum hank = error_hankel(sys, red.sys, variant, cfg.lyap_tol);
        row.trace_norm = hank.trace_norm;
        const DelaySystem esys = build_error_system(sys, red.sys);
        const Envelope eenv = semigroup_envelope(esys.A);
        std::vector<Eigen::MatrixXd> Ns;
        for (const auto& t : esys.delays) Ns.push_back(t.N);
        const VolterraCheck vol = check_volterra(eenv.M, eenv.omega, Ns);
        brep = bound_bilinear_delay(hank.trace_norm, phi0_norm, u_norms, v_norms, vol.ok, vol.q);
      } else {
        // Uncontrolled/autonomous-delay corollary: the certificate uses the
        // error system with N scaled by sqrt(T0), T0 = T.
        const double s = std::sqrt(cfg.T);
        const DelaySystem fs = scale_delay_matrices(sys, s);
        const DelaySystem rs = scale_delay_matrices(red.sys, s);
        const HankelSpectrum hank = error_hankel(fs, rs, variant, cfg.lyap_tol);
        row.trace_norm = hank.trace_norm;
        const DelaySystem esys = build_error_system(fs, rs);
        const Envelope eenv = semigroup_envelope(esys.A);
        std::vector<Eigen::MatrixXd> Ns;
        for (const auto& t : esys.delays) Ns.push_back(t.N);
        const VolterraCheck vol = check_volterra(eenv.M, eenv.omega, Ns);
        brep = bound_uncontrolled_delay(hank.trace_norm, phi0_norm, u_norms, cfg.T, vol.ok,
                                        vol.q);
      }
      row.bound = brep.bound_value;
      row.certified = brep.certified() && std::isfinite(row.bound);
    } catch (const NoConvergenceError&) {
      // Bound-side Gramian iteration diverged (scaled contraction factor >= 1);
      // the reduction itself is still usable, just uncertified.
      row.trace_norm = std::numeric_limits<double>::infinity();
      row.bound = std::numeric_limits<double>::infinity();
      row.certified = false;
    }
    rep.rows.push_back(row);
  }

  nlohmann::json man;
  man["example"] = to_string(cfg.example);
  man["d"] = static_cast<int>(sys.dim());
  man["alpha"] = cfg.alpha;
  man["hurst"] = cfg.hurst;
  man["r_mem"] = cfg.r_mem;
  man["perturb_scale"] = cfg.perturb_scale;
  man["perturb_std"] = cfg.perturb_std;
  man["r_obs"] = cfg.r_obs;
  man["xi_value"] = cfg.xi_value;
  man["tau"] = cfg.tau;
  man["T"] = cfg.T;
  man["dt"] = cfg.dt;
  man["reduction_dims"] = dims;
  man["n_paths"] = cfg.n_paths;
  man["seed"] = cfg.seed;
  man["u_form"] = cfg.u_form;
  man["v_form"] = cfg.v_form;
  man["noise"] = cfg.noise;
  man["envelope_M"] = env.M;
  man["envelope_omega"] = env.omega;
  man["x0"] = std::vector<double>(x0.data(), x0.data() + x0.size());
  rep.run_manifest = man.dump(2);
  return rep;
}

void write_study_csv(const StudyReport& rep, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out << "example,d,r,dt,T,n_paths,seed,trace_norm,bound,measured_error,"
         "measured_std_error,certified\n";
  const ExampleConfig& c = rep.config;
  const int n_paths = c.example == ExampleKind::GBM ? c.n_paths : 1;
  const int d = c.example == ExampleKind::GLE ? 2 * c.d : c.d;
  char buf[256];
  for (const auto& row : rep.rows) {
    std::snprintf(buf, sizeof(buf), "%s,%d,%d,%.12g,%.12g,%d,%llu,%.17g,%.17g,%.17g,%.17g,%d\n",
                  to_string(c.example).c_str(), d, row.r, c.dt, c.T, n_paths,
                  static_cast<unsigned long long>(c.seed), row.trace_norm, row.bound,
                  row.measured_error, row.measured_std_error, row.certified ? 1 : 0);
    out << buf;
  }
}

void write_plot_script(const std::filesystem::path& csv_path,
                       const std::filesystem::path& script_path) {
  std::ofstream out(script_path);
  if (!out) throw IoError("cannot open for writing: " + script_path.string());
  out << "#!/usr/bin/env python3\n"
         "\"\"\"Plot L2 output errors and their a-priori bounds against r.\"\"\"\n"
         "import csv\n"
         "import sys\n"
         "\n"
         "import matplotlib\n"
         "matplotlib.use(\"Agg\")\n"
         "import matplotlib.pyplot as plt\n"
         "\n"
         "csv_path = sys.argv[1] if len(sys.argv) > 1 else \""
      << csv_path.string()
      << "\"\n"
         "rows = list(csv.DictReader(open(csv_path)))\n"
         "if not rows:\n"
         "    sys.exit(\"no rows in \" + csv_path)\n"
         "r = [int(x[\"r\"]) for x in rows]\n"
         "err = [float(x[\"measured_error\"]) for x in rows]\n"
         "se = [float(x[\"measured_std_error\"]) for x in rows]\n"
         "bound = [float(x[\"bound\"]) for x in rows]\n"
         "fig, ax = plt.subplots(figsize=(6, 4))\n"
         "ax.errorbar(r, err, yerr=[3 * s for s in se], marker=\"o\", label=\"measured L2 "
         "error\")\n"
         "if any(b != float(\"inf\") for b in bound):\n"
         "    ax.plot(r, bound, marker=\"s\", label=\"a-priori bound\")\n"
         "ax.set_yscale(\"log\")\n"
         "ax.set_xlabel(\"reduced dimension r\")\n"
         "ax.set_ylabel(\"L2 output error\")\n"
         "ax.set_title(rows[0][\"example\"])\n"
         "ax.grid(True, which=\"both\", alpha=0.3)\n"
         "ax.legend()\n"
         "out = csv_path.rsplit(\".\", 1)[0] + \".png\"\n"
         "fig.savefig(out, dpi=150, bbox_inches=\"tight\")\n"
         "print(\"wrote\", out)\n";
}

}  // namespace dbt
