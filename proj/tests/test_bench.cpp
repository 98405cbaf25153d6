#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <Eigen/Eigenvalues>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "delaybt/bench.hpp"
#include "delaybt/stability.hpp"
#include "doctest.h"

using namespace dbt;

TEST_CASE("gen_stuart_landau: circulant shift structure") {
  const DelaySystem sys = gen_stuart_landau(3, -1.2, 0.1);
  CHECK(is_valid(sys));
  const Eigen::MatrixXd& N = sys.delays[0].N;
  CHECK(N(0, 1) == 1.0);
  CHECK(N(1, 2) == 1.0);
  CHECK(N(2, 0) == 1.0);
  CHECK(N.sum() == 3.0);  // no other entries
  CHECK(spectral_norm(N) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK((sys.A + 1.2 * Eigen::MatrixXd::Identity(3, 3)).norm() == 0.0);

  const DelaySystem big = gen_stuart_landau(50, -1.2, 0.1);
  CHECK(spectral_abscissa(big.A) == doctest::Approx(-1.2));
  CHECK_THROWS_AS(gen_stuart_landau(1, -1.0, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(gen_stuart_landau(3, 0.5, 0.1), std::invalid_argument);
}

TEST_CASE("gen_gle: unperturbed limit and memory-kernel weight") {
  const DelaySystem sys = gen_gle(4, 0.75, 0.2, 0.0, 1);
  CHECK(sys.dim() == 8);
  CHECK(is_valid(sys));
  // perturb_scale = 0: A = [[0, I], [-I, -I]] with eigenvalues -1/2 +- i sqrt(3)/2
  Eigen::MatrixXd ref = Eigen::MatrixXd::Zero(8, 8);
  ref.topRightCorner(4, 4).setIdentity();
  ref.bottomLeftCorner(4, 4) = -Eigen::MatrixXd::Identity(4, 4);
  ref.bottomRightCorner(4, 4) = -Eigen::MatrixXd::Identity(4, 4);
  CHECK((sys.A - ref).norm() <= 1e-12);
  const auto ev = sys.A.eigenvalues();
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    CHECK(ev(i).real() == doctest::Approx(-0.5).epsilon(1e-9));
    CHECK(std::abs(ev(i).imag()) == doctest::Approx(std::sqrt(3.0) / 2.0).epsilon(1e-9));
  }

  // N_eff = r * gamma(r/2) * diag(0, I) with gamma(0.1) = 0.1^{-1/2}
  CHECK(sys.delays[0].tau == doctest::Approx(0.1));
  const double w = 0.2 * std::pow(0.1, -0.5);
  CHECK(sys.delays[0].N.topLeftCorner(4, 4).norm() == 0.0);
  CHECK((sys.delays[0].N.bottomRightCorner(4, 4) - w * Eigen::MatrixXd::Identity(4, 4))
            .norm() <= 1e-12);
  CHECK(w == doctest::Approx(0.6325).epsilon(1e-3));

  // B = diag(0, I)
  CHECK(sys.B.topRows(4).norm() == 0.0);
  CHECK((sys.B.bottomRightCorner(4, 4) - Eigen::MatrixXd::Identity(4, 4)).norm() == 0.0);
}

TEST_CASE("gen_gle: determinism and stability check") {
  const DelaySystem a = gen_gle(6, 0.75, 0.2, 0.2, 11);
  const DelaySystem b = gen_gle(6, 0.75, 0.2, 0.2, 11);
  CHECK((a.A - b.A).norm() == 0.0);
  const DelaySystem c = gen_gle(6, 0.75, 0.2, 0.2, 12);
  CHECK((a.A - c.A).norm() > 0.0);
  CHECK(spectral_abscissa(a.A) < 0.0);
  CHECK_THROWS_AS(gen_gle(4, 0.4, 0.2, 0.1, 1), std::invalid_argument);
  CHECK_THROWS_AS(gen_gle(4, 0.75, -1.0, 0.1, 1), std::invalid_argument);
}

TEST_CASE("gen_gbm: unperturbed limit, observation weights, determinism") {
  const DelaySystem exact = gen_gbm(5, 2, 0.1, 0.0, 1);
  CHECK((exact.A + Eigen::MatrixXd::Identity(5, 5)).norm() == 0.0);
  CHECK((exact.B - Eigen::MatrixXd::Identity(5, 5)).norm() == 0.0);
  CHECK((exact.delays[0].N - Eigen::MatrixXd::Identity(5, 5)).norm() == 0.0);
  CHECK(exact.kind == SystemKind::StochasticDelay);

  const DelaySystem sys = gen_gbm(40, 10, 0.1, 0.01, 3);
  CHECK(is_valid(sys));
  int unit = 0, small = 0;
  for (int i = 0; i < 40; ++i) {
    if (sys.C(i, i) == 1.0) ++unit;
    if (sys.C(i, i) == 0.01) ++small;
  }
  CHECK(unit == 10);
  CHECK(small == 30);
  CHECK(sys.C.sum() == doctest::Approx(10.0 + 0.3));  // diagonal only

  CHECK((sys.A - gen_gbm(40, 10, 0.1, 0.01, 3).A).norm() == 0.0);
  CHECK_THROWS_AS(gen_gbm(5, 6, 0.1, 0.01, 1), std::invalid_argument);
}

TEST_CASE("parse_control understands the documented forms") {
  CHECK(parse_control("zero", 3).is_zero());
  CHECK(parse_control("", 3).is_zero());
  auto s = parse_control("sin:20", 2);
  CHECK(s.form == SignalSpec::Form::SineAllOnes);
  CHECK(s.freq == 20.0);
  auto c = parse_control("const:1.5", 2);
  CHECK(c.eval(0, 0.0) == Eigen::Vector2d(1.5, 1.5));
  CHECK_THROWS_AS(parse_control("ramp", 1), std::invalid_argument);
}

TEST_CASE("example defaults match the benchmark configurations") {
  auto sl = ExampleConfig::defaults(ExampleKind::StuartLandau);
  CHECK(sl.d == 50);
  CHECK(sl.alpha == -1.2);
  CHECK(sl.T == 2.0);
  CHECK(sl.dt == 0.01);
  CHECK(sl.reduction_dims.size() == 12);
  CHECK(sl.random_x0);

  auto gle = ExampleConfig::defaults(ExampleKind::GLE);
  CHECK(gle.T == 10.0);
  CHECK(gle.u_form == "sin:20");

  auto gbm = ExampleConfig::defaults(ExampleKind::GBM);
  CHECK(gbm.d == 40);
  CHECK(gbm.r_obs == 10);
  CHECK(gbm.n_paths == 2000);
  CHECK(gbm.xi_value == 0.1);
}

TEST_CASE("load_config overrides defaults from JSON") {
  const auto path = std::filesystem::temp_directory_path() / "delaybt_cfg.json";
  {
    std::ofstream out(path);
    out << R"({"example": "gbm", "d": 12, "n_paths": 50, "reduction_dims": [2, 4],
               "seed": 9, "u_form": "zero"})";
  }
  auto cfg = load_config(path, ExampleKind::StuartLandau);
  CHECK(cfg.example == ExampleKind::GBM);
  CHECK(cfg.d == 12);
  CHECK(cfg.n_paths == 50);
  CHECK(cfg.reduction_dims == std::vector<int>{2, 4});
  CHECK(cfg.seed == 9);
  CHECK(cfg.u_form == "zero");
  CHECK(cfg.r_obs == 10);  // untouched default
  std::filesystem::remove(path);

  {
    std::ofstream out(path);
    out << "{ broken";
  }
  CHECK_THROWS(load_config(path, ExampleKind::GLE));
  std::filesystem::remove(path);
}

TEST_CASE("run_reduction_study on a small Stuart-Landau ring") {
  ExampleConfig cfg = ExampleConfig::defaults(ExampleKind::StuartLandau);
  cfg.d = 8;
  cfg.T = 1.0;
  cfg.reduction_dims = {4, 2};  // unsorted on purpose
  cfg.seed = 5;
  auto rep = run_reduction_study(cfg);

  REQUIRE(rep.rows.size() == 2);
  CHECK(rep.rows[0].r == 2);  // sorted ascending
  CHECK(rep.rows[1].r == 4);
  for (const auto& row : rep.rows) {
    CHECK(row.measured_error >= 0.0);
    CHECK(row.trace_norm >= 0.0);
    CHECK(row.bound >= row.trace_norm * 0.0);
  }
  CHECK(rep.rows[0].hsv_tail_sum >= rep.rows[1].hsv_tail_sum);  // nonincreasing in r
  CHECK(rep.hsv.size() > 0);
  CHECK(rep.envelope_M >= 1.0);
  CHECK(rep.envelope_omega > 0.0);
  CHECK(rep.full_output_l2 > 0.0);
  CHECK(rep.run_manifest.find("envelope_M") != std::string::npos);

  // bit-exact reproducibility of all numeric columns
  auto rep2 = run_reduction_study(cfg);
  for (size_t i = 0; i < rep.rows.size(); ++i) {
    CHECK(rep.rows[i].trace_norm == rep2.rows[i].trace_norm);
    CHECK(rep.rows[i].bound == rep2.rows[i].bound);
    CHECK(rep.rows[i].measured_error == rep2.rows[i].measured_error);
  }

  ExampleConfig bad = cfg;
  bad.reduction_dims = {99};
  CHECK_THROWS_AS(run_reduction_study(bad), std::invalid_argument);
}

TEST_CASE("study CSV and plot script are written") {
  ExampleConfig cfg = ExampleConfig::defaults(ExampleKind::StuartLandau);
  cfg.d = 6;
  cfg.T = 1.0;
  cfg.reduction_dims = {3};
  auto rep = run_reduction_study(cfg);

  const auto dir = std::filesystem::temp_directory_path() / "delaybt_study";
  std::filesystem::create_directories(dir);
  write_study_csv(rep, dir / "study.csv");
  write_plot_script(dir / "study.csv", dir / "plot.py");

  std::ifstream in(dir / "study.csv");
  std::string header;
  std::getline(in, header);
  CHECK(header ==
        "example,d,r,dt,T,n_paths,seed,trace_norm,bound,measured_error,"
        "measured_std_error,certified");
  int rows = 0;
  for (std::string line; std::getline(in, line);) ++rows;
  CHECK(rows == 1);
  CHECK(std::filesystem::exists(dir / "plot.py"));
  std::filesystem::remove_all(dir);
}
