#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>

#include "delaybt/io.hpp"
#include "delaybt/system.hpp"
#include "doctest.h"

using namespace dbt;

namespace {

DelaySystem make_valid(int d = 2) {
  DelaySystem sys;
  sys.A = -Eigen::MatrixXd::Identity(d, d);
  sys.delays.push_back({0.3 * Eigen::MatrixXd::Identity(d, d), 0.1});
  sys.B = Eigen::MatrixXd::Identity(d, d);
  sys.B_in = Eigen::MatrixXd::Identity(d, d);
  sys.C = Eigen::MatrixXd::Identity(d, d);
  return sys;
}

bool has_code(const ValidationReport& rep, const std::string& code) {
  for (const auto& v : rep)
    if (v.code == code) return true;
  return false;
}

}  // namespace

TEST_CASE("well-formed system validates clean") {
  CHECK(validate_system(make_valid()).empty());
  CHECK(is_valid(make_valid()));
}

TEST_CASE("duplicate delay is reported") {
  DelaySystem sys = make_valid();
  sys.delays.push_back({0.1 * Eigen::MatrixXd::Identity(2, 2), 0.1});
  CHECK(has_code(validate_system(sys), "duplicate delay"));
}

TEST_CASE("wrong B row count is reported") {
  DelaySystem sys = make_valid();
  sys.B = Eigen::MatrixXd::Identity(3, 2);
  CHECK(has_code(validate_system(sys), "dimension mismatch"));
  CHECK_THROWS_AS(require_valid(sys), std::invalid_argument);
}

TEST_CASE("nonpositive delay and nonfinite entries are reported") {
  DelaySystem sys = make_valid();
  sys.delays[0].tau = 0.0;
  sys.A(0, 0) = std::numeric_limits<double>::quiet_NaN();
  const auto rep = validate_system(sys);
  CHECK(has_code(rep, "nonpositive delay"));
  CHECK(has_code(rep, "nonfinite entries"));
}

TEST_CASE("empty system is reported") {
  DelaySystem sys;
  CHECK(has_code(validate_system(sys), "empty system"));
}

TEST_CASE("validate_system is pure") {
  DelaySystem sys = make_valid();
  sys.delays[0].tau = -1.0;
  const auto a = validate_system(sys);
  const auto b = validate_system(sys);
  REQUIRE(a.size() == b.size());
  for (size_t i = 0; i < a.size(); ++i) CHECK(a[i].code == b[i].code);
}

TEST_CASE("signal spec forms evaluate as specified") {
  CHECK(SignalSpec::zero(3).eval(0, 1.0).isZero());
  const Eigen::VectorXd c = Eigen::Vector2d(1.0, -2.0);
  CHECK(SignalSpec::constant_signal(c).eval(5, 0.3) == c);
  const auto s = SignalSpec::sine_all_ones(20.0, 2);
  CHECK(s.eval(0, 0.25)(0) == doctest::Approx(std::sin(5.0)));
  CHECK(s.eval(0, 0.25)(1) == doctest::Approx(std::sin(5.0)));
  Eigen::MatrixXd vals(3, 1);
  vals << 1.0, 2.0, 3.0;
  const auto sp = SignalSpec::sampled(vals);
  CHECK(sp.eval(2, 0.0)(0) == 3.0);
  CHECK_THROWS_AS(sp.eval(3, 0.0), std::out_of_range);
  vals(1, 0) = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(SignalSpec::sampled(vals), std::invalid_argument);
}

TEST_CASE("history lookup counts back from zero") {
  CHECK(HistorySpec::zero().eval(-3, 2).isZero());
  Eigen::MatrixXd vals(2, 1);
  vals << 10.0, 20.0;  // t = -2dt, -dt
  const auto h = HistorySpec::sampled(vals);
  CHECK(h.eval(-1, 1)(0) == 20.0);
  CHECK(h.eval(-2, 1)(0) == 10.0);
  CHECK_THROWS_AS(h.eval(-3, 1), std::out_of_range);
}

TEST_CASE("initial state resolves through B_in or explicitly") {
  DelaySystem sys = make_valid();
  sys.B_in = Eigen::MatrixXd(2, 1);
  sys.B_in << 1.0, 2.0;
  const auto from_w = InitialState::coordinates(Eigen::VectorXd::Constant(1, 3.0));
  CHECK(from_w.resolve(sys) == Eigen::Vector2d(3.0, 6.0));
  const auto from_x = InitialState::state(Eigen::Vector2d(5.0, 7.0));
  CHECK(from_x.resolve(sys) == Eigen::Vector2d(5.0, 7.0));
  CHECK(InitialState{}.resolve(sys).isZero());
  CHECK_THROWS_AS(InitialState::coordinates(Eigen::Vector2d(1, 1)).resolve(sys),
                  std::invalid_argument);
  CHECK_THROWS_AS(InitialState::state(Eigen::Vector3d(1, 1, 1)).resolve(sys),
                  std::invalid_argument);
}

TEST_CASE("matrix market round trip is bit exact") {
  const auto dir = std::filesystem::temp_directory_path() / "delaybt_mm_test";
  std::filesystem::create_directories(dir);
  Eigen::MatrixXd m(3, 2);
  m << 1.0 / 3.0, -2e-17, 3.5, 1e300, 0.0, -7.25;
  write_matrix_market(m, dir / "m.mtx");
  CHECK(read_matrix_market(dir / "m.mtx") == m);
  std::filesystem::remove_all(dir);
}

TEST_CASE("system save/load round trip") {
  const auto dir = std::filesystem::temp_directory_path() / "delaybt_io_test";
  std::filesystem::create_directories(dir);
  DelaySystem sys = make_valid(4);
  sys.kind = SystemKind::StochasticDelay;
  sys.delays.push_back({Eigen::MatrixXd::Random(4, 4), 0.25});
  sys.B = Eigen::MatrixXd::Random(4, 2);
  sys.C = Eigen::MatrixXd::Random(3, 4);
  save_system(sys, dir / "sys.json");
  const DelaySystem back = load_system(dir / "sys.json");
  CHECK(back.A == sys.A);
  CHECK(back.B == sys.B);
  CHECK(back.B_in == sys.B_in);
  CHECK(back.C == sys.C);
  CHECK(back.kind == sys.kind);
  REQUIRE(back.delays.size() == 2);
  CHECK(back.delays[1].N == sys.delays[1].N);
  CHECK(back.delays[1].tau == sys.delays[1].tau);
  CHECK(is_valid(back));
  std::filesystem::remove_all(dir);
}

TEST_CASE("missing matrix artifact is an error") {
  const auto dir = std::filesystem::temp_directory_path() / "delaybt_io_missing";
  std::filesystem::create_directories(dir);
  save_system(make_valid(), dir / "sys.json");
  std::filesystem::remove(dir / "sys.A.mtx");
  CHECK_THROWS_AS(load_system(dir / "sys.json"), IoError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("malformed manifest is an error") {
  const auto dir = std::filesystem::temp_directory_path() / "delaybt_io_bad";
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir / "bad.json");
    out << "{ not json";
  }
  CHECK_THROWS_AS(load_system(dir / "bad.json"), IoError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("kind strings round trip") {
  for (auto k : {SystemKind::DeterministicDelay, SystemKind::BilinearDelay,
                 SystemKind::StochasticDelay})
    CHECK(kind_from_string(to_string(k)) == k);
  CHECK_THROWS_AS(kind_from_string("nope"), std::invalid_argument);
}
