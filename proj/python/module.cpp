#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "delaybt/balance.hpp"
#include "delaybt/bench.hpp"
#include "delaybt/bounds.hpp"
#include "delaybt/io.hpp"
#include "delaybt/lyapunov.hpp"
#include "delaybt/sim.hpp"
#include "delaybt/stability.hpp"
#include "delaybt/system.hpp"

namespace py = pybind11;
using namespace dbt;

namespace {

GramianVariant variant_from_string(const std::string& s) {
  if (s == "bilinear") return GramianVariant::BilinearRule;
  if (s == "sdde") return GramianVariant::SddeRule;
  throw std::invalid_argument("variant must be 'bilinear' or 'sdde'");
}

}  // namespace

PYBIND11_MODULE(_delaybt, m) {
  m.doc() = "Structure-preserving balanced truncation for delay systems";

  py::register_exception<NotStableError>(m, "NotStableError");
  py::register_exception<NoConvergenceError>(m, "NoConvergenceError");
  py::register_exception<IncommensurateDelayError>(m, "IncommensurateDelayError");

  py::class_<DelayTerm>(m, "DelayTerm")
      .def(py::init([](const Eigen::MatrixXd& N, double tau) {
             return DelayTerm{N, tau};
           }),
           py::arg("N"), py::arg("tau"))
      .def_readwrite("N", &DelayTerm::N)
      .def_readwrite("tau", &DelayTerm::tau);

  py::class_<DelaySystem>(m, "DelaySystem")
      .def(py::init<>())
      .def_readwrite("A", &DelaySystem::A)
      .def_readwrite("delays", &DelaySystem::delays)
      .def_readwrite("B", &DelaySystem::B)
      .def_readwrite("B_in", &DelaySystem::B_in)
      .def_readwrite("C", &DelaySystem::C)
      .def_property(
          "kind", [](const DelaySystem& s) { return to_string(s.kind); },
          [](DelaySystem& s, const std::string& k) { s.kind = kind_from_string(k); })
      .def_property_readonly("dim", &DelaySystem::dim)
      .def("__repr__", [](const DelaySystem& s) {
        return "<DelaySystem d=" + std::to_string(s.dim()) + " delays=" +
               std::to_string(s.delays.size()) + " kind=" + to_string(s.kind) + ">";
      });

  m.def("validate", [](const DelaySystem& sys) {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& v : validate_system(sys)) out.emplace_back(v.code, v.detail);
    return out;
  });

  m.def("save_system", [](const DelaySystem& sys, const std::string& path) {
    save_system(sys, path);
  });
  m.def("load_system", [](const std::string& path) { return load_system(path); });

  m.def(
      "solve_generalized",
      [](const Eigen::MatrixXd& A, const std::vector<Eigen::MatrixXd>& Ns,
         const Eigen::MatrixXd& Q, double tol) {
        auto sol = solve_generalized(A, Ns, Q, tol);
        return py::make_tuple(sol.X, sol.rel_residual, sol.iterations);
      },
      py::arg("A"), py::arg("Ns"), py::arg("Q"), py::arg("tol") = kDefaultLyapTol,
      "Solve A X + X A^T + sum_i N_i X N_i^T + Q = 0; returns (X, residual, iterations)");

  m.def(
      "gramians",
      [](const DelaySystem& sys, const std::string& variant, double tol) {
        auto g = compute_gramians(sys, variant_from_string(variant), tol);
        return py::make_tuple(g.P, g.O);
      },
      py::arg("sys"), py::arg("variant") = "bilinear", py::arg("tol") = kDefaultLyapTol);

  m.def(
      "hankel_singular_values",
      [](const DelaySystem& sys, const std::string& variant, double tol) {
        auto g = compute_gramians(sys, variant_from_string(variant), tol);
        return balance_transform(sys, g).hsv;
      },
      py::arg("sys"), py::arg("variant") = "bilinear", py::arg("tol") = kDefaultLyapTol);

  m.def(
      "reduce",
      [](const DelaySystem& sys, int r, const std::string& variant, double tol) {
        auto g = compute_gramians(sys, variant_from_string(variant), tol);
        auto red = truncate(balance_transform(sys, g), r);
        return py::make_tuple(red.sys, red.transform, red.inverse, red.hsv_tail);
      },
      py::arg("sys"), py::arg("r"), py::arg("variant") = "bilinear",
      py::arg("tol") = kDefaultLyapTol,
      "Balanced truncation; returns (reduced_system, Q_r, Qinv_r, hsv_tail)");

  m.def(
      "trace_norm",
      [](const DelaySystem& sys1, const DelaySystem& sys2, const std::string& variant,
         double tol) {
        return error_hankel(sys1, sys2, variant_from_string(variant), tol).trace_norm;
      },
      py::arg("sys1"), py::arg("sys2"), py::arg("variant") = "bilinear",
      py::arg("tol") = kDefaultLyapTol);

  m.def(
      "simulate_dde",
      [](const DelaySystem& sys, const Eigen::VectorXd& x0, double T, double dt,
         const std::string& control) {
        auto traj = simulate_dde(sys, parse_control(control, sys.n_controls()),
                                 InitialState::state(x0), HistorySpec::zero(),
                                 Grid::from_horizon(T, dt));
        return traj.outputs.at(0);
      },
      py::arg("sys"), py::arg("x0"), py::arg("T"), py::arg("dt"),
      py::arg("control") = "zero", "Forward-Euler outputs, rows = grid nodes 0..steps");

  m.def(
      "simulate_sdde",
      [](const DelaySystem& sys, const Eigen::VectorXd& xi, double T, double dt, int n_paths,
         std::uint64_t seed, const std::string& control) {
        auto traj = simulate_sdde(sys, parse_control(control, sys.n_controls()),
                                  InitialState::state(xi), HistorySpec::zero(),
                                  Grid::from_horizon(T, dt), n_paths, NoiseMode::Independent,
                                  seed);
        return traj.outputs;
      },
      py::arg("sys"), py::arg("xi"), py::arg("T"), py::arg("dt"), py::arg("n_paths") = 1,
      py::arg("seed") = 1, py::arg("control") = "zero",
      "Euler-Maruyama outputs, one matrix per path");

  m.def("gen_stuart_landau", &gen_stuart_landau, py::arg("d"), py::arg("alpha"),
        py::arg("tau"));
  m.def("gen_gle", &gen_gle, py::arg("d_particles"), py::arg("hurst"), py::arg("r_mem"),
        py::arg("perturb_scale"), py::arg("seed"));
  m.def("gen_gbm", &gen_gbm, py::arg("d"), py::arg("r_obs"), py::arg("tau"),
        py::arg("perturb_std"), py::arg("seed"));

  m.def("spectral_abscissa", &spectral_abscissa);
}
