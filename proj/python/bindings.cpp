#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ncqm/dynamics.hpp"
#include "ncqm/experiments.hpp"
#include "ncqm/moments.hpp"
#include "ncqm/operators.hpp"
#include "ncqm/report.hpp"
#include "ncqm/star.hpp"

namespace py = pybind11;
using namespace ncqm;

namespace {

py::dict row_dict(const ReportRow& r) {
  py::dict d;
  d["experiment"] = r.experiment;
  d["quantity"] = r.quantity;
  d["paper_value"] = r.paper_value ? py::cast(*r.paper_value) : py::none();
  d["computed"] = r.computed;
  d["tolerance"] = r.tolerance;
  d["pass"] = r.pass;
  return d;
}

py::list rows_list(const std::vector<ReportRow>& rows) {
  py::list out;
  for (const auto& r : rows) out.append(row_dict(r));
  return out;
}

ExperimentConfig config_from(double theta, double mass, double omega, double sigma) {
  ExperimentConfig c;
  c.theta = theta;
  c.mass = mass;
  c.omega = omega;
  c.sigma = sigma;
  c.output.directory.clear();
  c.validate();
  return c;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Voros-star quantum mechanics on a discretized noncommutative space-time";

  py::register_exception<InvalidInput>(m, "InvalidInput", PyExc_ValueError);
  py::register_exception<ConvergenceFailure>(m, "ConvergenceFailure", PyExc_RuntimeError);

  py::enum_<Flavor>(m, "Flavor").value("Voros", Flavor::Voros).value("Moyal", Flavor::Moyal);

  m.def("plane_wave_star_factor", &plane_wave_star_factor, py::arg("E"), py::arg("p"), py::arg("E2"), py::arg("p2"),
        py::arg("theta"), py::arg("flavor") = Flavor::Voros);

  m.def(
      "packet_width",
      [](double sigma, double mass, double theta, double t) { return packet_width({sigma, mass, theta}, t); },
      py::arg("sigma"), py::arg("mass"), py::arg("theta"), py::arg("t"));
  m.def(
      "packet_width_sample",
      [](double sigma, double mass, double theta, double t) {
        const auto s = packet_width_sample(sigma, mass, theta, t);
        py::dict d;
        d["closed_form"] = s.closed_form;
        d["density"] = s.density;
        d["fitted"] = s.fitted;
        return d;
      },
      py::arg("sigma"), py::arg("mass"), py::arg("theta"), py::arg("t"));

  m.def(
      "oscillator_spectrum",
      [](double mass, double omega, double theta, int n_max) {
        const auto r = oscillator_spectrum({mass, omega, theta}, n_max);
        py::dict d;
        d["analytic"] = r.analytic;
        d["gauge_free"] = r.gauge_free;
        d["fixed_point"] = r.fixed_point;
        d["max_gap"] = r.max_gap;
        d["gauge_residual"] = r.gauge_residual;
        return d;
      },
      py::arg("mass"), py::arg("omega"), py::arg("theta"), py::arg("n_max"));

  m.def("printed_variance_matrix", [](double theta) { return Eigen::Matrix4d(printed_variance_matrix(theta).V); },
        py::arg("theta"));
  m.def(
      "coherent_variance_matrix",
      [](double theta) {
        const auto r = coherent_variance_matrix(theta);
        py::dict d;
        d["numeric"] = Eigen::Matrix4d(r.numeric.V);
        d["printed"] = Eigen::Matrix4d(r.printed.V);
        d["max_deviation"] = r.max_deviation;
        d["numeric_det"] = r.numeric_det;
        d["printed_det"] = r.printed_det;
        return d;
      },
      py::arg("theta"));
  m.def(
      "symplectic_eigenvalues",
      [](const Eigen::Matrix4d& v, double theta) {
        VarianceMatrix vm;
        vm.V = v;
        vm.theta = theta;
        return symplectic_eigenvalues(vm, symplectic_form(theta));
      },
      py::arg("V"), py::arg("theta") = 0.0);
  m.def("m_transform", py::overload_cast<const Eigen::Matrix4d&, double, const std::string&>(&m_transform),
        py::arg("V"), py::arg("theta"), py::arg("ordering") = std::string(kCanonicalOrdering));

  m.def(
      "transition",
      [](double theta, double mass, double omega) {
        const auto s = oscillator_transition(theta, mass, omega);
        py::dict d;
        d["amplitude"] = s.amplitude;
        d["rate"] = s.rate;
        return d;
      },
      py::arg("theta"), py::arg("mass") = 1.0, py::arg("omega") = 1.0);

  m.def("experiments", &registered_experiments);
  m.def(
      "run_experiment",
      [](const std::string& name, double theta, double mass, double omega, double sigma) {
        const auto c = config_from(theta, mass, omega, sigma);
        std::vector<ReportRow> rows;
        {
          py::gil_scoped_release release;
          rows = run_experiment(name, c);
        }
        return rows_list(rows);
      },
      py::arg("name"), py::arg("theta") = 0.1, py::arg("mass") = 1.0, py::arg("omega") = 1.0,
      py::arg("sigma") = 1.0);
  m.def(
      "run_config",
      [](const std::string& text) {
        const auto c = ExperimentConfig::parse(text);
        std::vector<ReportRow> rows;
        {
          py::gil_scoped_release release;
          rows = run_experiments(c);
        }
        return rows_list(rows);
      },
      py::arg("text"));
}
