#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "finslerkit/builtins.hpp"
#include "finslerkit/errors.hpp"
#include "finslerkit/geodesic.hpp"
#include "finslerkit/metric.hpp"
#include "finslerkit/projective.hpp"
#include "finslerkit/runner.hpp"
#include "finslerkit/sampling.hpp"

namespace py = pybind11;
namespace fk = finslerkit;

namespace {

using Vec = std::vector<double>;

std::vector<Vec> to_rows(const fk::Matrix& m) {
  std::vector<Vec> rows(m.rows(), Vec(m.cols()));
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) rows[i][j] = m(i, j);
  }
  return rows;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Numerical checks for spherically symmetric Finsler metrics";

  py::register_exception<fk::DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<fk::ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<fk::ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<fk::ConvexityError>(m, "ConvexityError", PyExc_RuntimeError);

  py::class_<fk::Metric>(m, "Metric")
      .def_property_readonly("name", &fk::Metric::name)
      .def_property_readonly("domain_radius", &fk::Metric::domain_radius)
      .def_property_readonly("is_spherical",
                             [](const fk::Metric& self) { return self.spherical() != nullptr; })
      .def("F", [](const fk::Metric& self, const Vec& x, const Vec& y) {
        return fk::evaluate_F(self, x, y);
      })
      .def("fundamental_tensor", [](const fk::Metric& self, const Vec& x, const Vec& y) {
        return to_rows(fk::fundamental_tensor_ad(self, x, y));
      })
      .def("flag_curvature", [](const fk::Metric& self, const Vec& x, const Vec& y) {
        return fk::flag_curvature_xy(self, x, y);
      })
      .def("spray", [](const fk::Metric& self, const Vec& x, const Vec& y) {
        const fk::Vector G = fk::spray_general(self, x, y);
        return Vec(G.data(), G.data() + G.size());
      });

  m.def("builtin_names", &fk::builtin_names);
  m.def(
      "builtin",
      [](const std::string& name, const std::map<std::string, double>& params) {
        return fk::Metric(fk::builtin(name, params));
      },
      py::arg("name"), py::arg("params") = std::map<std::string, double>{});
  m.def(
      "from_phi",
      [](const std::string& name, const std::string& phi, double radius) {
        return fk::Metric(fk::SphericalMetric::from_expression(name, phi, radius));
      },
      py::arg("name"), py::arg("phi"), py::arg("domain_radius") = fk::kUnbounded);

  m.def(
      "sample_domain",
      [](int n, int count, std::uint64_t seed, double radius) {
        fk::SampleSpec spec = fk::SampleSpec::for_domain(n, count, seed, radius);
        spec.validate(radius);
        std::vector<std::pair<Vec, Vec>> out;
        for (const auto& s : fk::sample_domain(spec)) out.emplace_back(s.x, s.y);
        return out;
      },
      py::arg("n"), py::arg("count"), py::arg("seed"),
      py::arg("domain_radius") = fk::kUnbounded);

  m.def(
      "run_json",
      [](const std::string& config_text) {
        const fk::Report report = fk::run(fk::parse_config(config_text));
        return py::make_tuple(report.pass, fk::render_json(report));
      },
      py::arg("config_text"),
      "Runs a JSON config; returns (overall pass, JSON report text).");
}
