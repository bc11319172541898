#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qpkam/certifier.hpp"
#include "qpkam/config.hpp"
#include "qpkam/hull_io.hpp"
#include "qpkam/runner.hpp"

namespace py = pybind11;
using namespace qpkam;

namespace {

Mode mode_from_tuple(const FourierSeries& f, const std::vector<int>& k) {
  if (k.size() != static_cast<std::size_t>(f.dim())) {
    throw Error(ErrorCode::DimensionMismatch, "mode tuple length must equal dim");
  }
  return make_mode(std::span<const int>(k));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "spectral solver and certifier for quasi-periodic hull functions";

  py::register_exception<Error>(m, "QpkamError");

  py::class_<FourierSeries>(m, "FourierSeries")
      .def(py::init<int, int>(), py::arg("dim"), py::arg("cutoff"))
      .def_property_readonly("dim", &FourierSeries::dim)
      .def_property_readonly("cutoff", &FourierSeries::cutoff)
      .def("coeff",
           [](const FourierSeries& f, const std::vector<int>& k) {
             return f.coeff(mode_from_tuple(f, k));
           })
      .def("set_coeff",
           [](FourierSeries& f, const std::vector<int>& k, Complex v) {
             f.set_coeff(mode_from_tuple(f, k), v);
           })
      .def("modes",
           [](const FourierSeries& f) {
             std::vector<std::pair<std::vector<int>, Complex>> out;
             f.for_each([&](const Mode& k, Complex c) {
               out.emplace_back(std::vector<int>(k.begin(), k.begin() + f.dim()), c);
             });
             return out;
           })
      .def("gevrey_norm",
           [](const FourierSeries& f, double beta, double radius) {
             return gevrey_norm(f, beta, radius);
           },
           py::arg("beta"), py::arg("radius"))
      .def("average", [](const FourierSeries& f) { return average(f); })
      .def("hermitian_defect", &FourierSeries::hermitian_defect)
      .def("__len__", [](const FourierSeries& f) { return f.nonzero_count(); });

  m.def("k_weight",
        [](const std::vector<int>& k, double beta) {
          return k_weight(std::span<const int>(k), beta);
        },
        py::arg("k"), py::arg("beta"));
  m.def("multiply",
        [](const FourierSeries& f, const FourierSeries& g) { return multiply(f, g); });
  m.def("shift",
        [](const FourierSeries& f, const std::vector<double>& t) {
          return shift(f, std::span<const double>(t));
        });
  m.def("directional_derivative",
        [](const FourierSeries& f, const std::vector<double>& alpha) {
          return directional_derivative(f, std::span<const double>(alpha));
        });
  m.def("reciprocal",
        [](const FourierSeries& f, double floor) {
          return reciprocal(f, GridSpec::for_cutoff(f.dim(), f.cutoff()), floor);
        },
        py::arg("f"), py::arg("floor") = 1e-8);
  m.def("random_series", &random_series, py::arg("dim"), py::arg("cutoff"), py::arg("beta"),
        py::arg("radius"), py::arg("target_norm"), py::arg("seed"));

  m.def("solve_json",
        [](const std::string& config_text, const std::string& hull_path) {
          return solve_to_json(parse_config_text(config_text), hull_path);
        },
        py::arg("config_text"), py::arg("hull_path") = std::string(),
        "run the solver on a JSON configuration and return the report as JSON");
  m.def("certify_json",
        [](const std::string& config_text, const std::string& hull_path) {
          return certify_to_json(parse_config_text(config_text), hull_path);
        },
        py::arg("config_text"), py::arg("hull_path") = std::string());
  m.def("residual_json",
        [](const std::string& config_text, const std::string& hull_path) {
          return residual_to_json(parse_config_text(config_text), hull_path);
        },
        py::arg("config_text"), py::arg("hull_path") = std::string());

  m.attr("__version__") = "0.1.0";
}
