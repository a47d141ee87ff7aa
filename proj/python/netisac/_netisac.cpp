// SPDX-License-Identifier: Apache-2.0
//
// Thin bindings. Configurations and reports cross the boundary as JSON text;
// the Python side wraps them in dicts.
#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "netisac/experiments.hpp"
#include "netisac/validation.hpp"

namespace py = pybind11;
using namespace netisac;
using nlohmann::json;

namespace {

exp::ExperimentConfig config_from(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw exp::ConfigError("$", e.what());
  }
  return exp::parse_config(j);
}

std::string solve(const std::string& config, std::uint64_t seed, const std::string& scheme,
                  double gamma_db, double crlb_eps) {
  const exp::ExperimentConfig cfg = config_from(config);
  const exp::QosPoint q{gamma_db, crlb_eps};
  SolutionReport r;
  {
    py::gil_scoped_release nogil;
    const exp::Trial t = exp::make_trial(cfg.scenario, seed);
    const Instance inst(t.scene, t.channels, exp::make_qos(t.scene, q));
    r = exp::run_scheme(scheme, inst, cfg.ao, seed, cfg.oracle_cap);
  }
  json j = exp::to_json(r);
  j["seed"] = seed;
  j["gamma_db"] = gamma_db;
  j["crlb_eps"] = crlb_eps;
  return j.dump();
}

std::string sweep_csv(const std::string& config) {
  const exp::ExperimentConfig cfg = config_from(config);
  std::ostringstream os;
  {
    py::gil_scoped_release nogil;
    exp::write_sweep_csv(os, exp::run_sweep(cfg));
  }
  return os.str();
}

py::list validate(std::uint64_t seed) {
  validation::Options o;
  o.seed = seed;
  std::vector<validation::CheckResult> rs;
  {
    py::gil_scoped_release nogil;
    rs = validation::run_all(o);
  }
  py::list out;
  for (const auto& r : rs)
    out.append(py::dict(py::arg("name") = r.name, py::arg("passed") = r.passed,
                        py::arg("detail") = r.detail, py::arg("seconds") = r.seconds));
  return out;
}

}  // namespace

PYBIND11_MODULE(_netisac, m) {
  py::register_exception<InvalidArgument>(m, "ConfigError", PyExc_ValueError);

  m.attr("CONFIG_VERSION") = exp::kConfigVersion;
  m.attr("CSV_HEADER") = exp::kCsvHeader;
  m.def("default_config", [] { return exp::to_json(exp::ExperimentConfig{}).dump(); });
  m.def("normalize_config", [](const std::string& c) { return exp::to_json(config_from(c)).dump(); });
  m.def("solve", &solve, py::arg("config"), py::arg("seed"), py::arg("scheme"), py::arg("gamma_db"),
        py::arg("crlb_eps"));
  m.def("sweep_csv", &sweep_csv, py::arg("config"));
  m.def("validate", &validate, py::arg("seed") = 7);
  m.def("steering_vector", &steering_vector, py::arg("theta"), py::arg("num_antennas"));
  m.def("bearing", [](const Vec2& bs, const Vec2& p) { return bearing(bs, p); });
}
