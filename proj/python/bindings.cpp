#include <fstream>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "skyway/config.hpp"
#include "skyway/energy.hpp"
#include "skyway/error.hpp"
#include "skyway/fitlab.hpp"
#include "skyway/interference.hpp"
#include "skyway/simkernel.hpp"

namespace py = pybind11;
using namespace skyway;

namespace {

SegmentInterferenceModel model_or_default(const std::string& path) {
  return path.empty() ? SegmentInterferenceModel{} : load_model(path);
}

py::dict per_variable(const std::array<double, kVariableCount>& values) {
  py::dict out;
  for (Variable v : kAllVariables) out[py::str(std::string(to_string(v)))] = values[index_of(v)];
  return out;
}

py::dict per_variable(const DegreeMap& degrees) {
  py::dict out;
  for (Variable v : kAllVariables) out[py::str(std::string(to_string(v)))] = degrees[index_of(v)];
  return out;
}

py::dict metrics_dict(const MetricsReport& m) {
  py::dict d;
  d["mae"] = m.mae;
  d["mse"] = m.mse;
  d["mape"] = m.mape;
  d["r2"] = m.r2;
  return d;
}

}  // namespace

PYBIND11_MODULE(_skyway, m) {
  m.doc() = "Skyway delivery simulator and interference model toolkit";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<InputError>(m, "InputError", base.ptr());

  m.def(
      "charge_time",
      [](double s_initial, double s_final, double full_charge_time_s) {
        ChargeParams p;
        p.full_charge_time_s = full_charge_time_s;
        return charge_time(s_initial, s_final, p);
      },
      py::arg("s_initial"), py::arg("s_final"), py::arg("full_charge_time_s") = 2400.0);

  m.def(
      "relative_importance",
      [](const std::string& model) { return per_variable(relative_importance(model_or_default(model))); },
      py::arg("model") = "");

  m.def(
      "predict_ir",
      [](const std::array<double, kVariableCount>& codes, const std::string& model) {
        FactorVector f;
        f.codes = codes;
        return predict_ir(model_or_default(model), f);
      },
      py::arg("codes"), py::arg("model") = "",
      "Codes in position, separation, formation, wind, payload order.");

  m.def(
      "simulate",
      [](const std::string& network, const std::string& fleet, const std::string& model,
         std::uint64_t seed) {
        SimConfig cfg;
        cfg.network = load_network(network);
        cfg.fleet = load_fleet(fleet, cfg.network);
        cfg.model = model_or_default(model);
        cfg.seed = seed;
        py::list out;
        for (const FlightRecord& r : run(cfg)) {
          py::dict d;
          d["drone_id"] = r.drone_id;
          d["total_power_pct"] = r.summary.total_power_pct;
          d["delivery_time_s"] = r.summary.delivery_time_s;
          d["total_wait_s"] = r.summary.total_wait_s;
          d["faulted"] = r.summary.faulted;
          out.append(d);
        }
        return out;
      },
      py::arg("network"), py::arg("fleet"), py::arg("model") = "", py::arg("seed") = 0);

  m.def(
      "select_degrees",
      [](const std::string& dataset, int k, std::uint64_t seed) {
        SelectOptions o;
        o.k = k;
        o.seed = seed;
        const auto report = select_degrees(extract_ir(load_dataset(dataset)), o);
        py::dict d;
        d["degrees"] = per_variable(report.degrees);
        d["intercept"] = report.model.intercept;
        d["coefficients"] = per_variable(report.model.coefficients);
        return d;
      },
      py::arg("dataset"), py::arg("k") = 5, py::arg("seed") = 0);

  m.def(
      "synthesize",
      [](const std::string& path, std::size_t pairs, std::uint64_t seed, double noise) {
        SynthOptions o;
        o.pairs = pairs;
        o.seed = seed;
        o.noise_sigma = noise;
        std::ofstream out(path);
        if (!out) throw InputError("cannot write '" + path + "'");
        write_dataset(out, synthesize_dataset(o));
      },
      py::arg("path"), py::arg("pairs") = 1485, py::arg("seed") = 0, py::arg("noise") = 0.0);

  m.def(
      "evaluate",
      [](const std::vector<double>& targets, const std::vector<double>& predictions) {
        return metrics_dict(evaluate(targets, predictions));
      },
      py::arg("targets"), py::arg("predictions"));
}
