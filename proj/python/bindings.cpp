#include <sstream>

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "sagin/harness.hpp"
#include "sagin/rate_allocation.hpp"

namespace py = pybind11;
using namespace sagin;

namespace {

std::string as_text(const py::handle& v) {
  if (py::isinstance<py::bool_>(v)) return v.cast<bool>() ? "1" : "0";
  if (py::isinstance<py::str>(v)) return v.cast<std::string>();
  if (py::isinstance<py::list>(v) || py::isinstance<py::tuple>(v)) {
    std::string out;
    for (const auto& item : v) out += (out.empty() ? "" : ",") + as_text(item);
    return out;
  }
  return py::str(v).cast<std::string>();
}

KeyValueConfig to_config(const py::dict& d) {
  KeyValueConfig kv;
  for (const auto& [k, v] : d) kv.set(k.cast<std::string>(), as_text(v));
  return kv;
}

py::dict trace_row(const IterationTrace& t) {
  py::dict d;
  d["iteration"] = t.iteration;
  d["weighted_sum_rate"] = t.weighted_sum_rate;
  d["wmmse_objective"] = t.wmmse_objective;
  d["rate_status"] = t.rate_status;
  d["beam_status"] = t.beam_status;
  d["phase_status"] = t.phase_status;
  d["pose_status"] = t.pose_status;
  d["sca_solves"] = t.sca_solves;
  d["admm_iterations"] = t.admm_iterations;
  return d;
}

}  // namespace

PYBIND11_MODULE(_sagin, m) {
  m.doc() = "Joint beamforming, RIS phase and UAV pose optimization";

  static py::exception<Error> base(m, "SaginError", PyExc_RuntimeError);
  static py::exception<ConfigError> config(m, "ConfigError", base.ptr());
  static py::exception<InitializationInfeasible> infeasible(m, "InfeasibleError", base.ptr());
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const ConfigError& e) {
      config(e.what());
    } catch (const InitializationInfeasible& e) {
      infeasible(e.what());
    } catch (const Error& e) {
      base(e.what());
    }
  });

  py::class_<Scenario>(m, "Scenario")
      .def_property_readonly("num_cells", &Scenario::K)
      .def_property_readonly("num_ues_per_cell", &Scenario::L)
      .def_readonly("wavelength", &Scenario::wavelength)
      .def_readonly("p_sat_max", &Scenario::p_sat_max)
      .def_readonly("p_bs_max", &Scenario::p_bs_max)
      .def_readonly("weights", &Scenario::weights)
      .def_readonly("rmin_es", &Scenario::rmin_es)
      .def_readonly("rmin_ue", &Scenario::rmin_ue);

  m.def(
      "generate_scenario",
      [](const py::dict& params, std::uint64_t seed) {
        const KeyValueConfig kv = to_config(params);
        const ScenarioParams p = params_from_config(kv);
        const auto unused = kv.unused_keys();
        if (!unused.empty()) throw ConfigError("unknown key '" + unused.front() + "'");
        return generate_scenario(p, seed);
      },
      py::arg("params") = py::dict(), py::arg("seed") = 0,
      "Scenario from configuration keys (e.g. {'bs.power_dbm': 25}) and a placement seed.");

  py::class_<OptimizeResult>(m, "OptimizeResult")
      .def_readonly("weighted_sum_rate", &OptimizeResult::weighted_sum_rate)
      .def_readonly("initial_weighted_sum_rate", &OptimizeResult::initial_weighted_sum_rate)
      .def_readonly("converged", &OptimizeResult::converged)
      .def_property_readonly("es_rates", [](const OptimizeResult& r) { return r.rates.es; })
      .def_property_readonly("ue_rates", [](const OptimizeResult& r) { return r.rates.ue; })
      .def_property_readonly("feasible", [](const OptimizeResult& r) { return r.feasibility.all_passed(); })
      .def_property_readonly("feasibility",
                             [](const OptimizeResult& r) {
                               py::dict d;
                               for (const auto& c : r.feasibility.checks) d[py::str(c.id)] = py::make_tuple(c.passed, c.margin);
                               return d;
                             })
      .def_property_readonly("trace", [](const OptimizeResult& r) {
        py::list out;
        for (const auto& t : r.trace) out.append(trace_row(t));
        return out;
      });

  m.def(
      "optimize",
      [](const Scenario& s, std::uint64_t seed, const std::string& scheme, const py::dict& options) {
        OptimizeOptions opt;
        const KeyValueConfig kv = to_config(options);
        apply_optimizer_keys(kv, opt);
        const auto unused = kv.unused_keys();
        if (!unused.empty()) throw ConfigError("unknown optimizer key '" + unused.front() + "'");
        opt.scheme = parse_scheme(scheme);
        py::gil_scoped_release release;
        return optimize(s, seed, opt);
      },
      py::arg("scenario"), py::arg("seed") = 0, py::arg("scheme") = "proposed", py::arg("options") = py::dict(),
      "Alternating optimization; options take optimizer.* keys.");

  m.def(
      "allocate_rates",
      [](double es_common_capacity, const RVec& ue_common_capacity, const RVec& es_floor, const RMat& ue_floor,
         const RMat& weights) -> py::object {
        RateBounds b{es_common_capacity, ue_common_capacity, es_floor, ue_floor};
        const AllocationResult r = greedy_allocate(b, weights);
        if (const auto* bad = std::get_if<Infeasible>(&r)) return py::make_tuple(py::none(), bad->pool);
        const RatePlan& p = std::get<RatePlan>(r);
        return py::make_tuple(py::make_tuple(p.es, p.ue), py::none());
      },
      py::arg("es_common_capacity"), py::arg("ue_common_capacity"), py::arg("es_floor"), py::arg("ue_floor"),
      py::arg("weights"),
      "Greedy common-rate split. Returns ((es, ue), None) or (None, pool), pool -1 being the satellite.");

  m.def(
      "run_experiment",
      [](const py::dict& config) {
        const ExperimentConfig cfg = experiment_from_config(to_config(config));
        std::ostringstream csv, timing, diag;
        RunSummary s;
        {
          py::gil_scoped_release release;
          s = run_experiment(cfg, csv, &timing, diag);
        }
        py::dict summary;
        summary["cells"] = s.cells;
        summary["failed"] = s.failed;
        summary["rows"] = s.rows;
        summary["diagnostics"] = diag.str();
        return py::make_tuple(csv.str(), summary);
      },
      py::arg("config"), "Runs every cell of an experiment config; returns (csv_text, summary).");

  m.attr("CSV_HEADER") = kCsvHeader;
}
