// Copyright 2026 The lgfmo Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// Python bindings for the core operations. Matrices cross as NumPy arrays.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "lgfmo/dynamics.hpp"
#include "lgfmo/experiments.hpp"
#include "lgfmo/fmo_model.hpp"
#include "lgfmo/leggett_garg.hpp"

namespace py = pybind11;
using namespace lgfmo;

namespace {

Hamiltonian7 to_hamiltonian(const std::optional<RealMatrix>& h) {
  if (!h) return build_default_hamiltonian();
  if (h->rows() != kNumSites || h->cols() != kNumSites) throw std::invalid_argument("Hamiltonian must be 7x7");
  return Hamiltonian7(Hamiltonian7::Matrix(*h));
}

DichotomicObservable site_or_state(const py::object& which) {
  if (py::isinstance<py::int_>(which)) return make_site_observable(StateLabel::site(which.cast<int>()), kModelDim);
  return make_state_observable(which.cast<ComplexVector>(), "state");
}

ExperimentSettings settings_for(const LindbladModel& model, const PatternChoice& pattern) {
  ExperimentSettings s;
  s.hamiltonian = model.hamiltonian;
  s.units = model.units;
  s.pattern = pattern;
  return s;
}

}  // namespace

PYBIND11_MODULE(lgfmo, m) {
  m.doc() = "Leggett-Garg quantities for the seven-site FMO excitation-transfer model";
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

  m.attr("SPEED_OF_LIGHT_CM_PER_PS") = kSpeedOfLightCmPerPs;
  m.attr("ROOM_TEMPERATURE_DEPHASING") = kRoomTemperatureDephasing;

  py::class_<LindbladModel>(m, "LindbladModel")
      .def_property_readonly("hamiltonian_cm", [](const LindbladModel& x) { return RealMatrix(x.hamiltonian.matrix()); })
      .def_property_readonly("units", [](const LindbladModel& x) { return to_string(x.units); })
      .def_property_readonly("gamma_deph", [](const LindbladModel& x) { return x.gamma_deph[0].value(); })
      .def_property_readonly("gamma_recomb", [](const LindbladModel& x) { return x.gamma_recomb[0].value(); })
      .def_property_readonly("gamma_sink", [](const LindbladModel& x) { return x.gamma_sink.value(); })
      .def("site_generator", &LindbladModel::site_generator)
      .def("embedded_generator", &LindbladModel::embedded_generator)
      .def("is_coherent", &LindbladModel::is_coherent);

  m.def("default_hamiltonian", [] { return RealMatrix(build_default_hamiltonian().matrix()); },
        "Standard 7x7 site Hamiltonian in cm^-1.");
  m.def(
      "build_model",
      [](double gamma_deph, double sink_cm, double recomb_cm, const std::string& units,
         const std::optional<RealMatrix>& h) {
        return build_model(to_hamiltonian(h), gamma_deph, sink_cm, recomb_cm, hamiltonian_units_from_string(units));
      },
      py::arg("gamma_deph") = 0.0, py::arg("sink_cm") = kDefaultSinkCm, py::arg("recomb_cm") = kDefaultRecombCm,
      py::arg("units") = "ordinary", py::arg("hamiltonian") = py::none(),
      "Model with uniform dephasing (ps^-1) and trapping/recombination rates given in cm^-1.");
  m.def(
      "coherent_model",
      [](const std::string& units, const std::optional<RealMatrix>& h) {
        return coherent_model(to_hamiltonian(h), hamiltonian_units_from_string(units));
      },
      py::arg("units") = "ordinary", py::arg("hamiltonian") = py::none());
  m.def(
      "perturb_hamiltonian",
      [](const RealMatrix& h, double sigma2, std::uint64_t seed) {
        return RealMatrix(perturb_hamiltonian(to_hamiltonian(h), sigma2, seed).matrix());
      },
      py::arg("hamiltonian"), py::arg("sigma2"), py::arg("seed"));

  m.def(
      "initial_state", [](const std::string& label, int dim) { return InitialState::from_label(label).realize(dim).matrix(); },
      py::arg("label"), py::arg("dim") = kModelDim, "Density matrix for site1..site7, mix16 or maxmix7.");
  m.def(
      "propagate",
      [](const LindbladModel& model, const ComplexMatrix& rho, double t) {
        return LindbladPropagator(model).apply(DensityOperator(rho).matrix(), t);
      },
      py::arg("model"), py::arg("rho"), py::arg("t"), "rho(t) under the master equation; t in ps.");
  m.def("liouvillian", [](const LindbladModel& model) { return build_liouvillian(model).matrix(); },
        "81x81 superoperator on column-stacked density matrices.");

  py::class_<LGResult>(m, "LGResult")
      .def_readonly("c12", &LGResult::c12)
      .def_readonly("c23", &LGResult::c23)
      .def_readonly("c13", &LGResult::c13)
      .def_readonly("K", &LGResult::K)
      .def_property_readonly("pattern", [](const LGResult& r) { return r.pattern.label(); })
      .def_property_readonly("violation", &LGResult::violation)
      .def("K_for", [](const LGResult& r, const std::string& p) { return r.K_for(sign_pattern_from_string(p)); })
      .def("__repr__", [](const LGResult& r) {
        return "LGResult(K=" + std::to_string(r.K) + ", pattern=" + r.pattern.label() + ")";
      });

  m.def(
      "lg_protocol",
      [](const LindbladModel& model, const py::object& observable, const std::string& initial, double dt,
         const std::string& pattern) {
        return lg_protocol(LindbladPropagator(model), site_or_state(observable),
                           InitialState::from_label(initial).realize(), dt, PatternChoice::from_string(pattern),
                           initial);
      },
      py::arg("model"), py::arg("observable"), py::arg("initial"), py::arg("dt"), py::arg("pattern") = "flip2",
      "Three-time protocol at 0, dt, 2dt. observable is a site number or a normalized 9-vector.");
  m.def(
      "lg_quantity",
      [](const ComplexMatrix& h, const ComplexMatrix& projector, const ComplexMatrix& rho, double dt,
         const std::string& pattern) {
        return lg_protocol(LindbladPropagator(Liouvillian(h, {})), DichotomicObservable(projector, "custom"),
                           DensityOperator(rho), dt, PatternChoice::from_string(pattern));
      },
      py::arg("hamiltonian"), py::arg("projector"), py::arg("rho"), py::arg("dt"), py::arg("pattern") = "base",
      "Coherent K for any Hamiltonian (1/ps), rank-1 projector and state.");
  m.def(
      "coherent_survival_K",
      [](const ComplexMatrix& h, const ComplexVector& psi, double dt) { return coherent_survival_K(h, psi, dt); },
      py::arg("hamiltonian"), py::arg("psi"), py::arg("dt"));
  m.def(
      "find_strongest_violation",
      [](const LindbladModel& model, const py::object& observable, const std::string& initial,
         const std::vector<double>& grid, const std::string& pattern) {
        const auto q = site_or_state(observable);
        const auto v = find_strongest_violation(model, q, InitialState::from_label(initial), grid,
                                                PatternChoice::from_string(pattern));
        return py::make_tuple(v.K_min, v.dt_star);
      },
      py::arg("model"), py::arg("observable"), py::arg("initial"), py::arg("grid"), py::arg("pattern") = "flip2",
      "(K_min, dt_star) over the grid; the smallest dt wins ties.");
  m.def("optical_path_grid", &optical_path_grid, py::arg("t_max") = kMaxSearchInterval);
  m.def("uniform_grid", &uniform_grid, py::arg("n"), py::arg("t_max") = kMaxSearchInterval);
  m.def("gamma_grid", &gamma_grid, py::arg("max") = 12.0, py::arg("step") = 0.1);

  m.def(
      "table2",
      [](const std::vector<std::string>& states, const std::vector<double>& grid, const std::string& pattern) {
        std::vector<InitialState> init;
        for (const auto& s : states) init.push_back(InitialState::from_label(s));
        const ExperimentSettings settings = settings_for(coherent_model(build_default_hamiltonian()),
                                                         PatternChoice::from_string(pattern));
        py::list out;
        for (const auto& r : run_table2(settings, init, grid)) {
          out.append(py::dict(py::arg("initial_state") = r.initial_state, py::arg("observable") = r.observable,
                              py::arg("site") = r.site, py::arg("K_min") = r.K_min, py::arg("dt_star") = r.dt_star));
        }
        return out;
      },
      py::arg("states") = std::vector<std::string>{"mix16", "site1", "site6", "maxmix7"},
      py::arg("grid") = optical_path_grid(), py::arg("pattern") = "flip2",
      "Strongest coherent violation per (initial state, site).");
  m.def("reference_table2", [] {
    py::list out;
    for (const auto& r : reference_table2()) {
      out.append(py::dict(py::arg("initial_state") = r.initial_state, py::arg("site") = r.site, py::arg("K") = r.K,
                          py::arg("dt_ps") = r.dt_ps));
    }
    return out;
  });

  py::class_<SweepRecord>(m, "SweepRecord")
      .def_readonly("experiment", &SweepRecord::experiment)
      .def_readonly("initial_state", &SweepRecord::initial_state)
      .def_readonly("observable", &SweepRecord::observable)
      .def_readonly("gamma_per_ps", &SweepRecord::gamma_per_ps)
      .def_readonly("dt_ps", &SweepRecord::dt_ps)
      .def_readonly("pattern", &SweepRecord::pattern)
      .def_readonly("K", &SweepRecord::K)
      .def_readonly("violation", &SweepRecord::violation);
  m.def(
      "dephasing_sweep",
      [](const std::string& initial, const std::vector<double>& gammas, const std::map<int, double>& intervals,
         const std::string& pattern) {
        ExperimentSettings settings;
        settings.pattern = PatternChoice::from_string(pattern);
        return run_dephasing_sweep(settings, InitialState::from_label(initial), gammas, intervals);
      },
      py::arg("initial"), py::arg("gammas"), py::arg("intervals"), py::arg("pattern") = "flip2",
      "K per site and dephasing rate at fixed intervals {site: dt_ps}.");
  m.def("to_csv", &to_csv);
}
