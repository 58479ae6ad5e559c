// Copyright 2026 The cvpurify Authors
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


#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cvpurify/config.hpp"
#include "cvpurify/experiments.hpp"
#include "cvpurify/purify.hpp"
#include "cvpurify/qnd.hpp"

namespace py = pybind11;
namespace cp = cvpurify;

namespace {

cp::ProtocolSpec spec_of(int m, double r, double eta_A_tau, double eta_B_tau) {
  std::optional<cp::LossModel> loss;
  if (eta_A_tau != 0.0 || eta_B_tau != 0.0) loss = cp::LossModel::from_products(eta_A_tau, eta_B_tau);
  return cp::ProtocolSpec::make(m, r, loss);
}

py::dict table_to_dict(const cp::ResultTable& t) {
  py::dict d;
  d["name"] = t.name;
  d["columns"] = t.columns;
  d["rows"] = t.rows;
  py::dict meta;
  for (const auto& [k, v] : t.meta) meta[py::str(k)] = v;
  d["meta"] = meta;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Bindings for the cvpurify C++ library.";
  m.attr("__version__") = CVPURIFY_VERSION;

  py::register_exception<cp::ConfigError>(m, "ConfigError", PyExc_ValueError);

  m.def(
      "degeneracy", [](int j, int modes) { return py::int_(py::str(cp::degeneracy_f(j, modes).str())); },
      py::arg("j"), py::arg("m"));
  m.def("log2_degeneracy", &cp::log2_degeneracy, py::arg("j"), py::arg("m"));
  m.def(
      "outcome_probability",
      [](int j, int modes, double r, double a, double b) {
        return cp::outcome_probability(spec_of(modes, r, a, b), j);
      },
      py::arg("j"), py::arg("m"), py::arg("r"), py::arg("eta_A_tau") = 0.0,
      py::arg("eta_B_tau") = 0.0);
  m.def("outcome_entanglement", &cp::outcome_entanglement, py::arg("j"), py::arg("m"));
  m.def("initial_entanglement", &cp::initial_entanglement, py::arg("r"));
  m.def(
      "increase_threshold",
      [](double r) {
        const cp::IncreaseThreshold t = cp::increase_threshold(r);
        return py::make_tuple(t.closed_form, t.exact);
      },
      py::arg("r"), "(closed_form, exact) thresholds on f_j / f_j_max.");
  m.def(
      "transfer_efficiency",
      [](int modes, double r, int j_max) {
        return cp::transfer_efficiency(spec_of(modes, r, 0.0, 0.0), j_max).value;
      },
      py::arg("m"), py::arg("r"), py::arg("j_max") = -1);

  m.def(
      "qnd_budget",
      [](const py::kwargs& overrides) {
        cp::QndParams p = cp::QndParams::reference();
        py::object obj = py::cast(&p, py::return_value_policy::reference);
        for (const auto& [k, v] : overrides) py::setattr(obj, k, v);
        p.validate();
        py::list rows;
        for (const cp::BudgetRow& row : cp::budget_report(p).rows) {
          rows.append(py::make_tuple(row.id, row.lhs, row.rhs, row.pass, row.margin));
        }
        return rows;
      },
      "Rows (id, lhs, rhs, pass, margin) for the reference QND parameters with "
      "keyword overrides.");

  py::class_<cp::QndParams>(m, "QndParams")
      .def(py::init([] { return cp::QndParams::reference(); }))
      .def_readwrite("gamma", &cp::QndParams::gamma)
      .def_readwrite("chi", &cp::QndParams::chi)
      .def_readwrite("g_mag", &cp::QndParams::g_mag)
      .def_readwrite("kappa", &cp::QndParams::kappa)
      .def_readwrite("T", &cp::QndParams::T)
      .def_readwrite("delta_t", &cp::QndParams::delta_t)
      .def_readwrite("beta1", &cp::QndParams::beta1)
      .def_readwrite("beta2", &cp::QndParams::beta2)
      .def_readwrite("mu", &cp::QndParams::mu)
      .def_readwrite("nu", &cp::QndParams::nu)
      .def_readwrite("chi_i", &cp::QndParams::chi_i)
      .def_readwrite("n1", &cp::QndParams::n1)
      .def_readwrite("n2", &cp::QndParams::n2)
      .def("signal_gain", &cp::signal_gain)
      .def("noise_sigma", &cp::noise_sigma)
      .def("distinguishability", &cp::distinguishability);

  m.def("experiments", [] {
    std::vector<std::string> names;
    for (cp::Experiment e : cp::all_experiments()) names.emplace_back(cp::experiment_name(e));
    return names;
  });
  m.def(
      "run_experiment",
      [](const std::string& name, const std::vector<std::string>& overrides,
         std::optional<std::uint64_t> seed) {
        cp::ConfigInput in;
        in.experiment = name;
        in.overrides = overrides;
        in.seed = seed;
        const cp::RunConfig config = cp::parse_config(in);
        std::vector<cp::ResultTable> tables;
        {
          py::gil_scoped_release release;
          tables = cp::run_experiment(config);
        }
        py::list out;
        for (const auto& t : tables) out.append(table_to_dict(t));
        return out;
      },
      py::arg("name"), py::arg("overrides") = std::vector<std::string>{},
      py::arg("seed") = py::none(),
      "Runs a named experiment with key=value overrides; returns a list of "
      "tables as dicts with name, columns, rows and meta.");
}
