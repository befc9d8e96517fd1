#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "fibrosim/config.hpp"
#include "fibrosim/equilibria.hpp"
#include "fibrosim/errors.hpp"
#include "fibrosim/ode.hpp"
#include "fibrosim/pde.hpp"
#include "fibrosim/phase.hpp"

namespace py = pybind11;
using namespace fibrosim;

PYBIND11_MODULE(_core, m) {
    m.doc() = "Multiphase tumor growth and tissue fibrosis model";

    py::register_exception<Error>(m, "FibrosimError");

    py::enum_<Population>(m, "Population")
        .value("Tumor", Population::Tumor)
        .value("Healthy", Population::Healthy);

    py::class_<VolumeState>(m, "VolumeState")
        .def(py::init<>())
        .def(py::init([](double t, double h, double mm) {
                 return VolumeState{t, h, mm};
             }),
             py::arg("phi_T"), py::arg("phi_H"), py::arg("phi_M"))
        .def_readwrite("phi_T", &VolumeState::phi_T)
        .def_readwrite("phi_H", &VolumeState::phi_H)
        .def_readwrite("phi_M", &VolumeState::phi_M)
        .def("psi", &VolumeState::psi)
        .def("free_space", &VolumeState::free_space)
        .def("admissible", &VolumeState::admissible, py::arg("tol") = 1e-9)
        .def("__repr__", [](const VolumeState& s) {
            std::ostringstream os;
            os << "VolumeState(phi_T=" << s.phi_T << ", phi_H=" << s.phi_H
               << ", phi_M=" << s.phi_M << ")";
            return os.str();
        });

    py::class_<ModelParams>(m, "ModelParams")
        .def(py::init(&ModelParams::defaults))
        .def_static("defaults", &ModelParams::defaults)
        .def("with_smooth_switches", &ModelParams::with_smooth_switches)
        .def("set", &apply_param_key, py::arg("key"), py::arg("value"))
        .def("to_config", &write_params_config);

    m.def("growth_rate", &growth_rate, py::arg("population"), py::arg("state"),
          py::arg("params"));
    m.def("matrix_rate", &matrix_rate, py::arg("state"), py::arg("params"));
    m.def(
        "validate_params",
        [](const ModelParams& p) {
            std::vector<std::pair<std::string, std::string>> out;
            for (const auto& v : validate_params(p)) out.emplace_back(v.clause, v.detail);
            return out;
        },
        py::arg("params"));

    py::class_<Trajectory>(m, "Trajectory")
        .def_readonly("times", &Trajectory::times)
        .def_property_readonly("states",
                               [](const Trajectory& t) { return t.states; })
        .def("sample", &Trajectory::sample)
        .def("final", [](const Trajectory& t) { return t.back(); });

    m.def("integrate_rk", &integrate_rk, py::arg("initial"), py::arg("params"),
          py::arg("t_end"), py::arg("dt"), py::arg("record_stride") = 1);
    m.def(
        "integrate_picard",
        [](const VolumeState& s, const ModelParams& p, double t_end, double tol) {
            PicardOptions opt;
            opt.tol = tol;
            return integrate_picard(s, p, t_end, opt);
        },
        py::arg("initial"), py::arg("params"), py::arg("t_end"), py::arg("tol") = 1e-10);

    py::class_<EquilibriumReport>(m, "EquilibriumReport")
        .def_readonly("location", &EquilibriumReport::location)
        .def_readonly("eigenvalues", &EquilibriumReport::eigenvalues)
        .def_readonly("residual", &EquilibriumReport::residual)
        .def_property_readonly("verdict",
                               [](const EquilibriumReport& r) { return to_string(r.verdict); })
        .def_property_readonly("kind",
                               [](const EquilibriumReport& r) { return to_string(r.kind); })
        .def("to_json", &EquilibriumReport::to_json);

    m.def("nontrivial_equilibrium", &nontrivial_equilibrium, py::arg("population"),
          py::arg("params"));
    m.def("trivial_equilibrium", &trivial_equilibrium, py::arg("phi_M"), py::arg("params"));
    m.def(
        "mixed_equilibrium_scan",
        [](const ModelParams& p, int grid_n) {
            const MixedScanReport r = mixed_equilibrium_scan(p, grid_n);
            return py::make_tuple(r.pass, r.min_max_rate);
        },
        py::arg("params"), py::arg("grid_n") = 50);

    m.def(
        "gamma_roots",
        [](Population a, const ModelParams& p) {
            const GammaRoots r = gamma_roots(a, p);
            return py::make_tuple(r.lower, r.upper);
        },
        py::arg("population"), py::arg("params"));
    m.def(
        "classify_initial",
        [](const VolumeState& s, const ModelParams& p, double t_max) {
            return std::string(1, attractor_code(classify_initial(s, p, t_max)));
        },
        py::arg("state"), py::arg("params"), py::arg("t_max") = 500.0);

    py::class_<Scenario>(m, "Scenario")
        .def_readwrite("name", &Scenario::name)
        .def_readwrite("params", &Scenario::params)
        .def_readwrite("initial", &Scenario::initial)
        .def_readwrite("t_end", &Scenario::t_end)
        .def_readwrite("out_dir", &Scenario::out_dir);
    m.def("preset_scenario", &preset_scenario, py::arg("name"));
    m.def(
        "run_scenario",
        [](const Scenario& s) {
            const ScenarioResult r = run_scenario(s);
            return py::make_tuple(r.status, r.summary, r.artifacts);
        },
        py::arg("scenario"));
}
