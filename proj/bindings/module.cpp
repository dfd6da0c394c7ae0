#include <sstream>

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "simcr/artifacts.hpp"
#include "simcr/beam.hpp"
#include "simcr/channels.hpp"
#include "simcr/errors.hpp"
#include "simcr/figures.hpp"
#include "simcr/geometry.hpp"
#include "simcr/linalg.hpp"
#include "simcr/pipeline.hpp"
#include "simcr/scenario.hpp"
#include "simcr/trainer.hpp"

namespace py = pybind11;
using namespace simcr;

PYBIND11_MODULE(_core, m) {
  m.doc() = "Metasurface-aided spectrum-sharing localization core";
  m.attr("__version__") = "0.1.0";

  py::register_exception<ConfigError>(m, "ConfigError");
  py::register_exception<InfeasibleError>(m, "InfeasibleError");
  py::register_exception<NumericalError>(m, "NumericalError");

  py::class_<ScenarioConfig>(m, "ScenarioConfig")
      .def(py::init<>())
      .def_readwrite("f_c", &ScenarioConfig::f_c)
      .def_readwrite("delta_f", &ScenarioConfig::delta_f)
      .def_readwrite("I", &ScenarioConfig::I)
      .def_readwrite("P_sb", &ScenarioConfig::P_sb)
      .def_readwrite("P_pb", &ScenarioConfig::P_pb)
      .def_readwrite("P_sws_target", &ScenarioConfig::P_sws_target)
      .def_readwrite("kappa", &ScenarioConfig::kappa)
      .def_readwrite("L", &ScenarioConfig::L)
      .def_readwrite("N_h", &ScenarioConfig::N_h)
      .def_readwrite("N_v", &ScenarioConfig::N_v)
      .def_readwrite("M_p", &ScenarioConfig::M_p)
      .def_readwrite("N_g", &ScenarioConfig::N_g)
      .def_readwrite("N_b", &ScenarioConfig::N_b)
      .def_readwrite("N_e", &ScenarioConfig::N_e)
      .def_readwrite("Q_su_s", &ScenarioConfig::Q_su_s)
      .def_readwrite("Q_pu_s", &ScenarioConfig::Q_pu_s)
      .def_readwrite("Q_pu_pb", &ScenarioConfig::Q_pu_pb)
      .def_readwrite("rng_seed", &ScenarioConfig::rng_seed)
      .def_readwrite("xi_rel", &ScenarioConfig::xi_rel)
      .def_property_readonly("n_atoms", &ScenarioConfig::n_atoms)
      .def_property_readonly("sigma2", &ScenarioConfig::sigma2);

  m.def("default_scenario", &default_scenario, py::arg("paper_scale") = false);
  m.def("load_scenario", &load_scenario, py::arg("path"));
  m.def("parse_scenario_text", &parse_scenario_text, py::arg("text"));
  m.def("validate_scenario", &validate_scenario, py::arg("cfg"));
  m.def("scenario_hash_hex",
        [](const ScenarioConfig& cfg) { return fmt_hash(scenario_hash(cfg)); });

  m.def(
      "principal_eigenpair",
      [](const CMat& H) {
        EigenPair p = principal_eigenpair(H);
        return py::make_tuple(p.value, p.vector);
      },
      py::arg("H"),
      "Largest-eigenvalue pair of a Hermitian matrix with a deterministic "
      "phase convention");
  m.def("solve_spd", &solve_spd, py::arg("A"), py::arg("b"));

  m.def(
      "steering_vector",
      [](double el, double az, double wavelength, double spacing, int n_h,
         int n_v) {
        return steering_vector(Direction{el, az}, wavelength, spacing, n_h,
                               n_v);
      },
      py::arg("el"), py::arg("az"), py::arg("wavelength"), py::arg("spacing"),
      py::arg("n_h"), py::arg("n_v"));
  m.def("wrap_angle", &wrap_angle, py::arg("x"));

  m.def(
      "inner_solve",
      [](const CMat& A, const CMat& R, double eps, double delta,
         double xi_tol) {
        InnerResult r = inner_solve(A, R, eps, delta, xi_tol);
        return py::make_tuple(r.f, r.case_id, r.g, r.mu);
      },
      py::arg("A"), py::arg("R"), py::arg("eps"), py::arg("delta"),
      py::arg("xi_tol"),
      "Constrained quadratic maximization; returns (f, case_id, g, mu)");

  m.def(
      "budget_eps",
      [](const ScenarioConfig& cfg) {
        ChannelSet ch = synth_channels(cfg);
        return interference_budget(ch, cfg).eps;
      },
      py::arg("cfg"),
      "Per-subcarrier interference headroom of the synthesized scene");

  m.def(
      "run_pipeline",
      [](const ScenarioConfig& cfg, const std::string& out_dir,
         const std::vector<std::string>& stages, int jobs,
         const std::string& cache_dir) {
        RunOptions opts;
        opts.cfg = cfg;
        opts.out_dir = out_dir;
        opts.stages = stages;
        opts.jobs = jobs;
        opts.cache_dir = cache_dir;
        std::ostringstream log;
        run_stages(opts, log);
        return log.str();
      },
      py::arg("cfg"), py::arg("out_dir"),
      py::arg("stages") = std::vector<std::string>{}, py::arg("jobs") = 1,
      py::arg("cache_dir") = std::string{},
      "Run pipeline stages into out_dir; returns the stage log");

  m.def("write_figure", &write_figure, py::arg("figure_id"), py::arg("cfg"),
        py::arg("out_dir"), py::arg("jobs") = 1,
        py::arg("cache_dir") = std::string{});
  m.attr("FIGURE_IDS") = kFigureIds;
  m.attr("STAGES") = kStageOrder;
}
