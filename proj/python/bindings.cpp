#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "habopt/adjoint.hpp"
#include "habopt/errors.hpp"
#include "habopt/evolution.hpp"
#include "habopt/experiments.hpp"
#include "habopt/grid.hpp"
#include "habopt/io.hpp"
#include "habopt/optimize.hpp"
#include "habopt/resource.hpp"
#include "habopt/steady.hpp"
#include "habopt/svg.hpp"

namespace py = pybind11;
using namespace habopt;

PYBIND11_MODULE(_core, m) {
  m.doc() = "steady logistic-diffusive solver and habitat-resource optimizer";
  m.attr("__version__") = "0.1.0";

  py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  py::class_<Grid>(m, "Grid")
      .def_property_readonly("dim", &Grid::dim)
      .def_property_readonly("cells_per_axis", &Grid::cells_per_axis)
      .def_property_readonly("spacing", &Grid::spacing)
      .def_property_readonly("cell_volume", &Grid::cell_volume)
      .def_property_readonly("total_cells", &Grid::total_cells)
      .def("__eq__", [](const Grid& a, const Grid& b) { return a == b; })
      .def("__repr__", [](const Grid& g) {
        std::string s = "Grid(dim=" + std::to_string(g.dim()) + ", cells=[";
        for (std::size_t i = 0; i < g.cells_per_axis().size(); ++i)
          s += (i ? "," : "") + std::to_string(g.cells_per_axis()[i]);
        return s + "])";
      });
  m.def("build_grid", &build_grid, py::arg("dim"), py::arg("cells_per_axis"));

  py::class_<ScalarField>(m, "ScalarField")
      .def(py::init<Grid, double>(), py::arg("grid"), py::arg("fill") = 0.0)
      .def(py::init<Grid, std::vector<double>>(), py::arg("grid"), py::arg("values"))
      .def_property_readonly("grid", &ScalarField::grid)
      .def_property_readonly("values",
                             [](const ScalarField& f) { return f.values(); })
      .def("__len__", &ScalarField::size)
      .def("__getitem__", [](const ScalarField& f, int i) {
        if (i < 0 || i >= f.size()) throw py::index_error();
        return f[i];
      });

  m.def("laplacian_apply", &laplacian_apply, py::arg("grid"), py::arg("f"));
  m.def("integrate", &integrate, py::arg("grid"), py::arg("f"));
  m.def("inner", &inner, py::arg("grid"), py::arg("a"), py::arg("b"));
  m.def("reflect", &reflect, py::arg("f"), py::arg("axis"));
  m.def("solve_shifted", &solve_shifted, py::arg("grid"), py::arg("mu"), py::arg("c"),
        py::arg("b"));

  py::class_<ConstraintSet>(m, "ConstraintSet")
      .def(py::init<double, double>(), py::arg("kappa"), py::arg("m0"))
      .def_readonly("kappa", &ConstraintSet::kappa)
      .def_readonly("m0", &ConstraintSet::m0);

  py::class_<ResourceField>(m, "ResourceField")
      .def(py::init<ScalarField, ConstraintSet>(), py::arg("field"),
           py::arg("constraints"))
      .def_property_readonly("field", &ResourceField::field)
      .def_property_readonly("constraints", &ResourceField::constraints)
      .def_property_readonly("grid", &ResourceField::grid);

  m.def("project_admissible", &project_admissible, py::arg("f"), py::arg("constraints"));
  m.def("make_crenel_1d", &make_crenel_1d, py::arg("grid"), py::arg("constraints"),
        py::arg("intervals"));
  m.def("make_random", &make_random, py::arg("grid"), py::arg("constraints"),
        py::arg("seed"));
  m.def("bang_bang_fraction", &bang_bang_fraction, py::arg("m"),
        py::arg("tol") = std::nullopt);
  m.def("fragment_count_1d", &fragment_count_1d, py::arg("m"));
  m.def("monotone_concentration_defect", &monotone_concentration_defect, py::arg("m"),
        py::arg("threshold") = std::nullopt);
  m.def("distance_to_boundary_crenel", &distance_to_boundary_crenel, py::arg("m"));

  py::class_<SteadyOptions>(m, "SteadyOptions")
      .def(py::init<>())
      .def_readwrite("newton_tol", &SteadyOptions::newton_tol)
      .def_readwrite("max_newton_iters", &SteadyOptions::max_newton_iters)
      .def_readwrite("damping_min", &SteadyOptions::damping_min);

  py::class_<SteadySolution>(m, "SteadySolution")
      .def_readonly("theta", &SteadySolution::theta)
      .def_readonly("mu", &SteadySolution::mu)
      .def_readonly("residual_norm", &SteadySolution::residual_norm)
      .def_readonly("iterations", &SteadySolution::iterations)
      .def_readonly("total_population", &SteadySolution::total_population);

  m.def("solve_steady", &solve_steady, py::arg("grid"), py::arg("m"), py::arg("mu"),
        py::arg("opts") = SteadyOptions{}, py::arg("init") = std::nullopt);
  m.def("residual_norm", &residual_norm, py::arg("grid"), py::arg("m"), py::arg("mu"),
        py::arg("theta"));

  py::class_<GradientBundle>(m, "GradientBundle")
      .def_readonly("p", &GradientBundle::p)
      .def_readonly("grad", &GradientBundle::grad)
      .def_readonly("theta_ref", &GradientBundle::theta_ref);

  m.def("solve_adjoint", &solve_adjoint, py::arg("grid"), py::arg("m"), py::arg("mu"),
        py::arg("sol"));
  m.def("fd_validate", &fd_validate, py::arg("grid"), py::arg("m"), py::arg("mu"),
        py::arg("direction"), py::arg("h"));

  py::enum_<Strategy>(m, "Strategy")
      .value("projected_gradient", Strategy::projected_gradient)
      .value("thresholding", Strategy::thresholding);
  py::enum_<Termination>(m, "Termination")
      .value("converged", Termination::converged)
      .value("max_iters", Termination::max_iters)
      .value("stalled", Termination::stalled);

  py::class_<OptimOptions>(m, "OptimOptions")
      .def(py::init<>())
      .def_readwrite("strategy", &OptimOptions::strategy)
      .def_readwrite("step0", &OptimOptions::step0)
      .def_readwrite("max_iters", &OptimOptions::max_iters)
      .def_readwrite("f_rel_tol", &OptimOptions::f_rel_tol)
      .def_readwrite("stall_window", &OptimOptions::stall_window)
      .def_readwrite("seed", &OptimOptions::seed)
      .def_readwrite("steady", &OptimOptions::steady);

  py::class_<OptimRun>(m, "OptimRun")
      .def_readonly("final_m", &OptimRun::final_m)
      .def_readonly("f_history", &OptimRun::f_history)
      .def_readonly("final_f", &OptimRun::final_f)
      .def_readonly("bang_bang", &OptimRun::bang_bang)
      .def_readonly("iterations", &OptimRun::iterations)
      .def_readonly("termination", &OptimRun::termination);

  m.def("optimize", &optimize, py::arg("grid"), py::arg("constraints"), py::arg("mu"),
        py::arg("init"), py::arg("opts") = OptimOptions{});
  m.def("threshold_to_volume", &threshold_to_volume, py::arg("g"), py::arg("constraints"));

  py::class_<MultistartResult>(m, "MultistartResult")
      .def_readonly("runs", &MultistartResult::runs)
      .def_readonly("best", &MultistartResult::best);

  m.def("multistart", &multistart, py::arg("grid"), py::arg("constraints"),
        py::arg("mu"), py::arg("n_starts"), py::arg("opts") = OptimOptions{},
        py::arg("threads") = 1);

  py::class_<EvolutionOptions>(m, "EvolutionOptions")
      .def(py::init<>())
      .def_readwrite("dt", &EvolutionOptions::dt)
      .def_readwrite("stop_tol", &EvolutionOptions::stop_tol)
      .def_readwrite("max_steps", &EvolutionOptions::max_steps)
      .def_readwrite("dump_path", &EvolutionOptions::dump_path)
      .def_readwrite("dump_every", &EvolutionOptions::dump_every);

  py::class_<EvolveResult>(m, "EvolveResult")
      .def_readonly("u", &EvolveResult::u)
      .def_readonly("steps", &EvolveResult::steps)
      .def_readonly("stationary", &EvolveResult::stationary);

  m.def("evolve", &evolve, py::arg("grid"), py::arg("m"), py::arg("mu"), py::arg("u0"),
        py::arg("opts") = EvolutionOptions{});

  m.def("field_to_json", [](const ScalarField& f) { return field_to_json(f).dump(); });
  m.def("field_from_json",
        [](const std::string& s) { return field_from_json(nlohmann::json::parse(s)); });
  m.def("resource_to_json",
        [](const ResourceField& f) { return resource_to_json(f).dump(); });
  m.def("resource_from_json", [](const std::string& s) {
    return resource_from_json(nlohmann::json::parse(s));
  });
  m.def("heatmap_svg", &heatmap_svg, py::arg("f"), py::arg("vmin"), py::arg("vmax"),
        py::arg("label"));
  m.def("profile_svg", &profile_svg, py::arg("f"), py::arg("vmin"), py::arg("vmax"),
        py::arg("label"));

  m.def(
      "run_scenario_file",
      [](const std::string& config_path, const std::string& scenario,
         const std::string& out_dir, std::int64_t seed, int threads) {
        ScenarioConfig cfg = load_config(config_path, scenario);
        if (!out_dir.empty()) cfg.out_dir = out_dir;
        if (seed >= 0) cfg.seed = static_cast<std::uint64_t>(seed);
        if (threads > 0) cfg.threads = threads;
        run_scenario(cfg);
        return cfg.out_dir;
      },
      py::arg("config_path"), py::arg("scenario") = "", py::arg("out_dir") = "",
      py::arg("seed") = -1, py::arg("threads") = 0,
      "Run a scenario from a config file; returns the output directory.");
}
