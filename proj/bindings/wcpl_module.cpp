#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "wcpl/asymptotics.hpp"
#include "wcpl/bounds.hpp"
#include "wcpl/eigensolver.hpp"
#include "wcpl/energy.hpp"
#include "wcpl/potentials.hpp"
#include "wcpl/radial.hpp"
#include "wcpl/version.hpp"

namespace py = pybind11;
using namespace wcpl;

PYBIND11_MODULE(_wcpl, m) {
    m.doc() = "Radial weak-coupling eigenvalue toolkit";
    m.attr("__version__") = kVersion;

    py::enum_<Grading>(m, "Grading")
        .value("uniform", Grading::uniform)
        .value("geometric", Grading::geometric);

    py::class_<RadialGrid>(m, "RadialGrid")
        .def_readonly("dim", &RadialGrid::dim)
        .def_readonly("r", &RadialGrid::r)
        .def_readonly("w", &RadialGrid::w)
        .def_readonly("sphere_area", &RadialGrid::sphere_area)
        .def("__len__", &RadialGrid::size);

    m.def("make_grid", &make_grid, py::arg("dim"), py::arg("r_max"),
          py::arg("cells"), py::arg("grading") = Grading::geometric,
          py::arg("ratio") = 1.005);
    m.def("integrate",
          [](const RadialGrid& g, const std::vector<double>& f) {
              return integrate(g, f);
          });
    m.def("unit_sphere_area", &unit_sphere_area);
    m.def("ball_volume", &ball_volume);

    py::class_<Potential>(m, "Potential")
        .def("__call__", [](const Potential& v, double r) { return v.value(r); })
        .def_readonly("support_radius", &Potential::support_radius)
        .def_readonly("decay_certificate", &Potential::decay_certificate)
        .def_static("zero", &Potential::zero);

    py::class_<GroundStateProfile>(m, "GroundStateProfile")
        .def("__call__",
             [](const GroundStateProfile& g, double r) { return g.profile.value(r); })
        .def_readonly("p", &GroundStateProfile::p)
        .def_readonly("dim", &GroundStateProfile::dim)
        .def_readonly("tail_exponent", &GroundStateProfile::tail_exponent);

    m.def("smooth_tail_profile", &smooth_tail_profile, py::arg("p"), py::arg("dim"));
    m.def("glued_power_profile", &glued_power_profile, py::arg("p"), py::arg("dim"),
          py::arg("r0"));
    m.def("potential_from_profile", &potential_from_profile, py::arg("profile"));
    m.def("bump_perturbation", &bump_perturbation, py::arg("radius"),
          py::arg("amplitude"));

    py::class_<ProblemSpec>(m, "ProblemSpec")
        .def(py::init([](double p, int dim, double alpha, const Potential& V,
                         const Potential& W,
                         const GroundStateProfile* gs) {
                 ProblemSpec spec;
                 spec.p = p;
                 spec.dim = dim;
                 spec.alpha = alpha;
                 spec.V = V;
                 spec.W = W;
                 if (gs) spec.ground_state = *gs;
                 return spec;
             }),
             py::arg("p"), py::arg("dim"), py::arg("alpha"), py::arg("V"),
             py::arg("W"), py::arg("ground_state") = nullptr)
        .def_readwrite("p", &ProblemSpec::p)
        .def_readwrite("dim", &ProblemSpec::dim)
        .def_readwrite("alpha", &ProblemSpec::alpha)
        .def("regime_name", [](const ProblemSpec& s) { return regime_name(s.regime()); });

    py::class_<EnergyBreakdown>(m, "EnergyBreakdown")
        .def_readonly("kinetic", &EnergyBreakdown::kinetic)
        .def_readonly("potential_V", &EnergyBreakdown::potential_V)
        .def_readonly("potential_W", &EnergyBreakdown::potential_W)
        .def_readonly("total", &EnergyBreakdown::total)
        .def_readonly("mass", &EnergyBreakdown::mass);

    m.def("energy", &energy);
    m.def("rayleigh", &rayleigh);

    py::class_<SolverConfig>(m, "SolverConfig")
        .def(py::init<>())
        .def_readwrite("max_iterations", &SolverConfig::max_iterations)
        .def_readwrite("tolerance_lambda", &SolverConfig::tolerance_lambda)
        .def_readwrite("tolerance_residual", &SolverConfig::tolerance_residual)
        .def_readwrite("step_init", &SolverConfig::step_init)
        .def_readwrite("backtrack", &SolverConfig::backtrack)
        .def_readwrite("seed", &SolverConfig::seed)
        .def_readwrite("perturbation", &SolverConfig::perturbation);

    py::class_<SpectralResult>(m, "SpectralResult")
        .def_readonly("alpha", &SpectralResult::alpha)
        .def_readonly("lambda_", &SpectralResult::lambda)
        .def_readonly("eigenfunction", &SpectralResult::eigenfunction)
        .def_readonly("value_at_zero", &SpectralResult::value_at_zero)
        .def_readonly("residual", &SpectralResult::residual)
        .def_readonly("iterations", &SpectralResult::iterations)
        .def_readonly("converged", &SpectralResult::converged)
        .def_readonly("r_max", &SpectralResult::r_max)
        .def_readonly("breakdown", &SpectralResult::breakdown);

    m.def(
        "solve_ground_state",
        [](const ProblemSpec& spec, const RadialGrid& grid, const SolverConfig& cfg) {
            return solve_ground_state(spec, grid, cfg);
        },
        py::arg("spec"), py::arg("grid"), py::arg("config") = SolverConfig{});

    py::class_<GridPolicy>(m, "GridPolicy")
        .def(py::init<>())
        .def_readwrite("cells", &GridPolicy::cells)
        .def_readwrite("grading", &GridPolicy::grading)
        .def_readwrite("ratio", &GridPolicy::ratio)
        .def_readwrite("r_min", &GridPolicy::r_min)
        .def_readwrite("r_cap", &GridPolicy::r_cap)
        .def_readwrite("safety", &GridPolicy::safety);

    m.def(
        "lambda_curve",
        [](const ProblemSpec& base, const std::vector<double>& alphas,
           const GridPolicy& policy, const SolverConfig& cfg) {
            return lambda_curve(base, alphas, policy, cfg);
        },
        py::arg("spec"), py::arg("alphas"), py::arg("policy") = GridPolicy{},
        py::arg("config") = SolverConfig{});

    py::class_<CapacityProblem>(m, "CapacityProblem")
        .def(py::init([](double p, int dim, double R) {
                 return CapacityProblem{p, dim, R};
             }),
             py::arg("p"), py::arg("dim"), py::arg("R"))
        .def_readonly("p", &CapacityProblem::p)
        .def_readonly("dim", &CapacityProblem::dim)
        .def_readonly("R", &CapacityProblem::R)
        .def("d", &CapacityProblem::d)
        .def("nu", &CapacityProblem::nu);

    m.def("capacity_closed_form", &capacity_closed_form);
    m.def("capacity_discrete_min", &capacity_discrete_min, py::arg("problem"),
          py::arg("cells") = 4096);
    m.def("incomplete_gamma_zero", &incomplete_gamma_zero);

    py::class_<AsymptoticFit>(m, "AsymptoticFit")
        .def_readonly("model", &AsymptoticFit::model)
        .def_readonly("exponent", &AsymptoticFit::exponent)
        .def_readonly("constant", &AsymptoticFit::constant)
        .def_readonly("r_squared", &AsymptoticFit::r_squared)
        .def_readonly("spread", &AsymptoticFit::spread)
        .def_readonly("samples", &AsymptoticFit::samples)
        .def_readonly("window_valid", &AsymptoticFit::window_valid)
        .def_readonly("regime_violation", &AsymptoticFit::regime_violation);

    m.def("fit_power", &fit_power, py::arg("alphas"), py::arg("lambdas"));
    m.def("fit_log_corrected", &fit_log_corrected, py::arg("alphas"),
          py::arg("lambdas"));
}
