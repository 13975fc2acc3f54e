#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "evorod/constitutive.hpp"
#include "evorod/energetics.hpp"
#include "evorod/kinematics.hpp"
#include "evorod/oracle.hpp"
#include "evorod/scenario.hpp"
#include "evorod/torsion.hpp"

namespace py = pybind11;
using namespace evorod;

namespace {

std::vector<DirectorFrame> frames_of(const std::vector<Mat3>& matrices) {
    std::vector<DirectorFrame> frames;
    frames.reserve(matrices.size());
    for (const Mat3& m : matrices) frames.emplace_back(m);
    return frames;
}

}  // namespace

PYBIND11_MODULE(_evorod, m) {
    m.doc() = "Special Cosserat rods with evolving natural configurations";

    py::register_exception<Error>(m, "EvorodError");

    // --- kinematics ------------------------------------------------------
    py::class_<DirectorFrame>(m, "DirectorFrame")
        .def(py::init<const Mat3&>(), py::arg("rotation"))
        .def_static("identity", &DirectorFrame::identity)
        .def_static("axis_angle", &DirectorFrame::axis_angle, py::arg("axis"), py::arg("angle"))
        .def_property_readonly("matrix", &DirectorFrame::matrix)
        .def("renormalized", &DirectorFrame::renormalized);

    m.def(
        "darboux_of_rotation_field",
        [](const std::vector<Mat3>& rotations, double spacing) {
            const auto frames = frames_of(rotations);
            return darboux_of_rotation_field(frames, spacing);
        },
        py::arg("rotations"), py::arg("grid_spacing"));
    m.def(
        "rotation_field_of_darboux",
        [](const std::vector<Vec3>& u, const Mat3& start, double spacing) {
            const auto frames = rotation_field_of_darboux(u, DirectorFrame(start), spacing);
            std::vector<Mat3> out;
            out.reserve(frames.size());
            for (const auto& f : frames) out.push_back(f.matrix());
            return out;
        },
        py::arg("u_components"), py::arg("start"), py::arg("grid_spacing"));

    // --- energetics ------------------------------------------------------
    py::class_<QuadraticEnergyParams>(m, "QuadraticEnergyParams")
        .def(py::init([](const Vec3& curvature, const Vec3& tangent, const Vec3& natural_curvature,
                         const Vec3& natural_tangent) {
                 QuadraticEnergyParams p{curvature, tangent, natural_curvature, natural_tangent};
                 p.validate();
                 return p;
             }),
             py::arg("curvature"), py::arg("tangent"), py::arg("natural_curvature"),
             py::arg("natural_tangent"))
        .def_readonly("curvature", &QuadraticEnergyParams::curvature)
        .def_readonly("tangent", &QuadraticEnergyParams::tangent)
        .def_readonly("natural_curvature", &QuadraticEnergyParams::natural_curvature)
        .def_readonly("natural_tangent", &QuadraticEnergyParams::natural_tangent);

    m.def(
        "energy_eval",
        [](const QuadraticEnergyParams& params, const Vec3& u_d, const Vec3& v_d, const Vec3& u,
           const Vec3& v) { return energy_eval(EnergyModel::quadratic(params), u_d, v_d, u, v); },
        py::arg("params"), py::arg("u_d"), py::arg("v_d"), py::arg("u"), py::arg("v"));
    m.def(
        "energy_grad",
        [](const QuadraticEnergyParams& params, const Vec3& u_d, const Vec3& v_d, const Vec3& u,
           const Vec3& v) {
            const auto g = energy_grad(EnergyModel::quadratic(params), u_d, v_d, u, v);
            return py::make_tuple(g.wrt_u_d, g.wrt_v_d, g.wrt_u, g.wrt_v);
        },
        py::arg("params"), py::arg("u_d"), py::arg("v_d"), py::arg("u"), py::arg("v"));

    // --- torsion ---------------------------------------------------------
    py::class_<torsion::TorsionParams>(m, "TorsionParams")
        .def(py::init([](double nu, double mu, double mu_d, double alpha, double alpha_d) {
                 torsion::TorsionParams p{nu, mu, mu_d, alpha, alpha_d};
                 p.validate();
                 return p;
             }),
             py::arg("nu") = 0.0, py::arg("mu") = 0.0, py::arg("mu_d") = 1.0,
             py::arg("alpha") = 1.0, py::arg("alpha_d") = 1.0)
        .def_readonly("nu", &torsion::TorsionParams::nu)
        .def_readonly("mu", &torsion::TorsionParams::mu)
        .def_readonly("mu_d", &torsion::TorsionParams::mu_d)
        .def_readonly("alpha", &torsion::TorsionParams::alpha)
        .def_readonly("alpha_d", &torsion::TorsionParams::alpha_d);

    py::class_<torsion::InputHistory> history(m, "InputHistory");
    py::enum_<torsion::InputHistory::Kind>(history, "Kind")
        .value("PrescribedTwist", torsion::InputHistory::Kind::PrescribedTwist)
        .value("PrescribedTorque", torsion::InputHistory::Kind::PrescribedTorque);
    history
        .def_static(
            "ideal_step",
            [](torsion::InputHistory::Kind kind, double amplitude) {
                return torsion::InputHistory(kind, torsion::InputHistory::IdealStep{amplitude});
            },
            py::arg("kind"), py::arg("amplitude"))
        .def_static(
            "smoothed_step",
            [](torsion::InputHistory::Kind kind, double amplitude, double ramp_duration) {
                return torsion::InputHistory(
                    kind, torsion::InputHistory::SmoothedStep{amplitude, ramp_duration});
            },
            py::arg("kind"), py::arg("amplitude"), py::arg("ramp_duration"))
        .def("value", &torsion::InputHistory::value, py::arg("t"));

    py::class_<torsion::RelaxationTrace>(m, "RelaxationTrace")
        .def_readonly("t", &torsion::RelaxationTrace::t)
        .def_readonly("u", &torsion::RelaxationTrace::u)
        .def_readonly("u_d", &torsion::RelaxationTrace::u_d)
        .def_readonly("torque", &torsion::RelaxationTrace::torque)
        .def_readonly("impulse_amplitude", &torsion::RelaxationTrace::impulse_amplitude);
    py::class_<torsion::CreepTrace>(m, "CreepTrace")
        .def_readonly("t", &torsion::CreepTrace::t)
        .def_readonly("u", &torsion::CreepTrace::u)
        .def_readonly("u_d", &torsion::CreepTrace::u_d)
        .def_readonly("torque", &torsion::CreepTrace::torque);

    m.def("relaxation_response", &torsion::relaxation_response, py::arg("params"),
          py::arg("twist_history"), py::arg("t_end"), py::arg("steps"));
    m.def("creep_response", &torsion::creep_response, py::arg("params"), py::arg("torque_history"),
          py::arg("t_end"), py::arg("steps"));
    m.def("creep_mu_zero", &torsion::creep_mu_zero, py::arg("params"), py::arg("torque_history"),
          py::arg("t_end"), py::arg("steps"));

    py::class_<torsion::PhysicalRodProperties>(m, "PhysicalRodProperties")
        .def(py::init([](double length, double time_scale, double line_density, double inertia_1,
                         double inertia_2, double twist_viscosity, double natural_twist_viscosity,
                         double twist_stiffness, double natural_twist_stiffness) {
                 return torsion::PhysicalRodProperties{
                     length, time_scale, line_density, inertia_1, inertia_2, twist_viscosity,
                     natural_twist_viscosity, twist_stiffness, natural_twist_stiffness};
             }),
             py::arg("length") = 1.0, py::arg("time_scale") = 1.0, py::arg("line_density") = 1.0,
             py::arg("inertia_1") = 0.0, py::arg("inertia_2") = 0.0,
             py::arg("twist_viscosity") = 0.0, py::arg("natural_twist_viscosity") = 1.0,
             py::arg("twist_stiffness") = 1.0, py::arg("natural_twist_stiffness") = 1.0);
    m.def("nondimensionalize", &torsion::nondimensionalize, py::arg("physical"));

    py::class_<torsion::DynamicTrace>(m, "DynamicTrace")
        .def_readonly("times", &torsion::DynamicTrace::times)
        .def_readonly("node_positions", &torsion::DynamicTrace::node_positions)
        .def_readonly("angle", &torsion::DynamicTrace::angle)
        .def_readonly("natural_twist", &torsion::DynamicTrace::natural_twist)
        .def_readonly("boundary_twist", &torsion::DynamicTrace::boundary_twist)
        .def_readonly("boundary_torque", &torsion::DynamicTrace::boundary_torque)
        .def_readonly("energy_balance_residual", &torsion::DynamicTrace::energy_balance_residual);

    m.def(
        "dynamic_pde_solve",
        [](const torsion::TorsionParams& params, const torsion::InputHistory& torque,
           std::size_t grid_nodes, double t_end, std::size_t samples, const std::string& variant,
           double tol) {
            torsion::DynamicOptions options;
            options.grid_nodes = grid_nodes;
            options.t_end = t_end;
            options.samples = samples;
            options.variant =
                variant == "uniform" ? NaturalEvolution::Uniform : NaturalEvolution::Local;
            options.time.rtol = tol;
            options.time.atol = tol * 1e-2;
            return torsion::dynamic_pde_solve(params, options, torque);
        },
        py::arg("params"), py::arg("torque_history"), py::arg("grid_nodes") = 64,
        py::arg("t_end") = 1.0, py::arg("samples") = 200, py::arg("variant") = "local",
        py::arg("tol") = 1e-8);

    // --- oracle ----------------------------------------------------------
    m.def("matrix_exponential_2x2", &oracle::matrix_exponential_2x2, py::arg("a"), py::arg("t"),
          "exp(-t A) via the closed form for real 2x2 systems");
    m.def("matrix_exponential_reference", &oracle::matrix_exponential_reference, py::arg("a"),
          py::arg("t"));
    m.def("run_maximizer_checks", &oracle::run_maximizer_checks, py::arg("instances") = 4,
          py::arg("restarts") = 20, py::arg("iters") = 300, py::arg("seed") = 0);
    py::class_<oracle::MaximizerCheckSample>(m, "MaximizerCheckSample")
        .def_readonly("nodes", &oracle::MaximizerCheckSample::nodes)
        .def_readonly("uniform", &oracle::MaximizerCheckSample::uniform)
        .def_readonly("value_gap_rel", &oracle::MaximizerCheckSample::value_gap_rel)
        .def_readonly("rate_distance_rel", &oracle::MaximizerCheckSample::rate_distance_rel)
        .def_readonly("constraint_residual_rel", &oracle::MaximizerCheckSample::constraint_residual_rel);

    // --- scenarios -------------------------------------------------------
    m.def(
        "run_scenario",
        [](const std::string& config_json, const std::string& out_dir, bool verify_only) {
            const auto config = scenario::parse_config(config_json);
            const auto result = scenario::run_scenario(config, out_dir, verify_only);
            return py::make_tuple(result.ok, result.report_text, result.written_files);
        },
        py::arg("config_json"), py::arg("out_dir"), py::arg("verify_only") = false);
}
