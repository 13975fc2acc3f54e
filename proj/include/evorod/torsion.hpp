#pragma once

#include <cstddef>
#include <functional>
#include <utility>
#include <variant>
#include <vector>

#include "evorod/energetics.hpp"
#include "evorod/errors.hpp"
#include "evorod/linalg.hpp"
#include "evorod/time_integration.hpp"

namespace evorod {
namespace torsion {

// Dimensionless parameters of the isolated-torsion problem.
//   nu     inertia ratio (0 means quasi-static)
//   mu     viscosity paired with the current twist rate
//   mu_d   viscosity paired with the natural twist rate
//   alpha  elastic torsional stiffness
//   alpha_d stiffness penalizing the natural twist itself
struct TorsionParams {
    double nu = 0.0;
    double mu = 0.0;
    double mu_d = 1.0;
    double alpha = 1.0;
    double alpha_d = 1.0;

    void validate() const;

    // -A for the quasi-static creep system d/dt (u, u_d) = -A (u, u_d) + (m/mu, 0).
    Mat2 creep_matrix() const;
};

// Dimensional description of a uniform rod, reduced to what torsion needs.
struct PhysicalRodProperties {
    double length = 1.0;           // L
    double time_scale = 1.0;       // T
    double line_density = 1.0;     // rho A, mass per unit reference length
    double inertia_1 = 0.0;        // I_11, second mass moment per unit length
    double inertia_2 = 0.0;        // I_22
    double twist_viscosity = 0.0;        // M_33
    double natural_twist_viscosity = 1.0;  // M_d,33
    double twist_stiffness = 1.0;        // A_33
    double natural_twist_stiffness = 1.0;  // A_d,33
};

TorsionParams nondimensionalize(const PhysicalRodProperties& physical);
PhysicalRodProperties redimensionalize(const TorsionParams& params, double length,
                                       double time_scale, double line_density);

// I_11 + I_22 of a uniform circular section of the given radius, split evenly.
std::pair<double, double> circular_section_inertia(double line_density, double radius);

// Twist or torque history, zero for t < 0. The ideal step is the distributional
// limit of ramps; it is represented explicitly so step responses can use the
// closed forms (its time derivative is never sampled).
class InputHistory {
public:
    enum class Kind { PrescribedTwist, PrescribedTorque };

    struct IdealStep {
        double amplitude;
    };
    struct SmoothedStep {
        double amplitude;
        double ramp_duration;
    };
    struct Tabulated {
        std::vector<double> times;   // ascending, first >= 0
        std::vector<double> values;  // values[0] must vanish
    };
    using Waveform = std::variant<IdealStep, SmoothedStep, Tabulated>;

    InputHistory(Kind kind, Waveform waveform);

    Kind kind() const { return kind_; }
    bool is_ideal_step() const { return std::holds_alternative<IdealStep>(waveform_); }
    double amplitude() const;

    double value(double t) const;
    double derivative(double t) const;  // throws for the ideal step

private:
    Kind kind_;
    Waveform waveform_;
};

// Right-hand side of the quasi-static homogeneous system:
//   mu du/dt   = m - alpha (u - u_d)
//   mu_d du_d/dt = alpha u - (alpha + alpha_d) u_d
// Requires nu = 0 and mu > 0.
std::pair<double, double> quasistatic_rhs(const TorsionParams& params, double u, double u_d,
                                          double torque);

// Torque response to a prescribed twist history, sampled on a uniform time
// grid. The Dirac part of the ideal-step response is reported as a separate
// amplitude, never folded into the samples.
struct RelaxationTrace {
    std::vector<double> t;
    std::vector<double> u;
    std::vector<double> u_d;
    std::vector<double> torque;       // regular part m(t)
    double impulse_amplitude = 0.0;   // mu * u0 at t = 0 for the ideal step
};

RelaxationTrace relaxation_response(const TorsionParams& params, const InputHistory& twist,
                                    double t_end, std::size_t steps);

// Twist response to a prescribed torque history.
struct CreepTrace {
    std::vector<double> t;
    std::vector<double> u;
    std::vector<double> u_d;
    std::vector<double> torque;  // the applied m(t)
};

CreepTrace creep_response(const TorsionParams& params, const InputHistory& torque, double t_end,
                          std::size_t steps);

// Degenerate mu = 0 path: u follows the torque elastically, u_d relaxes.
CreepTrace creep_mu_zero(const TorsionParams& params, const InputHistory& torque, double t_end,
                         std::size_t steps);

// Method-of-lines solve of the dynamic twist equation
//   nu d_tt phi = alpha (d_ss phi - d_s u_d) + mu d_t d_ss phi,  phi(0, t) = 0,
//   alpha (d_s phi(1,t) - u_d(1,t)) + mu d_t d_s phi(1,t) = m(t),
// coupled to the local or homogeneous natural-twist evolution. phi lives on
// nodes, twists on cells, so the semi-discrete energy identity is exact and
// the applied torque enters as the boundary nodal force.
struct DynamicOptions {
    std::size_t grid_nodes = 64;
    double t_end = 1.0;
    std::size_t samples = 200;
    NaturalEvolution variant = NaturalEvolution::Local;
    TrBdf2Options time;
    std::vector<double> initial_angle;          // phi at nodes, empty = zero
    std::vector<double> initial_rate;           // d_t phi at nodes, empty = zero
    std::vector<double> initial_natural_twist;  // u_d on cells (size 1 if uniform), empty = zero
};

struct DynamicTrace {
    std::vector<double> times;
    std::vector<double> node_positions;
    std::vector<std::vector<double>> angle;          // phi per sample, node-indexed
    std::vector<std::vector<double>> natural_twist;  // u_d per sample, node-indexed
    std::vector<double> boundary_twist;              // d_s phi at s = 1, one-sided second order
    std::vector<double> boundary_torque;             // applied m(t)
    double energy_balance_residual = 0.0;  // max per-step defect over the run energy scale
    TrBdf2Stats stats;
};

DynamicTrace dynamic_pde_solve(const TorsionParams& params, const DynamicOptions& options,
                               const InputHistory& torque);

// Same solve with a directly supplied torque function m(t), for manufactured
// solutions and couplings that are not expressible as an InputHistory.
DynamicTrace dynamic_pde_solve(const TorsionParams& params, const DynamicOptions& options,
                               const std::function<double(double)>& torque);

}  // namespace torsion
}  // namespace evorod
