#pragma once

#include <array>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "evorod/energetics.hpp"

namespace evorod {

enum class Constraint { Free, Unshearable, InextensibleUnshearable };

// The modeler's choice: where the dissipation maximization happens (pointwise
// vs rod-homogeneous natural evolution) and which kinematic constraint holds.
// No default on purpose.
struct ConstitutiveVariant {
    ConstitutiveVariant(NaturalEvolution evolution_choice, Constraint constraint_choice)
        : evolution(evolution_choice), constraint(constraint_choice) {}

    NaturalEvolution evolution;
    Constraint constraint;
};

// Contact couple and force in director components.
struct WrenchComponents {
    Vec3 m;  // couple: bending (1,2) and twisting (3)
    Vec3 n;  // force: shear (1,2) and tension (3)
};

// Wrench of a constrained rod. Reaction components are not constitutively
// determined; they are flagged absent rather than set to zero.
struct ConstrainedWrenchAndRates {
    Vec3 m;
    std::array<std::optional<double>, 3> n;
    Vec3 u_d_rate;
    Vec3 v_d_rate;
};

// m = d_u psi + M du/dt, n = d_v psi + N dv/dt. The raw-matrix overload admits
// semidefinite M, N (the hyperelastic and Kelvin-Voigt degenerate cases).
WrenchComponents contact_wrench(const EnergyModel& model, const Mat3& curvature_viscosity,
                                const Mat3& tangent_viscosity, const Vec3& u_d, const Vec3& v_d,
                                const Vec3& u, const Vec3& v, const Vec3& u_dot, const Vec3& v_dot);

WrenchComponents contact_wrench(const EnergyModel& model, const DissipationTensors& tensors,
                                const Vec3& u_d, const Vec3& v_d, const Vec3& u, const Vec3& v,
                                const Vec3& u_dot, const Vec3& v_dot);

// Pointwise natural-configuration evolution: M_d du_d/dt = -d_{u_d} psi and
// N_d dv_d/dt = -d_{v_d} psi, solved exactly.
std::pair<Vec3, Vec3> natural_rate_local(const EnergyModel& model,
                                         const DissipationTensors& tensors, const Vec3& u_d,
                                         const Vec3& v_d, const Vec3& u, const Vec3& v);

// Homogeneous natural-configuration evolution: the gradients are integrated
// over the rod before the solve. The natural state must be uniform already.
std::pair<Vec3, Vec3> natural_rate_uniform(const EnergyModel& model,
                                           const DissipationTensors& tensors,
                                           const GridStrains& grid);

// Constrained constitutive relations (pointwise natural evolution):
//   Unshearable: full m and n3; n1, n2 are reactions. v_d evolves in its third
//   component only.
//   InextensibleUnshearable: full m; all of n is a reaction; only u_d evolves.
ConstrainedWrenchAndRates constrained_wrench_and_rates(const EnergyModel& model,
                                                       const DissipationTensors& tensors,
                                                       Constraint constraint,
                                                       const StrainPoint& state,
                                                       const Vec3& u_dot, const Vec3& v_dot);

// Grid-level form taking the full variant. With homogeneous natural evolution
// the natural rates solve against the integrated gradients and are shared by
// every node; the natural state must already be uniform.
std::vector<ConstrainedWrenchAndRates> constrained_wrench_and_rates(
    const EnergyModel& model, const DissipationTensors& tensors, ConstitutiveVariant variant,
    const GridStrains& grid, std::span<const Vec3> u_dots, std::span<const Vec3> v_dots);

// Closed-form maximum of the constrained dissipation functional for the given
// wrench field: the weighted inverse-tensor norms of the driving terms.
double maximizer_value(const EnergyModel& model, const DissipationTensors& tensors,
                       const GridStrains& grid, std::span<const WrenchComponents> wrenches,
                       NaturalEvolution variant);

// The maximizing strain rates themselves: current rates from inverting the
// wrench relations, natural rates from the evolution laws. For the uniform
// variant the natural entries are the single homogeneous rate at every node.
std::vector<StrainRates> maximizing_rates(const EnergyModel& model,
                                          const DissipationTensors& tensors,
                                          const GridStrains& grid,
                                          std::span<const WrenchComponents> wrenches,
                                          NaturalEvolution variant);

}  // namespace evorod
