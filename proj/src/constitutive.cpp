#include "evorod/constitutive.hpp"

#include <cmath>

namespace evorod {

namespace {

constexpr double kConstraintTol = 1e-12;

void check_wrench_sizes(const GridStrains& grid, std::span<const WrenchComponents> wrenches) {
    grid.validate();
    if (wrenches.size() != grid.states.size()) {
        throw InvalidParameterError("wrench field and grid states differ in size");
    }
}

}  // namespace

WrenchComponents contact_wrench(const EnergyModel& model, const Mat3& curvature_viscosity,
                                const Mat3& tangent_viscosity, const Vec3& u_d, const Vec3& v_d,
                                const Vec3& u, const Vec3& v, const Vec3& u_dot,
                                const Vec3& v_dot) {
    const EnergyGradients g = model.gradients(u_d, v_d, u, v);
    return WrenchComponents{g.wrt_u + curvature_viscosity * u_dot,
                            g.wrt_v + tangent_viscosity * v_dot};
}

WrenchComponents contact_wrench(const EnergyModel& model, const DissipationTensors& tensors,
                                const Vec3& u_d, const Vec3& v_d, const Vec3& u, const Vec3& v,
                                const Vec3& u_dot, const Vec3& v_dot) {
    return contact_wrench(model, tensors.curvature_viscosity.matrix(),
                          tensors.tangent_viscosity.matrix(), u_d, v_d, u, v, u_dot, v_dot);
}

std::pair<Vec3, Vec3> natural_rate_local(const EnergyModel& model,
                                         const DissipationTensors& tensors, const Vec3& u_d,
                                         const Vec3& v_d, const Vec3& u, const Vec3& v) {
    const EnergyGradients g = model.gradients(u_d, v_d, u, v);
    return {tensors.natural_curvature_viscosity.solve(-g.wrt_u_d),
            tensors.natural_tangent_viscosity.solve(-g.wrt_v_d)};
}

std::pair<Vec3, Vec3> natural_rate_uniform(const EnergyModel& model,
                                           const DissipationTensors& tensors,
                                           const GridStrains& grid) {
    grid.validate();
    const Vec3& u_d0 = grid.states.front().u_d;
    const Vec3& v_d0 = grid.states.front().v_d;
    for (const StrainPoint& p : grid.states) {
        if ((p.u_d - u_d0).cwiseAbs().maxCoeff() > 1e-10 ||
            (p.v_d - v_d0).cwiseAbs().maxCoeff() > 1e-10) {
            throw PreconditionError("natural_rate_uniform: natural state is not uniform across the grid");
        }
    }
    const EnergyGradients integral = integrated_natural_gradients(model, grid);
    return {tensors.natural_curvature_viscosity.solve(-integral.wrt_u_d),
            tensors.natural_tangent_viscosity.solve(-integral.wrt_v_d)};
}

ConstrainedWrenchAndRates constrained_wrench_and_rates(const EnergyModel& model,
                                                       const DissipationTensors& tensors,
                                                       Constraint constraint,
                                                       const StrainPoint& state,
                                                       const Vec3& u_dot, const Vec3& v_dot) {
    if (constraint == Constraint::Free) {
        throw InvalidParameterError("constrained_wrench_and_rates: use contact_wrench for the free rod");
    }

    const bool inextensible = constraint == Constraint::InextensibleUnshearable;
    auto near = [](double a, double b) { return std::abs(a - b) <= kConstraintTol; };

    if (!near(state.v[0], 0.0) || !near(state.v[1], 0.0) || !near(state.v_d[0], 0.0) ||
        !near(state.v_d[1], 0.0) || !near(v_dot[0], 0.0) || !near(v_dot[1], 0.0)) {
        throw PreconditionError("constrained_wrench_and_rates: unshearable constraint violated");
    }
    if (inextensible &&
        (!near(state.v[2], 1.0) || !near(state.v_d[2], 1.0) || !near(v_dot[2], 0.0))) {
        throw PreconditionError("constrained_wrench_and_rates: inextensibility constraint violated");
    }

    const EnergyGradients g = model.gradients(state.u_d, state.v_d, state.u, state.v);

    ConstrainedWrenchAndRates out;
    out.m = g.wrt_u + tensors.curvature_viscosity.apply(u_dot);
    out.u_d_rate = tensors.natural_curvature_viscosity.solve(-g.wrt_u_d);
    out.n = {std::nullopt, std::nullopt, std::nullopt};
    out.v_d_rate = Vec3::Zero();

    if (!inextensible) {
        // Restriction of the free relations to the unshearable manifold keeps
        // only the 33 entries of the tangent tensors.
        out.n[2] = g.wrt_v[2] + tensors.tangent_viscosity.matrix()(2, 2) * v_dot[2];
        out.v_d_rate[2] = -g.wrt_v_d[2] / tensors.natural_tangent_viscosity.matrix()(2, 2);
    }
    return out;
}

std::vector<ConstrainedWrenchAndRates> constrained_wrench_and_rates(
    const EnergyModel& model, const DissipationTensors& tensors, ConstitutiveVariant variant,
    const GridStrains& grid, std::span<const Vec3> u_dots, std::span<const Vec3> v_dots) {
    grid.validate();
    if (u_dots.size() != grid.states.size() || v_dots.size() != grid.states.size()) {
        throw InvalidParameterError("constrained_wrench_and_rates: rate field size mismatch");
    }

    std::vector<ConstrainedWrenchAndRates> out(grid.states.size());
    for (std::size_t i = 0; i < grid.states.size(); ++i) {
        out[i] = constrained_wrench_and_rates(model, tensors, variant.constraint, grid.states[i],
                                              u_dots[i], v_dots[i]);
    }
    if (variant.evolution == NaturalEvolution::Uniform) {
        const Vec3& u_d0 = grid.states.front().u_d;
        const Vec3& v_d0 = grid.states.front().v_d;
        for (const StrainPoint& p : grid.states) {
            if ((p.u_d - u_d0).cwiseAbs().maxCoeff() > 1e-10 ||
                (p.v_d - v_d0).cwiseAbs().maxCoeff() > 1e-10) {
                throw PreconditionError(
                    "constrained_wrench_and_rates: homogeneous evolution needs a uniform natural state");
            }
        }
        const EnergyGradients integral = integrated_natural_gradients(model, grid);
        const Vec3 u_d_rate = tensors.natural_curvature_viscosity.solve(-integral.wrt_u_d);
        Vec3 v_d_rate = Vec3::Zero();
        if (variant.constraint == Constraint::Unshearable) {
            v_d_rate[2] =
                -integral.wrt_v_d[2] / tensors.natural_tangent_viscosity.matrix()(2, 2);
        }
        for (auto& entry : out) {
            entry.u_d_rate = u_d_rate;
            entry.v_d_rate = v_d_rate;
        }
    }
    return out;
}

double maximizer_value(const EnergyModel& model, const DissipationTensors& tensors,
                       const GridStrains& grid, std::span<const WrenchComponents> wrenches,
                       NaturalEvolution variant) {
    check_wrench_sizes(grid, wrenches);

    double acc = 0.0;
    Vec3 integral_u_d = Vec3::Zero();
    Vec3 integral_v_d = Vec3::Zero();
    for (std::size_t i = 0; i < grid.states.size(); ++i) {
        const StrainPoint& p = grid.states[i];
        const EnergyGradients g = model.gradients(p.u_d, p.v_d, p.u, p.v);
        const double w = grid.grid.weight(i);
        acc += w * (tensors.curvature_viscosity.inverse_quadratic_form(wrenches[i].m - g.wrt_u) +
                    tensors.tangent_viscosity.inverse_quadratic_form(wrenches[i].n - g.wrt_v));
        if (variant == NaturalEvolution::Local) {
            acc += w * (tensors.natural_curvature_viscosity.inverse_quadratic_form(g.wrt_u_d) +
                        tensors.natural_tangent_viscosity.inverse_quadratic_form(g.wrt_v_d));
        } else {
            integral_u_d += w * g.wrt_u_d;
            integral_v_d += w * g.wrt_v_d;
        }
    }
    if (variant == NaturalEvolution::Uniform) {
        acc += tensors.natural_curvature_viscosity.inverse_quadratic_form(integral_u_d) +
               tensors.natural_tangent_viscosity.inverse_quadratic_form(integral_v_d);
    }
    return acc;
}

std::vector<StrainRates> maximizing_rates(const EnergyModel& model,
                                          const DissipationTensors& tensors,
                                          const GridStrains& grid,
                                          std::span<const WrenchComponents> wrenches,
                                          NaturalEvolution variant) {
    check_wrench_sizes(grid, wrenches);

    std::vector<StrainRates> rates(grid.states.size());
    Vec3 uniform_u_d = Vec3::Zero();
    Vec3 uniform_v_d = Vec3::Zero();
    if (variant == NaturalEvolution::Uniform) {
        const EnergyGradients integral = integrated_natural_gradients(model, grid);
        uniform_u_d = tensors.natural_curvature_viscosity.solve(-integral.wrt_u_d);
        uniform_v_d = tensors.natural_tangent_viscosity.solve(-integral.wrt_v_d);
    }
    for (std::size_t i = 0; i < grid.states.size(); ++i) {
        const StrainPoint& p = grid.states[i];
        const EnergyGradients g = model.gradients(p.u_d, p.v_d, p.u, p.v);
        rates[i].u_dot = tensors.curvature_viscosity.solve(wrenches[i].m - g.wrt_u);
        rates[i].v_dot = tensors.tangent_viscosity.solve(wrenches[i].n - g.wrt_v);
        if (variant == NaturalEvolution::Local) {
            rates[i].u_d_dot = tensors.natural_curvature_viscosity.solve(-g.wrt_u_d);
            rates[i].v_d_dot = tensors.natural_tangent_viscosity.solve(-g.wrt_v_d);
        } else {
            rates[i].u_d_dot = uniform_u_d;
            rates[i].v_d_dot = uniform_v_d;
        }
    }
    return rates;
}

}  // namespace evorod
