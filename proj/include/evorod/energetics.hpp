#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "evorod/errors.hpp"
#include "evorod/grid.hpp"
#include "evorod/linalg.hpp"

namespace evorod {

// Diagonal coefficients of the quadratic free energy
//   psi = 1/2 sum_k [ A_k (u_k - u_dk)^2 + B_k (v_k - v_dk)^2
//                     + Ad_k u_dk^2 + Bd_k (v_dk - delta_3k)^2 ].
// curvature_* act on the Darboux strains u, tangent_* on the tangent strains v.
struct QuadraticEnergyParams {
    Vec3 curvature;          // A_kk
    Vec3 tangent;            // B_kk
    Vec3 natural_curvature;  // A_d,kk
    Vec3 natural_tangent;    // B_d,kk

    void validate() const;
};

// Symmetric positive definite 3x3 tensor with its eigendecomposition cached,
// so inverses and inverse square roots come straight from the spectrum.
class SpdTensor {
public:
    static constexpr double kSymmetryTol = 1e-12;
    static constexpr double kEigenvalueTol = 1e-10;

    explicit SpdTensor(const Mat3& matrix);

    const Mat3& matrix() const { return matrix_; }
    double min_eigenvalue() const { return eigenvalues_.minCoeff(); }

    Vec3 apply(const Vec3& x) const { return matrix_ * x; }
    Vec3 solve(const Vec3& x) const;
    Vec3 inverse_sqrt_apply(const Vec3& x) const;
    double quadratic_form(const Vec3& x) const { return x.dot(matrix_ * x); }
    double inverse_quadratic_form(const Vec3& x) const { return x.dot(solve(x)); }

private:
    Mat3 matrix_;
    Mat3 eigenvectors_;
    Vec3 eigenvalues_;
};

// The four viscosity-like tensors of the dissipation rate: conjugate to the
// rates of u, v, u_d, v_d respectively.
struct DissipationTensors {
    SpdTensor curvature_viscosity;          // pairs with du/dt
    SpdTensor tangent_viscosity;            // pairs with dv/dt
    SpdTensor natural_curvature_viscosity;  // pairs with du_d/dt
    SpdTensor natural_tangent_viscosity;    // pairs with dv_d/dt
};

struct EnergyGradients {
    Vec3 wrt_u_d;
    Vec3 wrt_v_d;
    Vec3 wrt_u;
    Vec3 wrt_v;
};

// Frame-indifferent free energy density as a function of director components.
// Either the built-in quadratic family or a caller-supplied value/gradient pair;
// custom gradients are validated by finite differences, not replaced by them.
class EnergyModel {
public:
    using ValueFn = std::function<double(const Vec3&, const Vec3&, const Vec3&, const Vec3&)>;
    using GradientFn = std::function<EnergyGradients(const Vec3&, const Vec3&, const Vec3&, const Vec3&)>;

    static EnergyModel quadratic(const QuadraticEnergyParams& params);
    static EnergyModel custom(ValueFn value, GradientFn gradients);

    double value(const Vec3& u_d, const Vec3& v_d, const Vec3& u, const Vec3& v) const;
    EnergyGradients gradients(const Vec3& u_d, const Vec3& v_d, const Vec3& u, const Vec3& v) const;

    const QuadraticEnergyParams* quadratic_params() const {
        return quadratic_ ? &params_ : nullptr;
    }

private:
    EnergyModel() = default;

    bool quadratic_ = false;
    QuadraticEnergyParams params_{};
    ValueFn value_;
    GradientFn gradients_;
};

// Energy coefficients plus dissipation tensors: everything constitutive needs.
struct MaterialModel {
    QuadraticEnergyParams energy;
    DissipationTensors tensors;
};

// Strain components of one material point, natural and current.
struct StrainPoint {
    Vec3 u_d;
    Vec3 v_d;
    Vec3 u;
    Vec3 v;
};

// Time derivatives of the strain components.
struct StrainRates {
    Vec3 u_d_dot;
    Vec3 v_d_dot;
    Vec3 u_dot;
    Vec3 v_dot;
};

enum class NaturalEvolution { Local, Uniform };

// Grid of strain states, required context for the uniform-evolution
// dissipation formulas (their natural terms integrate gradients over the rod).
struct GridStrains {
    RodGrid grid;
    std::vector<StrainPoint> states;  // one per node

    void validate() const {
        if (states.size() != grid.node_count())
            throw InvalidParameterError("GridStrains: states/node count mismatch");
    }
};

double energy_eval(const EnergyModel& model, const Vec3& u_d, const Vec3& v_d,
                   const Vec3& u, const Vec3& v);

EnergyGradients energy_grad(const EnergyModel& model, const Vec3& u_d, const Vec3& v_d,
                            const Vec3& u, const Vec3& v);

// Samples random natural states, sets the current strains equal to them, and
// checks that the current-strain gradients vanish (the stress-free property).
bool natural_state_check(const EnergyModel& model, int samples = 64, std::uint64_t seed = 0);

// Validates a model's gradients against central finite differences at random
// points; returns the worst relative deviation. Caller-supplied energies are
// never differenced in production paths, only checked here.
double gradient_check(const EnergyModel& model, int samples = 32, std::uint64_t seed = 0,
                      double step = 1e-6);

// Integrated energy gradients over the grid (trapezoid), used by the
// uniform-evolution laws.
EnergyGradients integrated_natural_gradients(const EnergyModel& model, const GridStrains& grid);

// Point-wise re-scaled entropy production rate xi.
//   Local:   rate quadratic forms in all four strain rates.
//   Uniform: current-rate quadratic forms plus gradient terms coupling the
//            point to the whole rod; needs `context` and may be negative.
double pointwise_dissipation(const EnergyModel& model, const DissipationTensors& tensors,
                             const StrainPoint& state, const StrainRates& rates,
                             NaturalEvolution variant, const GridStrains* context = nullptr);

// xi at every node of the grid, sharing the integral terms across nodes.
std::vector<double> pointwise_dissipation_field(const EnergyModel& model,
                                                const DissipationTensors& tensors,
                                                const GridStrains& grid,
                                                std::span<const StrainRates> rates,
                                                NaturalEvolution variant);

// Trapezoid quadrature of the rate quadratic forms. For the uniform variant
// the natural rates must agree across nodes (checked to 1e-10).
double total_dissipation(const DissipationTensors& tensors, const RodGrid& grid,
                         std::span<const StrainRates> rates, NaturalEvolution variant);

}  // namespace evorod
