#include "evorod/energetics.hpp"

#include <cmath>
#include <random>
#include <sstream>

namespace evorod {

void QuadraticEnergyParams::validate() const {
    for (const Vec3* block : {&curvature, &tangent, &natural_curvature, &natural_tangent}) {
        for (int k = 0; k < 3; ++k) {
            if (!((*block)[k] > 0.0)) {
                throw InvalidParameterError("QuadraticEnergyParams: all twelve coefficients must be positive");
            }
        }
    }
}

SpdTensor::SpdTensor(const Mat3& matrix) : matrix_(matrix) {
    const double scale = std::max(1.0, matrix.cwiseAbs().maxCoeff());
    const double asym = (matrix - matrix.transpose()).cwiseAbs().maxCoeff();
    if (asym > kSymmetryTol * scale) {
        std::ostringstream msg;
        msg << "SpdTensor: matrix not symmetric (defect " << asym << ")";
        throw InvalidParameterError(msg.str());
    }
    Eigen::SelfAdjointEigenSolver<Mat3> eig(matrix);
    eigenvalues_ = eig.eigenvalues();
    eigenvectors_ = eig.eigenvectors();
    if (!(eigenvalues_.minCoeff() > kEigenvalueTol * scale)) {
        std::ostringstream msg;
        msg << "SpdTensor: matrix not positive definite (min eigenvalue "
            << eigenvalues_.minCoeff() << ")";
        throw InvalidParameterError(msg.str());
    }
}

Vec3 SpdTensor::solve(const Vec3& x) const {
    return eigenvectors_ * (eigenvectors_.transpose() * x).cwiseQuotient(eigenvalues_);
}

Vec3 SpdTensor::inverse_sqrt_apply(const Vec3& x) const {
    const Vec3 scaled = (eigenvectors_.transpose() * x).cwiseQuotient(eigenvalues_.cwiseSqrt());
    return eigenvectors_ * scaled;
}

EnergyModel EnergyModel::quadratic(const QuadraticEnergyParams& params) {
    params.validate();
    EnergyModel model;
    model.quadratic_ = true;
    model.params_ = params;
    return model;
}

EnergyModel EnergyModel::custom(ValueFn value, GradientFn gradients) {
    if (!value || !gradients) throw InvalidParameterError("EnergyModel::custom: null callable");
    EnergyModel model;
    model.value_ = std::move(value);
    model.gradients_ = std::move(gradients);
    return model;
}

double EnergyModel::value(const Vec3& u_d, const Vec3& v_d, const Vec3& u, const Vec3& v) const {
    if (!quadratic_) return value_(u_d, v_d, u, v);
    const Vec3 du = u - u_d;
    const Vec3 dv = v - v_d;
    const Vec3 dvd = v_d - Vec3::UnitZ();
    double acc = 0.0;
    for (int k = 0; k < 3; ++k) {
        acc += params_.curvature[k] * du[k] * du[k] + params_.tangent[k] * dv[k] * dv[k] +
               params_.natural_curvature[k] * u_d[k] * u_d[k] +
               params_.natural_tangent[k] * dvd[k] * dvd[k];
    }
    return 0.5 * acc;
}

EnergyGradients EnergyModel::gradients(const Vec3& u_d, const Vec3& v_d, const Vec3& u,
                                       const Vec3& v) const {
    if (!quadratic_) return gradients_(u_d, v_d, u, v);
    const Vec3 du = params_.curvature.cwiseProduct(u - u_d);
    const Vec3 dv = params_.tangent.cwiseProduct(v - v_d);
    EnergyGradients g;
    g.wrt_u = du;
    g.wrt_v = dv;
    g.wrt_u_d = -du + params_.natural_curvature.cwiseProduct(u_d);
    g.wrt_v_d = -dv + params_.natural_tangent.cwiseProduct(v_d - Vec3::UnitZ());
    return g;
}

double energy_eval(const EnergyModel& model, const Vec3& u_d, const Vec3& v_d, const Vec3& u,
                   const Vec3& v) {
    return model.value(u_d, v_d, u, v);
}

EnergyGradients energy_grad(const EnergyModel& model, const Vec3& u_d, const Vec3& v_d,
                            const Vec3& u, const Vec3& v) {
    return model.gradients(u_d, v_d, u, v);
}

bool natural_state_check(const EnergyModel& model, int samples, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> span(-2.0, 2.0);
    std::uniform_real_distribution<double> positive(0.2, 2.0);
    for (int s = 0; s < samples; ++s) {
        const Vec3 u_d(span(rng), span(rng), span(rng));
        const Vec3 v_d(span(rng), span(rng), positive(rng));
        const EnergyGradients g = model.gradients(u_d, v_d, u_d, v_d);
        if (g.wrt_u.cwiseAbs().maxCoeff() > 1e-10 || g.wrt_v.cwiseAbs().maxCoeff() > 1e-10) {
            return false;
        }
    }
    return true;
}

double gradient_check(const EnergyModel& model, int samples, std::uint64_t seed, double step) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> span(-1.5, 1.5);
    double worst = 0.0;
    for (int s = 0; s < samples; ++s) {
        Vec3 args[4];
        for (Vec3& a : args) a = Vec3(span(rng), span(rng), span(rng));
        const EnergyGradients g = model.gradients(args[0], args[1], args[2], args[3]);
        const Vec3* analytic[4] = {&g.wrt_u_d, &g.wrt_v_d, &g.wrt_u, &g.wrt_v};
        double norm = 0.0;
        for (const Vec3* a : analytic) norm += a->squaredNorm();
        norm = std::max(1.0, std::sqrt(norm));
        for (int block = 0; block < 4; ++block) {
            for (int k = 0; k < 3; ++k) {
                const double saved = args[block][k];
                args[block][k] = saved + step;
                const double above = model.value(args[0], args[1], args[2], args[3]);
                args[block][k] = saved - step;
                const double below = model.value(args[0], args[1], args[2], args[3]);
                args[block][k] = saved;
                const double fd = (above - below) / (2.0 * step);
                worst = std::max(worst, std::abs(fd - (*analytic[block])[k]) / norm);
            }
        }
    }
    return worst;
}

EnergyGradients integrated_natural_gradients(const EnergyModel& model, const GridStrains& grid) {
    grid.validate();
    EnergyGradients acc{Vec3::Zero(), Vec3::Zero(), Vec3::Zero(), Vec3::Zero()};
    for (std::size_t i = 0; i < grid.states.size(); ++i) {
        const StrainPoint& p = grid.states[i];
        const EnergyGradients g = model.gradients(p.u_d, p.v_d, p.u, p.v);
        const double w = grid.grid.weight(i);
        acc.wrt_u_d += w * g.wrt_u_d;
        acc.wrt_v_d += w * g.wrt_v_d;
        acc.wrt_u += w * g.wrt_u;
        acc.wrt_v += w * g.wrt_v;
    }
    return acc;
}

namespace {

double current_rate_terms(const DissipationTensors& tensors, const StrainRates& rates) {
    return tensors.curvature_viscosity.quadratic_form(rates.u_dot) +
           tensors.tangent_viscosity.quadratic_form(rates.v_dot);
}

}  // namespace

double pointwise_dissipation(const EnergyModel& model, const DissipationTensors& tensors,
                             const StrainPoint& state, const StrainRates& rates,
                             NaturalEvolution variant, const GridStrains* context) {
    if (variant == NaturalEvolution::Local) {
        return current_rate_terms(tensors, rates) +
               tensors.natural_curvature_viscosity.quadratic_form(rates.u_d_dot) +
               tensors.natural_tangent_viscosity.quadratic_form(rates.v_d_dot);
    }
    if (context == nullptr) {
        throw MissingContextError("pointwise_dissipation: uniform variant needs the grid of states");
    }
    const EnergyGradients integral = integrated_natural_gradients(model, *context);
    const EnergyGradients local = model.gradients(state.u_d, state.v_d, state.u, state.v);
    return current_rate_terms(tensors, rates) +
           local.wrt_u_d.dot(tensors.natural_curvature_viscosity.solve(integral.wrt_u_d)) +
           local.wrt_v_d.dot(tensors.natural_tangent_viscosity.solve(integral.wrt_v_d));
}

std::vector<double> pointwise_dissipation_field(const EnergyModel& model,
                                                const DissipationTensors& tensors,
                                                const GridStrains& grid,
                                                std::span<const StrainRates> rates,
                                                NaturalEvolution variant) {
    grid.validate();
    if (rates.size() != grid.states.size()) {
        throw InvalidParameterError("pointwise_dissipation_field: rates/states size mismatch");
    }
    std::vector<double> xi(grid.states.size());
    if (variant == NaturalEvolution::Local) {
        for (std::size_t i = 0; i < xi.size(); ++i) {
            xi[i] = pointwise_dissipation(model, tensors, grid.states[i], rates[i], variant);
        }
        return xi;
    }
    const EnergyGradients integral = integrated_natural_gradients(model, grid);
    const Vec3 mdi = tensors.natural_curvature_viscosity.solve(integral.wrt_u_d);
    const Vec3 ndi = tensors.natural_tangent_viscosity.solve(integral.wrt_v_d);
    for (std::size_t i = 0; i < xi.size(); ++i) {
        const StrainPoint& p = grid.states[i];
        const EnergyGradients local = model.gradients(p.u_d, p.v_d, p.u, p.v);
        xi[i] = current_rate_terms(tensors, rates[i]) + local.wrt_u_d.dot(mdi) + local.wrt_v_d.dot(ndi);
    }
    return xi;
}

double total_dissipation(const DissipationTensors& tensors, const RodGrid& grid,
                         std::span<const StrainRates> rates, NaturalEvolution variant) {
    if (rates.size() != grid.node_count()) {
        throw InvalidParameterError("total_dissipation: rates/node count mismatch");
    }
    if (variant == NaturalEvolution::Uniform) {
        for (const StrainRates& r : rates) {
            if ((r.u_d_dot - rates[0].u_d_dot).cwiseAbs().maxCoeff() > 1e-10 ||
                (r.v_d_dot - rates[0].v_d_dot).cwiseAbs().maxCoeff() > 1e-10) {
                throw PreconditionError("total_dissipation: uniform variant requires uniform natural rates");
            }
        }
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < rates.size(); ++i) {
        const StrainRates& r = rates[i];
        acc += grid.weight(i) *
               (current_rate_terms(tensors, r) +
                tensors.natural_curvature_viscosity.quadratic_form(r.u_d_dot) +
                tensors.natural_tangent_viscosity.quadratic_form(r.v_d_dot));
    }
    return acc;
}

}  // namespace evorod
