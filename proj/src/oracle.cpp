#include "evorod/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace evorod {
namespace oracle {

void DiscreteMaximizationInstance::validate() const {
    const std::size_t n = weights.size();
    if (n == 0) throw InvalidParameterError("DiscreteMaximizationInstance: empty instance");
    if (n > 16) throw InvalidParameterError("DiscreteMaximizationInstance: desk scale means N <= 16");
    for (double w : weights) {
        if (!(w > 0.0)) throw InvalidParameterError("DiscreteMaximizationInstance: weights must be positive");
    }
    const bool sized = curvature_viscosity.size() == n && tangent_viscosity.size() == n &&
                       natural_curvature_viscosity.size() == n &&
                       natural_tangent_viscosity.size() == n && target_u.size() == n &&
                       target_v.size() == n && grad_u_d.size() == n && grad_v_d.size() == n;
    if (!sized) throw InvalidParameterError("DiscreteMaximizationInstance: field size mismatch");
}

DiscreteMaximizationInstance DiscreteMaximizationInstance::from_model(
    const EnergyModel& model, const DissipationTensors& tensors, const GridStrains& grid,
    std::span<const WrenchComponents> wrenches, Space space) {
    grid.validate();
    if (wrenches.size() != grid.states.size()) {
        throw InvalidParameterError("from_model: wrench field size mismatch");
    }
    DiscreteMaximizationInstance inst;
    inst.space = space;
    const std::size_t n = grid.states.size();
    inst.weights.resize(n);
    inst.curvature_viscosity.assign(n, tensors.curvature_viscosity.matrix());
    inst.tangent_viscosity.assign(n, tensors.tangent_viscosity.matrix());
    inst.natural_curvature_viscosity.assign(n, tensors.natural_curvature_viscosity.matrix());
    inst.natural_tangent_viscosity.assign(n, tensors.natural_tangent_viscosity.matrix());
    inst.target_u.resize(n);
    inst.target_v.resize(n);
    inst.grad_u_d.resize(n);
    inst.grad_v_d.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const StrainPoint& p = grid.states[i];
        const EnergyGradients g = model.gradients(p.u_d, p.v_d, p.u, p.v);
        inst.weights[i] = grid.grid.weight(i);
        inst.target_u[i] = wrenches[i].m - g.wrt_u;
        inst.target_v[i] = wrenches[i].n - g.wrt_v;
        inst.grad_u_d[i] = g.wrt_u_d;
        inst.grad_v_d[i] = g.wrt_v_d;
    }
    return inst;
}

namespace {

// Flat rate vector layout: per-node u_dot, v_dot blocks, then natural blocks
// (per node for FullL2, a single pair for UniformNatural).
struct Layout {
    std::size_t n;
    bool uniform;
    std::size_t natural_blocks() const { return uniform ? 1 : n; }
    std::size_t dim() const { return 6 * n + 6 * natural_blocks(); }

    Eigen::Map<const Vec3> u_dot(const Eigen::VectorXd& d, std::size_t i) const {
        return Eigen::Map<const Vec3>(d.data() + 6 * i);
    }
    Eigen::Map<const Vec3> v_dot(const Eigen::VectorXd& d, std::size_t i) const {
        return Eigen::Map<const Vec3>(d.data() + 6 * i + 3);
    }
    Eigen::Map<const Vec3> u_d_dot(const Eigen::VectorXd& d, std::size_t i) const {
        const std::size_t block = uniform ? 0 : i;
        return Eigen::Map<const Vec3>(d.data() + 6 * n + 6 * block);
    }
    Eigen::Map<const Vec3> v_d_dot(const Eigen::VectorXd& d, std::size_t i) const {
        const std::size_t block = uniform ? 0 : i;
        return Eigen::Map<const Vec3>(d.data() + 6 * n + 6 * block + 3);
    }
};

struct Forms {
    const DiscreteMaximizationInstance& inst;
    Layout layout;

    // F(d): the dissipation quadratic form.
    double quad(const Eigen::VectorXd& d) const {
        double acc = 0.0;
        for (std::size_t i = 0; i < layout.n; ++i) {
            const double w = inst.weights[i];
            acc += w * layout.u_dot(d, i).dot(inst.curvature_viscosity[i] * layout.u_dot(d, i));
            acc += w * layout.v_dot(d, i).dot(inst.tangent_viscosity[i] * layout.v_dot(d, i));
            acc += w * layout.u_d_dot(d, i).dot(inst.natural_curvature_viscosity[i] * layout.u_d_dot(d, i));
            acc += w * layout.v_d_dot(d, i).dot(inst.natural_tangent_viscosity[i] * layout.v_d_dot(d, i));
        }
        return acc;
    }

    // l(d): the linear side of the constraint F(d) = l(d).
    double lin(const Eigen::VectorXd& d) const {
        double acc = 0.0;
        for (std::size_t i = 0; i < layout.n; ++i) {
            const double w = inst.weights[i];
            acc += w * (inst.target_u[i].dot(layout.u_dot(d, i)) +
                        inst.target_v[i].dot(layout.v_dot(d, i)) -
                        inst.grad_u_d[i].dot(layout.u_d_dot(d, i)) -
                        inst.grad_v_d[i].dot(layout.v_d_dot(d, i)));
        }
        return acc;
    }

    Eigen::VectorXd quad_grad(const Eigen::VectorXd& d) const {
        Eigen::VectorXd g = Eigen::VectorXd::Zero(d.size());
        for (std::size_t i = 0; i < layout.n; ++i) {
            const double w = inst.weights[i];
            g.segment<3>(6 * i) += 2.0 * w * (inst.curvature_viscosity[i] * layout.u_dot(d, i));
            g.segment<3>(6 * i + 3) += 2.0 * w * (inst.tangent_viscosity[i] * layout.v_dot(d, i));
            const std::size_t nb = layout.uniform ? 0 : i;
            g.segment<3>(6 * layout.n + 6 * nb) +=
                2.0 * w * (inst.natural_curvature_viscosity[i] * layout.u_d_dot(d, i));
            g.segment<3>(6 * layout.n + 6 * nb + 3) +=
                2.0 * w * (inst.natural_tangent_viscosity[i] * layout.v_d_dot(d, i));
        }
        return g;
    }

    Eigen::VectorXd lin_grad() const {
        Eigen::VectorXd g = Eigen::VectorXd::Zero(layout.dim());
        for (std::size_t i = 0; i < layout.n; ++i) {
            const double w = inst.weights[i];
            g.segment<3>(6 * i) += w * inst.target_u[i];
            g.segment<3>(6 * i + 3) += w * inst.target_v[i];
            const std::size_t nb = layout.uniform ? 0 : i;
            g.segment<3>(6 * layout.n + 6 * nb) -= w * inst.grad_u_d[i];
            g.segment<3>(6 * layout.n + 6 * nb + 3) -= w * inst.grad_v_d[i];
        }
        return g;
    }
};

}  // namespace

BruteForceResult brute_force_maximize(const DiscreteMaximizationInstance& instance, int restarts,
                                      int iters, std::uint64_t seed) {
    instance.validate();
    const Layout layout{instance.node_count(),
                        instance.space == DiscreteMaximizationInstance::Space::UniformNatural};
    const Forms forms{instance, layout};
    const Eigen::VectorXd t = forms.lin_grad();

    BruteForceResult best;
    auto store_zero = [&] {
        best.u_dot.assign(layout.n, Vec3::Zero());
        best.v_dot.assign(layout.n, Vec3::Zero());
        best.u_d_dot.assign(layout.natural_blocks(), Vec3::Zero());
        best.v_d_dot.assign(layout.natural_blocks(), Vec3::Zero());
        best.value = 0.0;
    };
    if (t.cwiseAbs().maxCoeff() == 0.0) {
        // All targets vanish: the only feasible rate is zero.
        store_zero();
        return best;
    }

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);

    // Ratio being maximized over directions: r(d) = l(d)^2 / F(d). Its maximum
    // over the feasible scaling equals the constrained maximum of F.
    auto ratio = [&](const Eigen::VectorXd& d, double& l, double& f) {
        l = forms.lin(d);
        f = forms.quad(d);
        return (f > 0.0) ? l * l / f : 0.0;
    };

    double best_ratio = -1.0;
    Eigen::VectorXd best_dir;
    int degenerate = 0;

    for (int r = 0; r < restarts; ++r) {
        Eigen::VectorXd d(layout.dim());
        for (Eigen::Index k = 0; k < d.size(); ++k) d[k] = gauss(rng);
        d.normalize();

        double l, f;
        double val = ratio(d, l, f);
        if (std::abs(l) < 1e-14 * t.norm()) {
            ++degenerate;
        }

        Eigen::VectorXd dir = Eigen::VectorXd::Zero(d.size());
        Eigen::VectorXd grad_prev = Eigen::VectorXd::Zero(d.size());
        for (int it = 0; it < iters; ++it) {
            // grad of l^2/F at d
            const Eigen::VectorXd gq = forms.quad_grad(d);
            Eigen::VectorXd grad = (2.0 * l / f) * t - (l * l / (f * f)) * gq;
            const double gnorm2 = grad.squaredNorm();
            if (gnorm2 < 1e-28 * val * val) break;

            // Polak-Ribiere conjugate direction with restart on non-ascent.
            double beta = 0.0;
            const double prev2 = grad_prev.squaredNorm();
            if (it > 0 && prev2 > 0.0) {
                beta = std::max(0.0, grad.dot(grad - grad_prev) / prev2);
            }
            dir = grad + beta * dir;
            if (dir.dot(grad) <= 0.0) dir = grad;
            grad_prev = grad;

            // Exact line search for the quadratic-over-quadratic ratio along dir:
            // stationary eta solves (lp*f0 - l0*c) + eta (lp*c - l0*fp) = 0... one root.
            const double l0 = l, f0 = f;
            const double lp = t.dot(dir);
            const double c = 0.5 * dir.dot(gq);  // d^T W dir
            const double fp = forms.quad(dir);
            const double denom = l0 * fp - lp * c;
            if (denom == 0.0) break;
            const double eta = (lp * f0 - l0 * c) / denom;
            Eigen::VectorXd cand = d + eta * dir;
            const double cn = cand.norm();
            if (!(cn > 0.0) || !cand.allFinite()) break;
            cand /= cn;
            double lc, fc;
            const double cval = ratio(cand, lc, fc);
            if (!(cval > val * (1.0 + 1e-16))) break;
            d = cand;
            l = lc;
            f = fc;
            val = cval;
        }

        if (val > best_ratio) {
            best_ratio = val;
            best_dir = d;
        }
    }

    if (best_ratio <= 0.0) {
        if (degenerate == restarts) {
            throw NonconvergenceError(
                "brute_force_maximize: every restart was degenerate (l(d) = 0); result inconclusive");
        }
        store_zero();
        return best;
    }

    double l, f;
    ratio(best_dir, l, f);
    const double lambda = l / f;  // feasible scaling: lambda^2 F = lambda l
    const Eigen::VectorXd rates = lambda * best_dir;

    best.value = best_ratio;
    best.u_dot.resize(layout.n);
    best.v_dot.resize(layout.n);
    for (std::size_t i = 0; i < layout.n; ++i) {
        best.u_dot[i] = layout.u_dot(rates, i);
        best.v_dot[i] = layout.v_dot(rates, i);
    }
    best.u_d_dot.resize(layout.natural_blocks());
    best.v_d_dot.resize(layout.natural_blocks());
    for (std::size_t b = 0; b < layout.natural_blocks(); ++b) {
        best.u_d_dot[b] = Eigen::Map<const Vec3>(rates.data() + 6 * layout.n + 6 * b);
        best.v_d_dot[b] = Eigen::Map<const Vec3>(rates.data() + 6 * layout.n + 6 * b + 3);
    }
    return best;
}

Eigen::VectorXd finite_difference_gradient(
    const std::function<double(const Eigen::VectorXd&)>& f, const Eigen::VectorXd& x,
    double step) {
    Eigen::VectorXd g(x.size());
    Eigen::VectorXd probe = x;
    for (Eigen::Index k = 0; k < x.size(); ++k) {
        probe[k] = x[k] + step;
        const double fp = f(probe);
        probe[k] = x[k] - step;
        const double fm = f(probe);
        probe[k] = x[k];
        g[k] = (fp - fm) / (2.0 * step);
    }
    return g;
}

OdeTrace reference_integrate(
    const std::function<void(double, const Eigen::VectorXd&, Eigen::VectorXd&)>& rhs,
    const Eigen::VectorXd& y0, double t0, double t1, double tol,
    std::span<const double> sample_times) {
    // Dormand-Prince 5(4) coefficients.
    static const double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static const double a21 = 1.0 / 5;
    static const double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static const double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static const double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                        a54 = -212.0 / 729;
    static const double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                        a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static const double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                        b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static const double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                        e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

    if (!(t1 > t0)) throw InvalidParameterError("reference_integrate: need t1 > t0");
    if (!(tol > 0.0)) throw InvalidParameterError("reference_integrate: tolerance must be positive");

    OdeTrace trace;
    const bool sampling = !sample_times.empty();
    std::size_t next_sample = 0;
    auto record = [&](double t, const Eigen::VectorXd& y) {
        trace.t.push_back(t);
        trace.y.push_back(y);
    };
    if (!sampling) record(t0, y0);
    while (sampling && next_sample < sample_times.size() && sample_times[next_sample] <= t0) {
        record(t0, y0);
        ++next_sample;
    }

    Eigen::VectorXd y = y0;
    double t = t0;
    double h = (t1 - t0) * 1e-4;
    const double h_min = (t1 - t0) * 1e-15;
    const double t_eps = (t1 - t0) * 1e-14;

    Eigen::VectorXd k1(y.size()), k2(y.size()), k3(y.size()), k4(y.size()), k5(y.size()),
        k6(y.size()), k7(y.size());
    rhs(t, y, k1);

    while (t < t1 - t_eps) {
        if (h < h_min) throw NonconvergenceError("reference_integrate: step size underflow");
        double target = t1;
        if (sampling && next_sample < sample_times.size()) {
            target = std::min(target, sample_times[next_sample]);
        }
        const bool clamped = t + h >= target - t_eps;
        const double hs = clamped ? target - t : h;

        Eigen::VectorXd yt = y + hs * (a21 * k1);
        rhs(t + c2 * hs, yt, k2);
        yt = y + hs * (a31 * k1 + a32 * k2);
        rhs(t + c3 * hs, yt, k3);
        yt = y + hs * (a41 * k1 + a42 * k2 + a43 * k3);
        rhs(t + c4 * hs, yt, k4);
        yt = y + hs * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
        rhs(t + c5 * hs, yt, k5);
        yt = y + hs * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
        rhs(t + hs, yt, k6);
        const Eigen::VectorXd ynew = y + hs * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        rhs(t + hs, ynew, k7);

        const Eigen::VectorXd err_vec =
            hs * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
        double err = 0.0;
        for (Eigen::Index i = 0; i < y.size(); ++i) {
            const double sc = tol + tol * std::max(std::abs(y[i]), std::abs(ynew[i]));
            err += std::pow(err_vec[i] / sc, 2);
        }
        err = std::sqrt(err / static_cast<double>(y.size()));

        const double factor = std::clamp(0.9 * std::pow(std::max(err, 1e-10), -0.2), 0.2, 5.0);
        if (err <= 1.0) {
            t = clamped ? target : t + hs;
            y = ynew;
            k1 = k7;  // FSAL
            if (sampling) {
                while (next_sample < sample_times.size() &&
                       sample_times[next_sample] <= t + t_eps) {
                    record(t, y);
                    ++next_sample;
                }
            } else {
                record(t, y);
            }
            // Keep the controller's step when this one was shortened to land
            // on a target.
            if (!clamped || hs * factor > h) h = hs * factor;
        } else {
            h = hs * factor;
        }
        h = std::min(h, (t1 - t0) * 0.5);
    }
    while (sampling && next_sample < sample_times.size()) {
        record(t, y);
        ++next_sample;
    }
    return trace;
}

Mat2 matrix_exponential_reference(const Mat2& a, double t) {
    Mat2 b = -t * a;
    const double norm = b.cwiseAbs().maxCoeff();
    int squarings = 0;
    if (norm > 0.5) {
        squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
        b /= std::pow(2.0, squarings);
    }
    Mat2 result = Mat2::Identity();
    Mat2 term = Mat2::Identity();
    for (int k = 1; k <= 24; ++k) {
        term = (term * b) / static_cast<double>(k);
        result += term;
        if (term.cwiseAbs().maxCoeff() < 1e-18 * result.cwiseAbs().maxCoeff()) break;
    }
    for (int k = 0; k < squarings; ++k) result = result * result;
    return result;
}

Mat2 matrix_exponential_2x2(const Mat2& a, double t) {
    const double half_trace = 0.5 * a.trace();
    const Mat2 shifted = a - half_trace * Mat2::Identity();
    const double det = shifted.determinant();
    if (det < 0.0) {
        const double delta = std::sqrt(-det);
        if (delta > 1e-12) {
            // exp(-ht t) cosh(dt) and exp(-ht t) sinh(dt)/d assembled from the
            // two scalar exponentials, so neither factor overflows on its own
            const double slow = std::exp((delta - half_trace) * t);
            const double fast = std::exp(-(delta + half_trace) * t);
            const double cosh_term = 0.5 * (slow + fast);
            const double sinh_term = 0.5 * (slow - fast) / delta;
            return cosh_term * Mat2::Identity() - sinh_term * shifted;
        }
    }
    return matrix_exponential_reference(a, t);
}

namespace {

Mat3 random_spd(std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> log_eig(-1.5, 1.5);  // condition number <= 1e3
    Mat3 raw;
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) raw(r, c) = gauss(rng);
    const Mat3 q = Eigen::HouseholderQR<Mat3>(raw).householderQ();
    Vec3 eig;
    for (int k = 0; k < 3; ++k) eig[k] = std::pow(10.0, log_eig(rng));
    return q * eig.asDiagonal() * q.transpose();
}

}  // namespace

std::vector<MaximizerCheckSample> run_maximizer_checks(int instances, int restarts, int iters,
                                                       std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> positive(0.3, 1.5);

    std::vector<MaximizerCheckSample> out;
    out.reserve(static_cast<std::size_t>(instances));
    for (int inst = 0; inst < instances; ++inst) {
        const std::size_t n = (inst % 2 == 0) ? 4 : 8;
        const bool uniform = (inst % 4) >= 2;

        const DissipationTensors tensors{SpdTensor(random_spd(rng)), SpdTensor(random_spd(rng)),
                                         SpdTensor(random_spd(rng)), SpdTensor(random_spd(rng))};
        QuadraticEnergyParams energy;
        for (int k = 0; k < 3; ++k) {
            energy.curvature[k] = positive(rng);
            energy.tangent[k] = positive(rng);
            energy.natural_curvature[k] = positive(rng);
            energy.natural_tangent[k] = positive(rng);
        }
        const EnergyModel model = EnergyModel::quadratic(energy);

        // Unit-length grid: the homogeneous evolution law and its stated
        // maximum are transcribed for the unit rod.
        GridStrains grid{RodGrid(1.0, n), {}};
        grid.states.reserve(n);
        Vec3 shared_u_d(gauss(rng), gauss(rng), gauss(rng));
        Vec3 shared_v_d(gauss(rng), gauss(rng), positive(rng));
        for (std::size_t i = 0; i < n; ++i) {
            StrainPoint p;
            p.u_d = uniform ? shared_u_d : Vec3(gauss(rng), gauss(rng), gauss(rng));
            p.v_d = uniform ? shared_v_d : Vec3(gauss(rng), gauss(rng), positive(rng));
            p.u = Vec3(gauss(rng), gauss(rng), gauss(rng));
            p.v = Vec3(gauss(rng), gauss(rng), positive(rng));
            grid.states.push_back(p);
        }
        std::vector<WrenchComponents> wrenches(n);
        for (std::size_t i = 0; i < n; ++i) {
            wrenches[i].m = Vec3(gauss(rng), gauss(rng), gauss(rng));
            wrenches[i].n = Vec3(gauss(rng), gauss(rng), gauss(rng));
        }

        const NaturalEvolution variant = uniform ? NaturalEvolution::Uniform : NaturalEvolution::Local;
        const double closed_value = maximizer_value(model, tensors, grid, wrenches, variant);
        const std::vector<StrainRates> closed_rates =
            maximizing_rates(model, tensors, grid, wrenches, variant);

        const auto instance = DiscreteMaximizationInstance::from_model(
            model, tensors, grid, wrenches,
            uniform ? DiscreteMaximizationInstance::Space::UniformNatural
                    : DiscreteMaximizationInstance::Space::FullL2);
        const BruteForceResult bf =
            brute_force_maximize(instance, restarts, iters, seed ^ (0x9e3779b97f4a7c15ULL * (inst + 1)));

        MaximizerCheckSample sample;
        sample.nodes = n;
        sample.uniform = uniform;
        sample.value_gap_rel = (bf.value - closed_value) / closed_value;

        double dist2 = 0.0;
        double norm2 = 0.0;
        auto accumulate = [&](const Vec3& got, const Vec3& want) {
            dist2 += (got - want).squaredNorm();
            norm2 += want.squaredNorm();
        };
        for (std::size_t i = 0; i < n; ++i) {
            accumulate(bf.u_dot[i], closed_rates[i].u_dot);
            accumulate(bf.v_dot[i], closed_rates[i].v_dot);
        }
        if (uniform) {
            accumulate(bf.u_d_dot[0], closed_rates[0].u_d_dot);
            accumulate(bf.v_d_dot[0], closed_rates[0].v_d_dot);
        } else {
            for (std::size_t i = 0; i < n; ++i) {
                accumulate(bf.u_d_dot[i], closed_rates[i].u_d_dot);
                accumulate(bf.v_d_dot[i], closed_rates[i].v_d_dot);
            }
        }
        sample.rate_distance_rel = std::sqrt(dist2 / norm2);

        // Constraint residual of the closed-form rates, F(r) = l(r).
        const Layout layout{n, uniform};
        const Forms forms{instance, layout};
        Eigen::VectorXd flat(layout.dim());
        for (std::size_t i = 0; i < n; ++i) {
            flat.segment<3>(6 * i) = closed_rates[i].u_dot;
            flat.segment<3>(6 * i + 3) = closed_rates[i].v_dot;
            if (!uniform) {
                flat.segment<3>(6 * n + 6 * i) = closed_rates[i].u_d_dot;
                flat.segment<3>(6 * n + 6 * i + 3) = closed_rates[i].v_d_dot;
            }
        }
        if (uniform) {
            flat.segment<3>(6 * n) = closed_rates[0].u_d_dot;
            flat.segment<3>(6 * n + 3) = closed_rates[0].v_d_dot;
        }
        const double f = forms.quad(flat);
        const double l = forms.lin(flat);
        sample.constraint_residual_rel = std::abs(f - l) / std::max(f, 1e-300);

        out.push_back(sample);
    }
    return out;
}

}  // namespace oracle
}  // namespace evorod
