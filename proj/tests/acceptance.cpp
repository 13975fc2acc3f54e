// Acceptance suite: closed-form reproduction and property checks at desk
// scale. Each criterion prints one PASS/FAIL line with its measured residuals
// and runtime; the exit code is the number of failures.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <vector>

#include "evorod/constitutive.hpp"
#include "evorod/kinematics.hpp"
#include "evorod/oracle.hpp"
#include "evorod/torsion.hpp"

using namespace evorod;
using torsion::InputHistory;
using torsion::TorsionParams;

namespace {

int failures = 0;

struct Criterion {
    const char* label;
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    bool ok = true;
    double runtime_bound;
    std::string detail;

    Criterion(const char* name, double runtime_limit_seconds)
        : label(name), runtime_bound(runtime_limit_seconds) {}

    void require(bool condition, const char* what, double value) {
        if (!condition) {
            ok = false;
            char buf[160];
            std::snprintf(buf, sizeof(buf), " [%s = %.3e]", what, value);
            detail += buf;
        }
    }

    void finish() {
        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (seconds >= runtime_bound) {
            ok = false;
            detail += " [runtime bound exceeded]";
        }
        std::printf("[%s] %s (%.2fs)%s\n", ok ? "PASS" : "FAIL", label, seconds, detail.c_str());
        if (!ok) ++failures;
    }
};

Vec3 rand_vec(std::mt19937_64& rng, double scale = 1.0) {
    std::normal_distribution<double> gauss(0.0, scale);
    return Vec3(gauss(rng), gauss(rng), gauss(rng));
}

TorsionParams random_torsion_params(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> coeff(0.2, 5.0);
    TorsionParams p;
    p.mu = coeff(rng);
    p.mu_d = coeff(rng);
    p.alpha = coeff(rng);
    p.alpha_d = coeff(rng);
    return p;
}

// 1. Stress relaxation closed form at (2, 1, 0.5, 1, 1).
void criterion_relaxation_closed_form() {
    Criterion c("criterion 1: stress relaxation closed form", 1.0);
    TorsionParams p;
    p.mu = 0.5;
    p.mu_d = 1.0;
    p.alpha = 2.0;
    p.alpha_d = 1.0;
    const double u0 = 1.0;

    const auto trace = torsion::relaxation_response(
        p, InputHistory(InputHistory::Kind::PrescribedTwist, InputHistory::IdealStep{u0}), 10.0,
        10000);
    double worst = 0.0;
    for (std::size_t k = 0; k < trace.t.size(); ++k) {
        const double t = trace.t[k];
        if (t < 0.01) continue;
        const double expected = 2.0 / 3.0 + 4.0 / 3.0 * std::exp(-3.0 * t);
        worst = std::max(worst, std::abs(trace.torque[k] - expected));
    }
    c.require(worst < 1e-8, "max torque deviation", worst);
    c.require(trace.impulse_amplitude == 0.5, "impulse amplitude", trace.impulse_amplitude);

    // independent reference: integrate the twist/natural-twist system under a
    // 1e-4 ramp and compare after t > 0.05
    const double ramp = 1e-4;
    const InputHistory smooth(InputHistory::Kind::PrescribedTwist,
                              InputHistory::SmoothedStep{u0, ramp});
    const auto rhs = [&](double t, const Eigen::VectorXd& y, Eigen::VectorXd& dy) {
        dy.resize(1);
        dy[0] = (p.alpha * smooth.value(t) - (p.alpha + p.alpha_d) * y[0]) / p.mu_d;
    };
    std::vector<double> samples;
    for (double t = 0.06; t <= 10.0; t += 0.35) samples.push_back(t);
    const auto head = oracle::reference_integrate(rhs, Eigen::VectorXd::Zero(1), 0.0, ramp, 1e-11);
    const auto tail = oracle::reference_integrate(rhs, head.y.back(), ramp, 10.0, 1e-11, samples);
    double worst_ref = 0.0;
    for (std::size_t k = 0; k < samples.size(); ++k) {
        const double m_ref = p.alpha * u0 - p.alpha * tail.y[k][0];  // mu du/dt = 0 after the ramp
        const double m_step = 2.0 / 3.0 + 4.0 / 3.0 * std::exp(-3.0 * samples[k]);
        worst_ref = std::max(worst_ref, std::abs(m_ref - m_step));
    }
    c.require(worst_ref < 5e-4, "ramp reference deviation", worst_ref);
    c.finish();
}

// 2. Relaxation limits and monotonicity over random parameter draws.
void criterion_relaxation_limits() {
    Criterion c("criterion 2: relaxation limits and monotone decay", 5.0);
    std::mt19937_64 rng(202);
    std::uniform_real_distribution<double> amp(0.5, 2.0);
    double worst_initial = 0.0, worst_final = 0.0;
    bool monotone = true;
    for (int draw = 0; draw < 20; ++draw) {
        const TorsionParams p = random_torsion_params(rng);
        const double u0 = amp(rng);
        const double rate = (p.alpha + p.alpha_d) / p.mu_d;
        const double t_end = 40.0 / rate;
        const auto trace = torsion::relaxation_response(
            p, InputHistory(InputHistory::Kind::PrescribedTwist, InputHistory::IdealStep{u0}),
            t_end, 2000);

        worst_initial = std::max(
            worst_initial, std::abs(trace.torque.front() - p.alpha * u0) / (p.alpha * u0));
        const double plateau = p.alpha * p.alpha_d * u0 / (p.alpha + p.alpha_d);
        worst_final = std::max(worst_final,
                               std::abs(trace.torque.back() - plateau) / std::max(1.0, plateau));

        // strict decrease on a 10^4-point grid across the active decay window
        const auto dense = torsion::relaxation_response(
            p, InputHistory(InputHistory::Kind::PrescribedTwist, InputHistory::IdealStep{u0}),
            5.0 / rate, 10000);
        for (std::size_t k = 1; k < dense.t.size(); ++k) {
            monotone = monotone && dense.torque[k] < dense.torque[k - 1];
        }
    }
    c.require(worst_initial < 1e-6, "worst m(0+) relative error", worst_initial);
    c.require(worst_final < 1e-6, "worst m(inf) relative error", worst_final);
    c.require(monotone, "monotone decrease", monotone ? 1.0 : 0.0);
    c.finish();
}

// 3. Creep asymptotes and the closed-form matrix exponential.
void criterion_creep() {
    Criterion c("criterion 3: creep asymptotes and matrix exponential", 5.0);
    std::mt19937_64 rng(303);
    std::uniform_real_distribution<double> amp(0.5, 2.0);
    std::uniform_real_distribution<double> time(0.05, 3.0);
    double worst_u = 0.0, worst_u_d = 0.0, worst_expm = 0.0;
    for (int draw = 0; draw < 20; ++draw) {
        const TorsionParams p = random_torsion_params(rng);
        const double m0 = amp(rng);
        const Mat2 a = p.creep_matrix();
        const double slowest = std::min(a.eigenvalues()[0].real(), a.eigenvalues()[1].real());
        const double t_end = 30.0 / slowest;

        const auto trace = torsion::creep_response(
            p, InputHistory(InputHistory::Kind::PrescribedTorque, InputHistory::IdealStep{m0}),
            t_end, 500);
        const double u_limit = (p.alpha + p.alpha_d) * m0 / (p.alpha * p.alpha_d);
        const double u_d_limit = m0 / p.alpha_d;
        worst_u = std::max(worst_u, std::abs(trace.u.back() - u_limit));
        worst_u_d = std::max(worst_u_d, std::abs(trace.u_d.back() - u_d_limit));

        const double t = time(rng) / slowest;
        const Mat2 closed = oracle::matrix_exponential_2x2(a, t);
        const Mat2 reference = oracle::matrix_exponential_reference(a, t);
        worst_expm = std::max(worst_expm, (closed - reference).cwiseAbs().maxCoeff() /
                                              std::max(1e-30, reference.cwiseAbs().maxCoeff()));
    }
    c.require(worst_u < 1e-6, "worst u(inf) deviation", worst_u);
    c.require(worst_u_d < 1e-6, "worst u_d(inf) deviation", worst_u_d);
    c.require(worst_expm < 1e-10, "worst expm deviation", worst_expm);
    c.finish();
}

// 4. mu = 0 creep against the reference integration of the reduced system.
void criterion_creep_mu_zero() {
    Criterion c("criterion 4: mu = 0 creep formulas", 1.0);
    TorsionParams p;
    p.mu = 0.0;
    p.mu_d = 1.3;
    p.alpha = 2.2;
    p.alpha_d = 0.8;
    const double m0 = 1.4;

    const auto trace = torsion::creep_mu_zero(
        p, InputHistory(InputHistory::Kind::PrescribedTorque, InputHistory::IdealStep{m0}), 12.0,
        1200);

    const auto rhs = [&](double, const Eigen::VectorXd& y, Eigen::VectorXd& dy) {
        dy.resize(1);
        dy[0] = (m0 - p.alpha_d * y[0]) / p.mu_d;
    };
    std::vector<double> samples;
    for (std::size_t k = 1; k <= 12; ++k) samples.push_back(static_cast<double>(k));
    const auto reference =
        oracle::reference_integrate(rhs, Eigen::VectorXd::Zero(1), 0.0, 12.0, 1e-12, samples);
    double worst = 0.0;
    for (std::size_t k = 0; k < samples.size(); ++k) {
        const std::size_t idx = static_cast<std::size_t>(samples[k] / 12.0 * 1200.0);
        worst = std::max(worst, std::abs(trace.u_d[idx] - reference.y[k][0]));
        worst = std::max(worst, std::abs(trace.u[idx] - (m0 / p.alpha + reference.y[k][0])));
    }
    c.require(worst < 1e-10, "worst trace deviation", worst);
    c.finish();
}

// 5. Maximization principle via projected-ascent brute force.
void criterion_maximization() {
    Criterion c("criterion 5: total-dissipation maximization", 60.0);
    const auto samples = oracle::run_maximizer_checks(20, 50, 500, 505);
    double worst_over = 0.0, worst_under = 0.0, worst_rate = 0.0, worst_constraint = 0.0;
    for (const auto& s : samples) {
        worst_over = std::max(worst_over, s.value_gap_rel);
        worst_under = std::max(worst_under, -s.value_gap_rel);
        worst_rate = std::max(worst_rate, s.rate_distance_rel);
        worst_constraint = std::max(worst_constraint, s.constraint_residual_rel);
    }
    c.require(worst_over <= 1e-8, "largest overshoot", worst_over);
    c.require(worst_under <= 1e-6, "largest undershoot", worst_under);
    c.require(worst_rate < 1e-4, "argmax distance", worst_rate);
    c.require(worst_constraint < 1e-10, "constraint residual", worst_constraint);
    c.finish();
}

// 6. Sign structure of the pointwise dissipation rate.
void criterion_dissipation_signs() {
    Criterion c("criterion 6: dissipation sign structure", 5.0);
    QuadraticEnergyParams energy;
    energy.curvature = Vec3(1.0, 1.0, 2.0);
    energy.tangent = Vec3::Ones();
    energy.natural_curvature = Vec3::Ones();
    energy.natural_tangent = Vec3::Ones();
    const EnergyModel model = EnergyModel::quadratic(energy);
    const DissipationTensors tensors{SpdTensor(Mat3::Identity()), SpdTensor(Mat3::Identity()),
                                     SpdTensor(Vec3(1.0, 1.0, 0.5).asDiagonal()),
                                     SpdTensor(Mat3::Identity())};

    const std::size_t n = 401;
    GridStrains grid{RodGrid(1.0, n), {}};
    std::vector<double> twist(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double s = grid.grid.position(i);
        twist[i] = std::cos(2.0 * std::numbers::pi * s) - 0.2;
        grid.states.push_back(
            StrainPoint{Vec3::Zero(), Vec3::UnitZ(), Vec3(0, 0, twist[i]), Vec3::UnitZ()});
    }
    const std::vector<StrainRates> frozen(
        n, StrainRates{Vec3::Zero(), Vec3::Zero(), Vec3::Zero(), Vec3::Zero()});
    const auto xi =
        pointwise_dissipation_field(model, tensors, grid, frozen, NaturalEvolution::Uniform);

    double twist_integral = 0.0;
    for (std::size_t i = 0; i < n; ++i) twist_integral += grid.grid.weight(i) * twist[i];
    const double predicted = 2.0 * 2.0 / 0.5 * twist[0] * (-0.2);  // exact integral of the profile
    const double h = grid.grid.spacing();

    c.require(xi.front() < 0.0, "xi(s0)", xi.front());
    c.require(std::abs(xi.front() - predicted) <= 10.0 * h * h * std::abs(predicted) + 1e-12,
              "closed-form deviation", std::abs(xi.front() - predicted));
    const double total = grid.grid.integrate(xi);
    c.require(total >= -1e-12, "total dissipation", total);
    c.require(std::abs(twist_integral - (-0.2)) < 1e-12, "quadrature of the profile",
              twist_integral);

    // pointwise non-negativity of the local variant on random states and rates
    std::mt19937_64 rng(606);
    double most_negative = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const StrainPoint state{rand_vec(rng), rand_vec(rng) + Vec3(0, 0, 3.0), rand_vec(rng),
                                rand_vec(rng) + Vec3(0, 0, 3.0)};
        const StrainRates rates{rand_vec(rng), rand_vec(rng), rand_vec(rng), rand_vec(rng)};
        most_negative = std::min(most_negative, pointwise_dissipation(model, tensors, state, rates,
                                                                      NaturalEvolution::Local));
    }
    c.require(most_negative >= -1e-12, "local variant minimum", most_negative);
    c.finish();
}

// 7. Frame indifference of the energy and the component vectors.
void criterion_frame_indifference() {
    Criterion c("criterion 7: frame indifference", 1.0);
    QuadraticEnergyParams energy;
    energy.curvature = Vec3(1.3, 0.8, 2.0);
    energy.tangent = Vec3(0.9, 1.1, 1.7);
    energy.natural_curvature = Vec3(0.5, 0.6, 0.7);
    energy.natural_tangent = Vec3(1.2, 0.4, 0.3);
    const EnergyModel model = EnergyModel::quadratic(energy);

    std::mt19937_64 rng(707);
    std::uniform_real_distribution<double> angle(0.0, std::numbers::pi);
    std::uniform_real_distribution<double> positive(0.2, 2.0);
    double worst_energy = 0.0, worst_components = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const DirectorFrame current = DirectorFrame::axis_angle(rand_vec(rng), angle(rng));
        const DirectorFrame natural = DirectorFrame::axis_angle(rand_vec(rng), angle(rng));
        const Vec3 u = rand_vec(rng), u_d = rand_vec(rng);
        const Vec3 v(0.3, -0.1, positive(rng)), v_d(0.1, 0.2, positive(rng));
        const ConfigurationPair pair{Configuration::from_components(natural, u_d, v_d),
                                     Configuration::from_components(current, u, v)};
        const DirectorFrame q = DirectorFrame::axis_angle(rand_vec(rng), angle(rng));
        const ConfigurationPair moved = apply_frame_change(q, pair);

        worst_components = std::max(
            {worst_components, (moved.current.darboux_components() - u).cwiseAbs().maxCoeff(),
             (moved.current.tangent_components() - v).cwiseAbs().maxCoeff(),
             (moved.natural.darboux_components() - u_d).cwiseAbs().maxCoeff(),
             (moved.natural.tangent_components() - v_d).cwiseAbs().maxCoeff()});

        const double before = energy_eval(model, u_d, v_d, u, v);
        const double after = energy_eval(
            model, moved.natural.darboux_components(), moved.natural.tangent_components(),
            moved.current.darboux_components(), moved.current.tangent_components());
        worst_energy = std::max(worst_energy, std::abs(before - after));
    }
    c.require(worst_components < 1e-12, "component deviation", worst_components);
    c.require(worst_energy < 1e-12, "energy deviation", worst_energy);
    c.finish();
}

// 8. Analytic gradients against central finite differences.
void criterion_gradients() {
    Criterion c("criterion 8: gradient correctness", 1.0);
    QuadraticEnergyParams energy;
    energy.curvature = Vec3(1.5, 0.7, 2.0);
    energy.tangent = Vec3(1.0, 1.2, 0.8);
    energy.natural_curvature = Vec3(0.4, 0.9, 1.0);
    energy.natural_tangent = Vec3(0.6, 0.5, 1.1);
    const EnergyModel model = EnergyModel::quadratic(energy);

    std::mt19937_64 rng(808);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        Eigen::VectorXd x(12);
        for (int k = 0; k < 12; ++k) x[k] = rand_vec(rng)[0];
        const auto fd = oracle::finite_difference_gradient(
            [&](const Eigen::VectorXd& q) {
                return energy_eval(model, q.segment<3>(0), q.segment<3>(3), q.segment<3>(6),
                                   q.segment<3>(9));
            },
            x, 1e-6);
        const auto g =
            energy_grad(model, x.segment<3>(0), x.segment<3>(3), x.segment<3>(6), x.segment<3>(9));
        Eigen::VectorXd analytic(12);
        analytic << g.wrt_u_d, g.wrt_v_d, g.wrt_u, g.wrt_v;
        worst = std::max(worst, (fd - analytic).norm() / std::max(1.0, analytic.norm()));
    }
    c.require(worst < 1e-6, "worst relative gradient error", worst);
    c.finish();
}

// 9. Dynamic solve approaches the quasi-static creep as nu -> 0.
void criterion_quasistatic_limit() {
    Criterion c("criterion 9: dynamic-to-quasistatic limit", 60.0);
    TorsionParams p;
    p.nu = 1e-4;
    p.mu = 0.5;
    p.mu_d = 1.0;
    p.alpha = 1.0;
    p.alpha_d = 1.0;
    const double ramp = 0.01;
    const InputHistory torque(InputHistory::Kind::PrescribedTorque,
                              InputHistory::SmoothedStep{1.0, ramp});

    torsion::DynamicOptions options;
    options.grid_nodes = 64;
    options.t_end = 3.0;
    options.samples = 300;
    const auto dynamic = torsion::dynamic_pde_solve(p, options, torque);

    TorsionParams quasistatic = p;
    quasistatic.nu = 0.0;
    const auto creep = torsion::creep_response(quasistatic, torque, 3.0, 300);

    double worst = 0.0;
    for (std::size_t k = 0; k < dynamic.times.size(); ++k) {
        if (dynamic.times[k] <= 0.05) continue;
        const double reference = creep.u[k];
        worst = std::max(worst,
                         std::abs(dynamic.boundary_twist[k] - reference) / std::abs(reference));
    }
    c.require(worst < 1e-2, "worst boundary twist relative deviation", worst);
    c.require(dynamic.energy_balance_residual < 1e-6, "energy balance residual",
              dynamic.energy_balance_residual);
    c.finish();
}

// 10. Kinematics round trip at second order.
void criterion_kinematics_round_trip() {
    Criterion c("criterion 10: kinematics round trip", 1.0);
    auto error_of = [](std::size_t nodes) {
        const double h = 1.0 / static_cast<double>(nodes - 1);
        std::vector<Vec3> u(nodes);
        for (std::size_t i = 0; i < nodes; ++i) {
            const double s = h * static_cast<double>(i);
            u[i] = Vec3(std::sin(std::numbers::pi * s), 0.5 * std::cos(2.0 * std::numbers::pi * s),
                        0.3 + 0.4 * s);
        }
        const auto frames = rotation_field_of_darboux(u, DirectorFrame::identity(), h);
        const auto back = darboux_of_rotation_field(frames, h);
        double err = 0.0;
        for (std::size_t i = 1; i + 1 < nodes; ++i) {
            err = std::max(err, (back[i] - u[i]).cwiseAbs().maxCoeff());
        }
        return err;
    };
    const double e64 = error_of(64);
    const double e128 = error_of(128);
    const double order = std::log2(e64 / e128) / std::log2(127.0 / 63.0);
    c.require(order >= 1.9, "observed order", order);
    c.require(e128 < 1e-3, "fine-grid error", e128);
    c.finish();
}

}  // namespace

int main() {
    criterion_relaxation_closed_form();
    criterion_relaxation_limits();
    criterion_creep();
    criterion_creep_mu_zero();
    criterion_maximization();
    criterion_dissipation_signs();
    criterion_frame_indifference();
    criterion_gradients();
    criterion_quasistatic_limit();
    criterion_kinematics_round_trip();
    if (failures == 0) {
        std::printf("all acceptance criteria passed\n");
    } else {
        std::printf("%d acceptance criteria failed\n", failures);
    }
    return failures;
}
