#include "evorod/torsion.hpp"

#include <algorithm>
#include <cmath>

#include "evorod/oracle.hpp"

namespace evorod {
namespace torsion {

void TorsionParams::validate() const {
    if (!(mu_d > 0.0) || !(alpha > 0.0) || !(alpha_d > 0.0)) {
        throw InvalidParameterError("TorsionParams: mu_d, alpha, alpha_d must be positive");
    }
    if (nu < 0.0 || mu < 0.0) {
        throw InvalidParameterError("TorsionParams: nu and mu must be non-negative");
    }
}

Mat2 TorsionParams::creep_matrix() const {
    validate();
    if (!(mu > 0.0)) {
        throw InvalidParameterError("TorsionParams::creep_matrix: mu = 0 has no creep matrix; use creep_mu_zero");
    }
    Mat2 a;
    a << alpha / mu, -alpha / mu, -alpha / mu_d, (alpha + alpha_d) / mu_d;
    return a;
}

TorsionParams nondimensionalize(const PhysicalRodProperties& physical) {
    if (!(physical.length > 0.0) || !(physical.time_scale > 0.0) ||
        !(physical.line_density > 0.0)) {
        throw InvalidParameterError("nondimensionalize: L, T and rho A must be positive");
    }
    const double l2 = physical.length * physical.length;
    const double l4 = l2 * l2;
    const double rho = physical.line_density;
    const double t = physical.time_scale;

    TorsionParams params;
    params.nu = (physical.inertia_1 + physical.inertia_2) / (rho * l2);
    params.mu = t * physical.twist_viscosity / (rho * l4);
    params.mu_d = t * physical.natural_twist_viscosity / (rho * l4);
    params.alpha = t * t * physical.twist_stiffness / (rho * l4);
    params.alpha_d = t * t * physical.natural_twist_stiffness / (rho * l4);
    params.validate();
    return params;
}

PhysicalRodProperties redimensionalize(const TorsionParams& params, double length,
                                       double time_scale, double line_density) {
    if (!(length > 0.0) || !(time_scale > 0.0) || !(line_density > 0.0)) {
        throw InvalidParameterError("redimensionalize: L, T and rho A must be positive");
    }
    params.validate();
    const double l2 = length * length;
    const double l4 = l2 * l2;

    PhysicalRodProperties physical;
    physical.length = length;
    physical.time_scale = time_scale;
    physical.line_density = line_density;
    const double inertia = params.nu * line_density * l2;
    physical.inertia_1 = 0.5 * inertia;
    physical.inertia_2 = 0.5 * inertia;
    physical.twist_viscosity = params.mu * line_density * l4 / time_scale;
    physical.natural_twist_viscosity = params.mu_d * line_density * l4 / time_scale;
    physical.twist_stiffness = params.alpha * line_density * l4 / (time_scale * time_scale);
    physical.natural_twist_stiffness =
        params.alpha_d * line_density * l4 / (time_scale * time_scale);
    return physical;
}

std::pair<double, double> circular_section_inertia(double line_density, double radius) {
    if (!(line_density > 0.0) || !(radius > 0.0)) {
        throw InvalidParameterError("circular_section_inertia: positive density and radius required");
    }
    const double total = 0.5 * line_density * radius * radius;
    return {0.5 * total, 0.5 * total};
}

InputHistory::InputHistory(Kind kind, Waveform waveform)
    : kind_(kind), waveform_(std::move(waveform)) {
    if (const auto* smooth = std::get_if<SmoothedStep>(&waveform_)) {
        if (!(smooth->ramp_duration > 0.0)) {
            throw InvalidParameterError("SmoothedStep: ramp duration must be positive");
        }
    } else if (const auto* table = std::get_if<Tabulated>(&waveform_)) {
        if (table->times.size() != table->values.size() || table->times.size() < 2) {
            throw InvalidParameterError("Tabulated: need matching times/values with at least 2 samples");
        }
        if (table->times.front() < 0.0) {
            throw InvalidParameterError("Tabulated: samples must start at t >= 0 (histories vanish before zero)");
        }
        for (std::size_t i = 1; i < table->times.size(); ++i) {
            if (!(table->times[i] > table->times[i - 1])) {
                throw InvalidParameterError("Tabulated: times must be strictly increasing");
            }
        }
    }
}

double InputHistory::amplitude() const {
    if (const auto* step = std::get_if<IdealStep>(&waveform_)) return step->amplitude;
    if (const auto* smooth = std::get_if<SmoothedStep>(&waveform_)) return smooth->amplitude;
    return std::get<Tabulated>(waveform_).values.back();
}

double InputHistory::value(double t) const {
    if (t < 0.0) return 0.0;
    if (const auto* step = std::get_if<IdealStep>(&waveform_)) return step->amplitude;
    if (const auto* smooth = std::get_if<SmoothedStep>(&waveform_)) {
        if (t >= smooth->ramp_duration) return smooth->amplitude;
        const double x = t / smooth->ramp_duration;
        return smooth->amplitude * x * x * (3.0 - 2.0 * x);
    }
    const auto& table = std::get<Tabulated>(waveform_);
    if (t <= table.times.front()) return 0.0;
    if (t >= table.times.back()) return table.values.back();
    const auto it = std::upper_bound(table.times.begin(), table.times.end(), t);
    const std::size_t hi = static_cast<std::size_t>(it - table.times.begin());
    const double w = (t - table.times[hi - 1]) / (table.times[hi] - table.times[hi - 1]);
    return (1.0 - w) * table.values[hi - 1] + w * table.values[hi];
}

double InputHistory::derivative(double t) const {
    if (std::holds_alternative<IdealStep>(waveform_)) {
        throw PreconditionError("InputHistory: the ideal step has no sampleable derivative");
    }
    if (t < 0.0) return 0.0;
    if (const auto* smooth = std::get_if<SmoothedStep>(&waveform_)) {
        if (t >= smooth->ramp_duration) return 0.0;
        const double x = t / smooth->ramp_duration;
        return smooth->amplitude * 6.0 * x * (1.0 - x) / smooth->ramp_duration;
    }
    const auto& table = std::get<Tabulated>(waveform_);
    if (t <= table.times.front() || t >= table.times.back()) return 0.0;
    const auto it = std::upper_bound(table.times.begin(), table.times.end(), t);
    const std::size_t hi = static_cast<std::size_t>(it - table.times.begin());
    return (table.values[hi] - table.values[hi - 1]) / (table.times[hi] - table.times[hi - 1]);
}

std::pair<double, double> quasistatic_rhs(const TorsionParams& params, double u, double u_d,
                                          double torque) {
    params.validate();
    if (params.nu != 0.0) {
        throw InvalidParameterError("quasistatic_rhs: quasi-static motion means nu = 0");
    }
    if (!(params.mu > 0.0)) {
        throw InvalidParameterError("quasistatic_rhs: mu = 0 makes the twist equation algebraic; use creep_mu_zero");
    }
    const double u_rate = (torque - params.alpha * (u - u_d)) / params.mu;
    const double u_d_rate = (params.alpha * u - (params.alpha + params.alpha_d) * u_d) / params.mu_d;
    return {u_rate, u_d_rate};
}

namespace {

std::vector<double> uniform_times(double t_end, std::size_t steps) {
    if (!(t_end > 0.0) || steps == 0) {
        throw InvalidParameterError("time grid: need t_end > 0 and at least 1 step");
    }
    std::vector<double> t(steps + 1);
    for (std::size_t k = 0; k <= steps; ++k) {
        t[k] = t_end * static_cast<double>(k) / static_cast<double>(steps);
    }
    return t;
}

}  // namespace

RelaxationTrace relaxation_response(const TorsionParams& params, const InputHistory& twist,
                                    double t_end, std::size_t steps) {
    params.validate();
    if (twist.kind() != InputHistory::Kind::PrescribedTwist) {
        throw PreconditionError("relaxation_response: history must prescribe the twist");
    }

    RelaxationTrace trace;
    trace.t = uniform_times(t_end, steps);
    const std::size_t n = trace.t.size();
    trace.u.resize(n);
    trace.u_d.resize(n);
    trace.torque.resize(n);

    const double rate = (params.alpha + params.alpha_d) / params.mu_d;

    if (twist.is_ideal_step()) {
        const double u0 = twist.amplitude();
        trace.impulse_amplitude = params.mu * u0;
        const double plateau = params.alpha * params.alpha_d * u0 / (params.alpha + params.alpha_d);
        const double decaying = params.alpha * params.alpha * u0 / (params.alpha + params.alpha_d);
        const double natural_limit = params.alpha * u0 / (params.alpha + params.alpha_d);
        for (std::size_t k = 0; k < n; ++k) {
            const double decay = std::exp(-rate * trace.t[k]);
            trace.u[k] = u0;
            trace.u_d[k] = natural_limit * (1.0 - decay);
            trace.torque[k] = plateau + decaying * decay;
        }
        return trace;
    }

    // Exponential-kernel recursion for J(t) = int_0^t exp(-rate (t - s)) u(s) ds,
    // trapezoidal in the integrand: exact homogeneous decay, O(h^2) overall.
    const double h = t_end / static_cast<double>(steps);
    const double decay = std::exp(-rate * h);
    double kernel = 0.0;
    double u_prev = twist.value(0.0);
    trace.u[0] = u_prev;
    trace.u_d[0] = 0.0;
    trace.torque[0] = params.mu * twist.derivative(0.0) + params.alpha * u_prev;
    for (std::size_t k = 1; k < n; ++k) {
        const double u_now = twist.value(trace.t[k]);
        kernel = decay * (kernel + 0.5 * h * u_prev) + 0.5 * h * u_now;
        u_prev = u_now;
        trace.u[k] = u_now;
        trace.u_d[k] = params.alpha / params.mu_d * kernel;
        trace.torque[k] = params.mu * twist.derivative(trace.t[k]) + params.alpha * u_now -
                          params.alpha * params.alpha / params.mu_d * kernel;
    }
    return trace;
}

CreepTrace creep_response(const TorsionParams& params, const InputHistory& torque, double t_end,
                          std::size_t steps) {
    params.validate();
    if (torque.kind() != InputHistory::Kind::PrescribedTorque) {
        throw PreconditionError("creep_response: history must prescribe the torque");
    }
    if (!(params.mu > 0.0)) {
        throw InvalidParameterError("creep_response: mu = 0 is the degenerate path; use creep_mu_zero");
    }

    CreepTrace trace;
    trace.t = uniform_times(t_end, steps);
    const std::size_t n = trace.t.size();
    trace.u.resize(n);
    trace.u_d.resize(n);
    trace.torque.resize(n);

    const Mat2 a = params.creep_matrix();

    if (torque.is_ideal_step()) {
        const Vec2 forcing(torque.amplitude() / params.mu, 0.0);
        const Vec2 limit = a.inverse() * forcing;  // det A = alpha alpha_d / (mu mu_d) > 0
        for (std::size_t k = 0; k < n; ++k) {
            const Vec2 x = (Mat2::Identity() - oracle::matrix_exponential_2x2(a, trace.t[k])) * limit;
            trace.u[k] = x[0];
            trace.u_d[k] = x[1];
            trace.torque[k] = torque.amplitude();
        }
        return trace;
    }

    const double h = t_end / static_cast<double>(steps);
    const Mat2 propagator = oracle::matrix_exponential_2x2(a, h);
    Vec2 x = Vec2::Zero();
    Vec2 b_prev(torque.value(0.0) / params.mu, 0.0);
    trace.u[0] = 0.0;
    trace.u_d[0] = 0.0;
    trace.torque[0] = torque.value(0.0);
    for (std::size_t k = 1; k < n; ++k) {
        const Vec2 b_now(torque.value(trace.t[k]) / params.mu, 0.0);
        x = propagator * (x + 0.5 * h * b_prev) + 0.5 * h * b_now;
        b_prev = b_now;
        trace.u[k] = x[0];
        trace.u_d[k] = x[1];
        trace.torque[k] = torque.value(trace.t[k]);
    }
    return trace;
}

CreepTrace creep_mu_zero(const TorsionParams& params, const InputHistory& torque, double t_end,
                         std::size_t steps) {
    params.validate();
    if (torque.kind() != InputHistory::Kind::PrescribedTorque) {
        throw PreconditionError("creep_mu_zero: history must prescribe the torque");
    }
    if (params.mu != 0.0) {
        throw InvalidParameterError("creep_mu_zero: mu must vanish; use creep_response for mu > 0");
    }

    CreepTrace trace;
    trace.t = uniform_times(t_end, steps);
    const std::size_t n = trace.t.size();
    trace.u.resize(n);
    trace.u_d.resize(n);
    trace.torque.resize(n);

    const double rate = params.alpha_d / params.mu_d;

    if (torque.is_ideal_step()) {
        const double m0 = torque.amplitude();
        for (std::size_t k = 0; k < n; ++k) {
            const double grown = (m0 / params.alpha_d) * (1.0 - std::exp(-rate * trace.t[k]));
            trace.u_d[k] = grown;
            trace.u[k] = m0 / params.alpha + grown;
            trace.torque[k] = m0;
        }
        return trace;
    }

    const double h = t_end / static_cast<double>(steps);
    const double decay = std::exp(-rate * h);
    double kernel = 0.0;  // int_0^t exp(-rate (t - s)) m(s) ds
    double m_prev = torque.value(0.0);
    trace.u_d[0] = 0.0;
    trace.u[0] = m_prev / params.alpha;
    trace.torque[0] = m_prev;
    for (std::size_t k = 1; k < n; ++k) {
        const double m_now = torque.value(trace.t[k]);
        kernel = decay * (kernel + 0.5 * h * m_prev) + 0.5 * h * m_now;
        m_prev = m_now;
        trace.u_d[k] = kernel / params.mu_d;
        trace.u[k] = m_now / params.alpha + trace.u_d[k];
        trace.torque[k] = m_now;
    }
    return trace;
}

namespace {

// Interpolatory quadrature weights on {0, gamma, 1} scaled by dt, third order.
struct StageQuadrature {
    double w0, wg, w1;
    StageQuadrature() {
        const double g = TrBdf2LinearSolver::kGamma;
        w0 = 0.5 - 1.0 / (6.0 * g);
        wg = 1.0 / (6.0 * g * (1.0 - g));
        w1 = (2.0 - 3.0 * g) / (6.0 * (1.0 - g));
    }
};

// State layout and discrete functionals of the torsion method of lines.
struct TorsionMesh {
    std::size_t nodes;   // N, node 0 clamped
    std::size_t cells;   // N - 1
    bool uniform;
    double h;
    TorsionParams params;

    std::size_t dim() const { return 2 * (nodes - 1) + (uniform ? 1 : cells); }
    std::size_t phi_index(std::size_t node) const { return node - 1; }
    std::size_t rate_index(std::size_t node) const { return (nodes - 1) + node - 1; }
    std::size_t natural_index(std::size_t cell) const {
        return 2 * (nodes - 1) + (uniform ? 0 : cell);
    }

    double phi(const Eigen::VectorXd& x, std::size_t node) const {
        return node == 0 ? 0.0 : x[phi_index(node)];
    }
    double rate(const Eigen::VectorXd& x, std::size_t node) const {
        return node == 0 ? 0.0 : x[rate_index(node)];
    }
    double natural(const Eigen::VectorXd& x, std::size_t cell) const {
        return x[natural_index(cell)];
    }
    double cell_twist(const Eigen::VectorXd& x, std::size_t cell) const {
        return (phi(x, cell + 1) - phi(x, cell)) / h;
    }
    double cell_twist_rate(const Eigen::VectorXd& x, std::size_t cell) const {
        return (rate(x, cell + 1) - rate(x, cell)) / h;
    }
    double node_weight(std::size_t node) const { return node == nodes - 1 ? 0.5 * h : h; }

    double energy(const Eigen::VectorXd& x) const {
        double kinetic = 0.0;
        for (std::size_t i = 1; i < nodes; ++i) {
            const double v = rate(x, i);
            kinetic += node_weight(i) * v * v;
        }
        double potential = 0.0;
        for (std::size_t j = 0; j < cells; ++j) {
            const double elastic = cell_twist(x, j) - natural(x, j);
            const double nat = natural(x, j);
            potential += params.alpha * elastic * elastic + params.alpha_d * nat * nat;
        }
        return 0.5 * params.nu * kinetic + 0.5 * h * potential;
    }

    double dissipation(const Eigen::VectorXd& x) const {
        double current = 0.0;
        for (std::size_t j = 0; j < cells; ++j) {
            const double r = cell_twist_rate(x, j);
            current += r * r;
        }
        current *= params.mu * h;
        if (uniform) {
            const double r = natural_rate_uniform_value(x);
            return current + params.mu_d * r * r;
        }
        double nat = 0.0;
        for (std::size_t j = 0; j < cells; ++j) {
            const double r = natural_rate_local_value(x, j);
            nat += r * r;
        }
        return current + params.mu_d * h * nat;
    }

    double natural_rate_local_value(const Eigen::VectorXd& x, std::size_t cell) const {
        return (params.alpha * (cell_twist(x, cell) - natural(x, cell)) -
                params.alpha_d * natural(x, cell)) /
               params.mu_d;
    }
    double natural_rate_uniform_value(const Eigen::VectorXd& x) const {
        // h sum_j u_j telescopes to phi(1).
        return (params.alpha * (phi(x, nodes - 1) - natural(x, 0)) -
                params.alpha_d * natural(x, 0)) /
               params.mu_d;
    }

    double boundary_power(double applied, const Eigen::VectorXd& x) const {
        return applied * rate(x, nodes - 1);
    }
};

}  // namespace

DynamicTrace dynamic_pde_solve(const TorsionParams& params, const DynamicOptions& options,
                               const InputHistory& torque) {
    if (torque.kind() != InputHistory::Kind::PrescribedTorque) {
        throw PreconditionError("dynamic_pde_solve: history must prescribe the boundary torque");
    }
    return dynamic_pde_solve(params, options,
                             [&torque](double t) { return torque.value(t); });
}

DynamicTrace dynamic_pde_solve(const TorsionParams& params, const DynamicOptions& options,
                               const std::function<double(double)>& torque) {
    params.validate();
    if (!torque) throw InvalidParameterError("dynamic_pde_solve: null torque function");
    if (!(params.nu > 0.0)) {
        throw InvalidParameterError("dynamic_pde_solve: nu must be positive (nu = 0 is the quasi-static path)");
    }
    if (options.grid_nodes < 16) {
        throw InsufficientGridError("dynamic_pde_solve: need at least 16 grid nodes");
    }
    if (!(options.t_end > 0.0) || options.samples == 0) {
        throw InvalidParameterError("dynamic_pde_solve: need t_end > 0 and at least 1 sample");
    }

    const std::size_t n = options.grid_nodes;
    const std::size_t cells = n - 1;
    const bool uniform = options.variant == NaturalEvolution::Uniform;
    const TorsionMesh mesh{n, cells, uniform, 1.0 / static_cast<double>(cells), params};
    const double h = mesh.h;
    const std::size_t dim = mesh.dim();

    // System matrix of the first-order form.
    Eigen::MatrixXd k = Eigen::MatrixXd::Zero(dim, dim);
    for (std::size_t i = 1; i < n; ++i) {
        k(mesh.phi_index(i), mesh.rate_index(i)) = 1.0;
    }
    auto add_twist_coupling = [&](std::size_t row, std::size_t cell, double factor) {
        // factor * u_cell and factor * (mu/alpha scaled) twist rate terms are
        // assembled separately; this helper adds factor * (phi_{c+1}-phi_c)/h.
        if (cell + 1 >= 1) {
            if (cell + 1 <= n - 1) k(row, mesh.phi_index(cell + 1)) += factor / h;
        }
        if (cell >= 1) k(row, mesh.phi_index(cell)) -= factor / h;
    };
    auto add_rate_coupling = [&](std::size_t row, std::size_t cell, double factor) {
        if (cell + 1 <= n - 1) k(row, mesh.rate_index(cell + 1)) += factor / h;
        if (cell >= 1) k(row, mesh.rate_index(cell)) -= factor / h;
    };
    for (std::size_t i = 1; i < n; ++i) {
        const std::size_t row = mesh.rate_index(i);
        const double inv_mass = 1.0 / (params.nu * mesh.node_weight(i));
        // torque of cell i (absent at the boundary node, replaced by m(t))
        if (i <= cells - 1) {
            add_twist_coupling(row, i, params.alpha * inv_mass);
            add_rate_coupling(row, i, params.mu * inv_mass);
            k(row, mesh.natural_index(i)) -= params.alpha * inv_mass;
        }
        // minus torque of cell i-1
        add_twist_coupling(row, i - 1, -params.alpha * inv_mass);
        add_rate_coupling(row, i - 1, -params.mu * inv_mass);
        k(row, mesh.natural_index(i - 1)) += params.alpha * inv_mass;
    }
    if (uniform) {
        const std::size_t row = mesh.natural_index(0);
        k(row, mesh.phi_index(n - 1)) = params.alpha / params.mu_d;
        k(row, row) = -(params.alpha + params.alpha_d) / params.mu_d;
    } else {
        for (std::size_t j = 0; j < cells; ++j) {
            const std::size_t row = mesh.natural_index(j);
            add_twist_coupling(row, j, params.alpha / params.mu_d);
            k(row, row) = -(params.alpha + params.alpha_d) / params.mu_d;
        }
    }

    const std::size_t force_row = mesh.rate_index(n - 1);
    const double force_scale = 1.0 / (params.nu * mesh.node_weight(n - 1));
    auto forcing = [&torque, force_row, force_scale](double t, Eigen::VectorXd& b) {
        b.setZero();
        b[force_row] = force_scale * torque(t);
    };

    // Initial state.
    Eigen::VectorXd y0 = Eigen::VectorXd::Zero(dim);
    auto load_nodal = [&](const std::vector<double>& values, std::size_t offset, const char* what) {
        if (values.empty()) return;
        if (values.size() != n) {
            throw InvalidParameterError(std::string("dynamic_pde_solve: ") + what +
                                        " must have one entry per node");
        }
        if (values[0] != 0.0) {
            throw PreconditionError(std::string("dynamic_pde_solve: ") + what +
                                    " must vanish at the clamped end");
        }
        for (std::size_t i = 1; i < n; ++i) y0[offset + i - 1] = values[i];
    };
    load_nodal(options.initial_angle, 0, "initial angle");
    load_nodal(options.initial_rate, n - 1, "initial rate");
    if (!options.initial_natural_twist.empty()) {
        const std::size_t expected = uniform ? 1 : cells;
        if (options.initial_natural_twist.size() != expected) {
            throw InvalidParameterError("dynamic_pde_solve: initial natural twist has the wrong size");
        }
        for (std::size_t j = 0; j < expected; ++j) {
            y0[2 * (n - 1) + j] = options.initial_natural_twist[j];
        }
    }

    // Energy-balance bookkeeping per accepted step.
    const StageQuadrature quad;
    double max_defect = 0.0;
    double scale = 0.0;
    auto observer = [&](double t, double dt, const Eigen::VectorXd& ya, const Eigen::VectorXd& yg,
                        const Eigen::VectorXd& yb) {
        const double g = TrBdf2LinearSolver::kGamma;
        auto net_power = [&](double time, const Eigen::VectorXd& state) {
            return mesh.boundary_power(torque(time), state) - mesh.dissipation(state);
        };
        const double work = dt * (quad.w0 * net_power(t, ya) + quad.wg * net_power(t + g * dt, yg) +
                                  quad.w1 * net_power(t + dt, yb));
        const double e0 = mesh.energy(ya);
        const double e1 = mesh.energy(yb);
        max_defect = std::max(max_defect, std::abs(e1 - e0 - work));
        scale = std::max({scale, e0, e1, std::abs(work)});
    };

    std::vector<double> sample_times(options.samples + 1);
    for (std::size_t s = 0; s <= options.samples; ++s) {
        sample_times[s] = options.t_end * static_cast<double>(s) / static_cast<double>(options.samples);
    }

    TrBdf2LinearSolver solver(std::move(k), forcing);
    std::vector<Eigen::VectorXd> states;
    DynamicTrace trace;
    trace.stats = solver.integrate(0.0, y0, options.t_end, options.time, sample_times, states, observer);
    trace.energy_balance_residual = max_defect / std::max(scale, 1e-300);

    trace.times = sample_times;
    trace.node_positions.resize(n);
    for (std::size_t i = 0; i < n; ++i) trace.node_positions[i] = mesh.h * static_cast<double>(i);

    trace.angle.resize(states.size());
    trace.natural_twist.resize(states.size());
    trace.boundary_twist.resize(states.size());
    trace.boundary_torque.resize(states.size());
    for (std::size_t s = 0; s < states.size(); ++s) {
        const Eigen::VectorXd& x = states[s];
        auto& angle = trace.angle[s];
        angle.resize(n);
        for (std::size_t i = 0; i < n; ++i) angle[i] = mesh.phi(x, i);

        auto& nat = trace.natural_twist[s];
        nat.resize(n);
        if (uniform) {
            std::fill(nat.begin(), nat.end(), mesh.natural(x, 0));
        } else {
            // cell values resampled at the nodes, one-sided at the ends
            nat[0] = 1.5 * mesh.natural(x, 0) - 0.5 * mesh.natural(x, 1);
            for (std::size_t i = 1; i < n - 1; ++i) {
                nat[i] = 0.5 * (mesh.natural(x, i - 1) + mesh.natural(x, i));
            }
            nat[n - 1] = 1.5 * mesh.natural(x, cells - 1) - 0.5 * mesh.natural(x, cells - 2);
        }
        trace.boundary_twist[s] =
            1.5 * mesh.cell_twist(x, cells - 1) - 0.5 * mesh.cell_twist(x, cells - 2);
        trace.boundary_torque[s] = torque(sample_times[s]);
    }
    return trace;
}

}  // namespace torsion
}  // namespace evorod
