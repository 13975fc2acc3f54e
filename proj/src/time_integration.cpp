#include "evorod/time_integration.hpp"

#include <algorithm>
#include <cmath>
#include <span>

namespace evorod {

TrBdf2LinearSolver::TrBdf2LinearSolver(Eigen::MatrixXd system_matrix, Forcing forcing)
    : k_(std::move(system_matrix)), forcing_(std::move(forcing)) {
    if (k_.rows() != k_.cols()) throw InvalidParameterError("TrBdf2LinearSolver: K must be square");
    if (!forcing_) throw InvalidParameterError("TrBdf2LinearSolver: null forcing");
}

TrBdf2Stats TrBdf2LinearSolver::integrate(double t0, const Eigen::VectorXd& y0, double t1,
                                          const TrBdf2Options& options,
                                          std::span<const double> sample_times,
                                          std::vector<Eigen::VectorXd>& samples,
                                          const StepObserver& observer) {
    const Eigen::Index n = k_.rows();
    if (y0.size() != n) throw InvalidParameterError("TrBdf2LinearSolver: state size mismatch");
    if (!(t1 > t0)) throw InvalidParameterError("TrBdf2LinearSolver: need t1 > t0");

    const double g = kGamma;
    // BDF2 stage combination coefficients for the gamma split.
    const double w1 = 1.0 / (g * (2.0 - g));
    const double w0 = (1.0 - g) * (1.0 - g) / (g * (2.0 - g));
    // Error-estimate weights (difference to the embedded third-order formula).
    const double d1 = (std::sqrt(2.0) - 1.0) / 3.0;
    const double d2 = -1.0 / 3.0;
    const double d3 = (2.0 - std::sqrt(2.0)) / 3.0;

    TrBdf2Stats stats;
    Eigen::VectorXd y = y0;
    double t = t0;
    double dt = options.fixed_step ? options.dt_initial
                                   : std::min(options.dt_initial, (t1 - t0) * 0.5);
    const double dt_min = (t1 - t0) * 1e-14;
    const double t_eps = (t1 - t0) * 1e-13;

    double factored_dt = -1.0;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu;
    auto factor = [&](double step) {
        lu.compute(Eigen::MatrixXd::Identity(n, n) - (0.5 * g * step) * k_);
        factored_dt = step;
        ++stats.factorizations;
    };

    Eigen::VectorXd b0(n), bg(n), b1(n);
    Eigen::VectorXd f0(n), fg(n), f1(n);

    forcing_(t, b0);
    f0 = k_ * y + b0;

    std::size_t next_sample = 0;
    samples.clear();
    while (next_sample < sample_times.size() && sample_times[next_sample] <= t0 + t_eps) {
        samples.push_back(y);
        ++next_sample;
    }

    while (t < t1 - t_eps) {
        if (++stats.steps > options.max_steps) {
            throw NonconvergenceError("TR-BDF2: exceeded maximum step count");
        }
        if (dt < dt_min) {
            throw NonconvergenceError("TR-BDF2: step size underflow at t = " + std::to_string(t));
        }
        const double hs = std::min(dt, t1 - t);
        if (hs != factored_dt) factor(hs);

        const double tg = t + g * hs;
        const double tn = t + hs;
        forcing_(tg, bg);
        forcing_(tn, b1);

        // TR stage: (I - g h/2 K) y_g = y + g h/2 (f(t,y) + b(t_g))
        const Eigen::VectorXd yg = lu.solve(y + (0.5 * g * hs) * (f0 + bg));
        fg = k_ * yg + bg;

        // BDF2 stage: (I - g h/2 K) y1 = w1 y_g - w0 y + g h/2 b(t_n)
        const Eigen::VectorXd y1 = lu.solve(w1 * yg - w0 * y + (0.5 * g * hs) * b1);
        f1 = k_ * y1 + b1;

        bool accept = true;
        double fac = 1.0;
        if (!options.fixed_step) {
            // Shampine-style stiffly filtered embedded error.
            const Eigen::VectorXd est = lu.solve((hs * d1) * f0 + (hs * d2) * fg + (hs * d3) * f1);
            double err = 0.0;
            for (Eigen::Index i = 0; i < n; ++i) {
                const double sc =
                    options.atol + options.rtol * std::max(std::abs(y[i]), std::abs(y1[i]));
                err += std::pow(est[i] / sc, 2);
            }
            err = std::sqrt(err / static_cast<double>(n));
            fac = std::clamp(0.9 * std::pow(std::max(err, 1e-12), -1.0 / 3.0), 0.2, 4.0);
            accept = err <= 1.0;
        }

        if (accept) {
            if (observer) observer(t, hs, y, yg, y1);

            // Cubic Hermite output between t and t + hs.
            while (next_sample < sample_times.size() && sample_times[next_sample] <= tn + t_eps) {
                const double theta = std::clamp((sample_times[next_sample] - t) / hs, 0.0, 1.0);
                const double h00 = (1.0 + 2.0 * theta) * (1.0 - theta) * (1.0 - theta);
                const double h10 = theta * (1.0 - theta) * (1.0 - theta);
                const double h01 = theta * theta * (3.0 - 2.0 * theta);
                const double h11 = theta * theta * (theta - 1.0);
                samples.push_back(h00 * y + (h10 * hs) * f0 + h01 * y1 + (h11 * hs) * f1);
                ++next_sample;
            }

            t = tn;
            y = y1;
            f0 = f1;
            if (!options.fixed_step) {
                // Grow only past a threshold so the factorization is reused.
                const double proposal = hs * fac;
                if (proposal > 1.25 * dt || hs < dt) {
                    dt = std::min(proposal, options.dt_max);
                } else {
                    dt = std::min(dt, options.dt_max);
                }
            }
        } else {
            ++stats.rejected;
            dt = hs * fac;
        }
    }
    while (next_sample < sample_times.size()) {
        samples.push_back(y);
        ++next_sample;
    }
    return stats;
}

}  // namespace evorod
