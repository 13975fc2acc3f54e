#pragma once

#include <functional>
#include <limits>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "evorod/errors.hpp"

namespace evorod {

// TR-BDF2 (one-step, L-stable, order 2, embedded order-3 error estimate) for
// linear systems dy/dt = K y + b(t) with constant K. Both implicit stages
// share the matrix I - (gamma/2) dt K, which is refactored only when the
// controller actually changes dt.
struct TrBdf2Options {
    double rtol = 1e-8;
    double atol = 1e-10;
    double dt_initial = 1e-6;
    double dt_max = std::numeric_limits<double>::infinity();
    std::size_t max_steps = 5'000'000;
    bool fixed_step = false;  // disables the error controller; dt = dt_initial
};

struct TrBdf2Stats {
    std::size_t steps = 0;
    std::size_t rejected = 0;
    std::size_t factorizations = 0;
};

class TrBdf2LinearSolver {
public:
    using Forcing = std::function<void(double, Eigen::VectorXd&)>;
    // Called after each accepted step with (t, dt, y at t, y at the TR stage,
    // y at t + dt). The stage time is t + gamma dt.
    using StepObserver = std::function<void(double, double, const Eigen::VectorXd&,
                                            const Eigen::VectorXd&, const Eigen::VectorXd&)>;

    static constexpr double kGamma = 0.585786437626904951;  // 2 - sqrt(2)

    TrBdf2LinearSolver(Eigen::MatrixXd system_matrix, Forcing forcing);

    // Integrates from (t0, y0) to t1, filling `samples` with the states at the
    // requested times (cubic Hermite interpolation between accepted steps).
    TrBdf2Stats integrate(double t0, const Eigen::VectorXd& y0, double t1,
                          const TrBdf2Options& options, std::span<const double> sample_times,
                          std::vector<Eigen::VectorXd>& samples,
                          const StepObserver& observer = nullptr);

private:
    Eigen::MatrixXd k_;
    Forcing forcing_;
};

}  // namespace evorod
