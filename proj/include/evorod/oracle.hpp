#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "evorod/constitutive.hpp"
#include "evorod/energetics.hpp"
#include "evorod/linalg.hpp"

namespace evorod {
namespace oracle {

// A finite-dimensional transcription of the constrained dissipation
// maximization: quadrature weights, per-node tensors, and the driving vectors
// (m - d_u psi), (n - d_v psi), d_{u_d} psi, d_{v_d} psi.
struct DiscreteMaximizationInstance {
    enum class Space { FullL2, UniformNatural };

    Space space = Space::FullL2;
    std::vector<double> weights;
    std::vector<Mat3> curvature_viscosity;
    std::vector<Mat3> tangent_viscosity;
    std::vector<Mat3> natural_curvature_viscosity;
    std::vector<Mat3> natural_tangent_viscosity;
    std::vector<Vec3> target_u;    // m - d_u psi
    std::vector<Vec3> target_v;    // n - d_v psi
    std::vector<Vec3> grad_u_d;    // d_{u_d} psi
    std::vector<Vec3> grad_v_d;    // d_{v_d} psi

    std::size_t node_count() const { return weights.size(); }
    void validate() const;

    // Transcribes a material model, grid of states, and wrench field into the
    // weighted targets the brute-force search works on.
    static DiscreteMaximizationInstance from_model(const EnergyModel& model,
                                                   const DissipationTensors& tensors,
                                                   const GridStrains& grid,
                                                   std::span<const WrenchComponents> wrenches,
                                                   Space space);
};

struct BruteForceResult {
    std::vector<Vec3> u_dot;
    std::vector<Vec3> v_dot;
    std::vector<Vec3> u_d_dot;  // single entry for UniformNatural
    std::vector<Vec3> v_d_dot;
    double value = 0.0;
};

// Projected gradient ascent (conjugate directions, exact ratio line search)
// on the dissipation functional subject to the quadratic-equals-linear
// constraint. The constraint is enforced by the closed-form scaling
// lambda = l(d)/F(d) of each search direction.
BruteForceResult brute_force_maximize(const DiscreteMaximizationInstance& instance,
                                      int restarts = 50, int iters = 500,
                                      std::uint64_t seed = 0);

// Central differences, one coordinate at a time.
Eigen::VectorXd finite_difference_gradient(
    const std::function<double(const Eigen::VectorXd&)>& f, const Eigen::VectorXd& x,
    double step = 1e-6);

struct OdeTrace {
    std::vector<double> t;
    std::vector<Eigen::VectorXd> y;
};

// Adaptive Dormand-Prince RK45 at tight tolerance, used as the reference
// against the analytic torsion formulas. Samples are hit exactly by clamping
// the step; with no samples the accepted steps are returned.
OdeTrace reference_integrate(
    const std::function<void(double, const Eigen::VectorXd&, Eigen::VectorXd&)>& rhs,
    const Eigen::VectorXd& y0, double t0, double t1, double tol = 1e-10,
    std::span<const double> sample_times = {});

// exp(-t A) for real 2x2 A via the cosh/sinh closed form when the shifted
// determinant is negative (real distinct eigenvalues); scaling-and-squaring
// otherwise.
Mat2 matrix_exponential_2x2(const Mat2& a, double t);

// Scaling-and-squaring exp(-t A) used to cross-check the closed form.
Mat2 matrix_exponential_reference(const Mat2& a, double t);

// One randomized check of the closed-form maximizer against the brute-force
// search: value gap, argmax distance, and the constraint residual of the
// closed-form rates.
struct MaximizerCheckSample {
    std::size_t nodes = 0;
    bool uniform = false;
    double value_gap_rel = 0.0;          // (brute force - closed form) / closed form
    double rate_distance_rel = 0.0;      // ||brute force - closed form|| / ||closed form||
    double constraint_residual_rel = 0.0;
};

std::vector<MaximizerCheckSample> run_maximizer_checks(int instances, int restarts, int iters,
                                                       std::uint64_t seed);

}  // namespace oracle
}  // namespace evorod
