#include "evorod/kinematics.hpp"

#include <cmath>
#include <sstream>

namespace evorod {

Mat3 rotation_exp(const Vec3& omega) {
    const double theta2 = omega.squaredNorm();
    const Mat3 k = skew(omega);
    double a, b;  // R = I + a K + b K^2
    if (theta2 < 1e-8) {
        // series in theta^2; error below round-off at this threshold
        a = 1.0 - theta2 / 6.0 * (1.0 - theta2 / 20.0);
        b = 0.5 * (1.0 - theta2 / 12.0 * (1.0 - theta2 / 30.0));
    } else {
        const double theta = std::sqrt(theta2);
        a = std::sin(theta) / theta;
        b = (1.0 - std::cos(theta)) / theta2;
    }
    return Mat3::Identity() + a * k + b * k * k;
}

double DirectorFrame::defect(const Mat3& rotation) {
    const Mat3 gram = rotation.transpose() * rotation - Mat3::Identity();
    const double ortho = gram.cwiseAbs().maxCoeff();
    const double det = std::abs(rotation.determinant() - 1.0);
    return std::max(ortho, det);
}

DirectorFrame::DirectorFrame(const Mat3& rotation) : rotation_(rotation) {
    const double d = defect(rotation);
    if (!(d <= kFrameTol)) {
        std::ostringstream msg;
        msg << "matrix is not a proper rotation (defect " << d << ", tolerance " << kFrameTol << ")";
        throw InvalidFrameError(msg.str());
    }
}

DirectorFrame DirectorFrame::axis_angle(const Vec3& axis, double angle) {
    const double n = axis.norm();
    if (n <= 0.0) throw InvalidParameterError("axis_angle: zero axis");
    return DirectorFrame(rotation_exp(axis * (angle / n)), Unchecked{});
}

DirectorFrame DirectorFrame::renormalized() const {
    Mat3 r = rotation_;
    r.col(0).normalize();
    r.col(1) = (r.col(1) - r.col(1).dot(r.col(0)) * r.col(0)).normalized();
    r.col(2) = r.col(0).cross(r.col(1));
    return DirectorFrame(r, Unchecked{});
}

StrainState::StrainState(const Vec3& u_components, const Vec3& v_components)
    : u(u_components), v(v_components) {
    if (!(v.z() > 0.0)) {
        throw InvalidParameterError("StrainState: orientation restriction v3 > 0 violated");
    }
}

NaturalState::NaturalState(const Vec3& u_d_components, const Vec3& v_d_components,
                           std::optional<DirectorFrame> natural_frame)
    : u_d(u_d_components), v_d(v_d_components), frame(std::move(natural_frame)) {
    if (!(v_d.z() > 0.0)) {
        throw InvalidParameterError("NaturalState: orientation restriction v_d3 > 0 violated");
    }
}

Configuration Configuration::from_components(const DirectorFrame& frame, const Vec3& u,
                                             const Vec3& v) {
    return Configuration{frame, frame.world_of(u), frame.world_of(v)};
}

std::vector<Vec3> darboux_of_rotation_field(std::span<const DirectorFrame> frames,
                                            double grid_spacing) {
    const std::size_t n = frames.size();
    if (n < 3) throw InsufficientGridError("darboux_of_rotation_field: need at least 3 nodes");
    if (!(grid_spacing > 0.0)) throw InvalidParameterError("grid spacing must be positive");

    std::vector<Vec3> result(n);
    const double inv2h = 1.0 / (2.0 * grid_spacing);
    for (std::size_t i = 0; i < n; ++i) {
        Mat3 dr;
        if (i == 0) {
            dr = (-3.0 * frames[0].matrix() + 4.0 * frames[1].matrix() - frames[2].matrix()) * inv2h;
        } else if (i == n - 1) {
            dr = (3.0 * frames[n - 1].matrix() - 4.0 * frames[n - 2].matrix() + frames[n - 3].matrix()) * inv2h;
        } else {
            dr = (frames[i + 1].matrix() - frames[i - 1].matrix()) * inv2h;
        }
        const Vec3 u_world = axial(dr * frames[i].matrix().transpose());
        result[i] = frames[i].components_of(u_world);
    }
    return result;
}

std::vector<DirectorFrame> rotation_field_of_darboux(std::span<const Vec3> u_components,
                                                     const DirectorFrame& start,
                                                     double grid_spacing) {
    if (u_components.empty()) throw InsufficientGridError("rotation_field_of_darboux: empty field");
    if (!(grid_spacing > 0.0)) throw InvalidParameterError("grid spacing must be positive");
    for (const Vec3& u : u_components) {
        if (!u.allFinite()) throw InvalidParameterError("rotation_field_of_darboux: non-finite Darboux input");
    }

    std::vector<DirectorFrame> frames;
    frames.reserve(u_components.size());
    frames.push_back(start);
    for (std::size_t i = 0; i + 1 < u_components.size(); ++i) {
        // d_s R = R skew(u) in components; interval-averaged u gives the
        // exponential midpoint rule, second order and exactly in SO(3).
        const Vec3 step = 0.5 * (u_components[i] + u_components[i + 1]) * grid_spacing;
        const double angle = step.norm();
        if (angle == 0.0) {
            frames.push_back(frames.back());
        } else {
            frames.push_back(frames.back() * DirectorFrame::axis_angle(step, angle));
        }
    }
    return frames;
}

ElasticDecomposition elastic_decompose(const StrainState& current,
                                       const DirectorFrame& current_frame,
                                       const NaturalState& natural) {
    if (!natural.frame) {
        throw PreconditionError("elastic_decompose: natural state must carry its frame");
    }
    const DirectorFrame& natural_frame = *natural.frame;

    const DirectorFrame rotation = current_frame * natural_frame.inverse();
    const Vec3 u_world = current_frame.world_of(current.u);
    const Vec3 v_world = current_frame.world_of(current.v);
    const Vec3 u_d_world = natural_frame.world_of(natural.u_d);
    const Vec3 v_d_world = natural_frame.world_of(natural.v_d);

    const Vec3 u_e_world = u_world - rotation.matrix() * u_d_world;
    const Vec3 v_e_world = v_world - rotation.matrix() * v_d_world;

    return ElasticDecomposition{rotation, u_e_world, v_e_world,
                                current_frame.components_of(u_e_world),
                                current_frame.components_of(v_e_world)};
}

ConfigurationPair apply_frame_change(const DirectorFrame& q, const ConfigurationPair& pair) {
    auto transform = [&q](const Configuration& c) {
        return Configuration{q * c.frame, q.world_of(c.darboux), q.world_of(c.tangent)};
    };
    return ConfigurationPair{transform(pair.natural), transform(pair.current)};
}

}  // namespace evorod
