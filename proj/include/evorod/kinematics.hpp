#pragma once

#include <optional>
#include <span>
#include <vector>

#include "evorod/errors.hpp"
#include "evorod/linalg.hpp"

namespace evorod {

// Right-handed orthonormal director triad d_k = R e_k, stored as the full
// rotation matrix. Construction validates; nothing re-orthonormalizes
// implicitly (renormalized() is available but must be called on purpose).
class DirectorFrame {
public:
    static constexpr double kFrameTol = 1e-12;

    explicit DirectorFrame(const Mat3& rotation);

    static DirectorFrame identity() { return DirectorFrame(Mat3::Identity(), Unchecked{}); }
    static DirectorFrame axis_angle(const Vec3& axis, double angle);

    const Mat3& matrix() const { return rotation_; }
    Vec3 director(int k) const { return rotation_.col(k); }

    DirectorFrame inverse() const { return DirectorFrame(rotation_.transpose(), Unchecked{}); }

    // World vector -> director components and back.
    Vec3 components_of(const Vec3& world) const { return rotation_.transpose() * world; }
    Vec3 world_of(const Vec3& components) const { return rotation_ * components; }

    // max-norm of R^T R - I plus the determinant defect.
    static double defect(const Mat3& rotation);

    // Gram-Schmidt on the columns. Never applied by the library itself.
    DirectorFrame renormalized() const;

    friend DirectorFrame operator*(const DirectorFrame& a, const DirectorFrame& b) {
        return DirectorFrame(a.rotation_ * b.rotation_, Unchecked{});
    }

private:
    struct Unchecked {};
    DirectorFrame(const Mat3& rotation, Unchecked) : rotation_(rotation) {}

    Mat3 rotation_;
};

// Current strains in director components: u = flexural/torsional, v = shear/dilation.
// The orientation restriction v3 > 0 is enforced at construction.
struct StrainState {
    StrainState(const Vec3& u_components, const Vec3& v_components);

    Vec3 u;
    Vec3 v;
};

// Strains of the natural (stress-free) configuration, optionally carrying the
// natural frame when full frames are tracked.
struct NaturalState {
    NaturalState(const Vec3& u_d_components, const Vec3& v_d_components,
                 std::optional<DirectorFrame> natural_frame = std::nullopt);

    Vec3 u_d;
    Vec3 v_d;
    std::optional<DirectorFrame> frame;
};

// Split of the current configuration into natural and elastic parts.
// World vectors satisfy u = R_e u_d + u_e; components satisfy u_k = u_dk + u_ek.
struct ElasticDecomposition {
    DirectorFrame rotation;  // R_e = R R_d^T
    Vec3 u_world;
    Vec3 v_world;
    Vec3 u;  // director components of u_world in the current frame
    Vec3 v;
};

// A configuration seen through world vectors, used for change-of-frame checks.
struct Configuration {
    DirectorFrame frame;
    Vec3 darboux;  // world Darboux vector
    Vec3 tangent;  // world tangent vector

    static Configuration from_components(const DirectorFrame& frame, const Vec3& u, const Vec3& v);
    Vec3 darboux_components() const { return frame.components_of(darboux); }
    Vec3 tangent_components() const { return frame.components_of(tangent); }
};

struct ConfigurationPair {
    Configuration natural;
    Configuration current;
};

// Director components of the Darboux vector u(s) = axial((d_s R) R^T) on a
// uniform grid: central differences inside, second-order one-sided at the ends.
std::vector<Vec3> darboux_of_rotation_field(std::span<const DirectorFrame> frames,
                                            double grid_spacing);

// Integrates d_s R = R skew(u) node to node with the exact exponential of the
// interval-averaged Darboux components, so every output frame is a rotation.
std::vector<DirectorFrame> rotation_field_of_darboux(std::span<const Vec3> u_components,
                                                     const DirectorFrame& start,
                                                     double grid_spacing);

// R_e = R R_d^T, v_e = v - R_e v_d, u_e = u - R_e u_d (world vectors), plus
// director components. The natural state must carry its frame.
ElasticDecomposition elastic_decompose(const StrainState& current,
                                       const DirectorFrame& current_frame,
                                       const NaturalState& natural);

// Rotates both configurations by Q. Director components are invariants of this map.
ConfigurationPair apply_frame_change(const DirectorFrame& q, const ConfigurationPair& pair);

}  // namespace evorod
