#pragma once

#include <Eigen/Dense>

namespace evorod {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

// Skew matrix of a, so that skew(a) * b == a x b.
inline Mat3 skew(const Vec3& a) {
    Mat3 s;
    s << 0.0, -a.z(), a.y(),
         a.z(), 0.0, -a.x(),
        -a.y(), a.x(), 0.0;
    return s;
}

// Axial vector of a (nearly) skew matrix, the inverse of skew() for exact input.
inline Vec3 axial(const Mat3& s) {
    return {0.5 * (s(2, 1) - s(1, 2)),
            0.5 * (s(0, 2) - s(2, 0)),
            0.5 * (s(1, 0) - s(0, 1))};
}

// Rodrigues formula: exp(skew(omega)), exactly orthogonal up to round-off.
Mat3 rotation_exp(const Vec3& omega);

}  // namespace evorod
