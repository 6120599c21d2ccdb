#pragma once

#include <Eigen/Dense>

#include "skyflux/core/error.hpp"

namespace skyflux {

/// 3x3 up-to-scale projective map. Stored in canonical form: the
/// largest-magnitude entry equals +1, so serialized matrices compare
/// directly and keep a stable sign.
class Homography {
public:
    Homography() : m_(Eigen::Matrix3d::Identity()) {}

    /// Wraps a raw matrix, fixing the canonical scale.
    explicit Homography(const Eigen::Matrix3d& m) : m_(canonicalize(m)) {}

    const Eigen::Matrix3d& matrix() const { return m_; }

    Homography inverse() const { return Homography(Eigen::Matrix3d(m_.inverse())); }

    /// Applies the map to a 2D point (homogeneous divide included).
    Eigen::Vector2d apply(const Eigen::Vector2d& p) const {
        Eigen::Vector3d q = m_ * Eigen::Vector3d(p.x(), p.y(), 1.0);
        return {q.x() / q.z(), q.y() / q.z()};
    }

    static Eigen::Matrix3d canonicalize(const Eigen::Matrix3d& m);

private:
    Eigen::Matrix3d m_;
};

/// Canonical rescale of an arbitrary nonsingular 3x3 matrix.
Homography normalize_homography(const Eigen::Matrix3d& m);

} // namespace skyflux
