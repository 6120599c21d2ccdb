#include "skyflux/georeg/homography.hpp"

#include <cmath>

namespace skyflux::georeg {

namespace {

Eigen::Matrix3d plane_to_camera_raw(const CameraPose& pose) {
    Eigen::Matrix3d T;
    T.col(0) = pose.R.col(0);
    T.col(1) = pose.R.col(1);
    T.col(2) = pose.t;
    return pose.K() * T;
}

// minor(i,j) of a 3x3 matrix: determinant after deleting row i, col j
// (1-based indices).
double minor_of(const Eigen::Matrix3d& T, int i, int j) {
    int r0 = -1, r1 = -1, c0 = -1, c1 = -1;
    for (int r = 0; r < 3; ++r) {
        if (r == i - 1) continue;
        (r0 < 0 ? r0 : r1) = r;
    }
    for (int c = 0; c < 3; ++c) {
        if (c == j - 1) continue;
        (c0 < 0 ? c0 : c1) = c;
    }
    return T(r0, c0) * T(r1, c1) - T(r0, c1) * T(r1, c0);
}

} // namespace

Homography homography_plane_to_camera(const CameraPose& pose) {
    pose.validate();
    Eigen::Matrix3d H = plane_to_camera_raw(pose);
    Eigen::FullPivLU<Eigen::Matrix3d> lu(H);
    if (lu.rank() < 3)
        throw SingularMatrix("homography_plane_to_camera: camera center lies on the plane");
    return Homography(H);
}

Homography homography_camera_to_plane(const CameraPose& pose) {
    pose.validate();

    Eigen::Matrix3d T;
    T.col(0) = pose.R.col(0);
    T.col(1) = pose.R.col(1);
    T.col(2) = pose.t;

    const double lambda = pose.f * pose.R.col(2).dot(pose.t);
    if (std::abs(lambda) < 1e-12 * pose.f * pose.t.norm())
        throw DegeneratePose("homography_camera_to_plane: f*r3't vanishes");

    const Eigen::Vector3d vpp(pose.u, pose.v, pose.f);

    const double m11 = minor_of(T, 1, 1), m21 = minor_of(T, 2, 1), m31 = minor_of(T, 3, 1);
    const double m12 = minor_of(T, 1, 2), m22 = minor_of(T, 2, 2), m32 = minor_of(T, 3, 2);
    const double m13 = minor_of(T, 1, 3), m23 = minor_of(T, 2, 3), m33 = minor_of(T, 3, 3);

    // lambda * H_c2p, written out through the minors of T. The last row
    // reduces to the third rotation column: m13 = r13, -m23 = r23,
    // m33 = r33 whenever [r1 r2] come from an orthonormal R.
    Eigen::Matrix3d H;
    H(0, 0) = m11;
    H(0, 1) = -m21;
    H(0, 2) = -m11 * vpp.x() + m21 * vpp.y() + m31 * vpp.z();
    H(1, 0) = -m12;
    H(1, 1) = m22;
    H(1, 2) = m12 * vpp.x() - m22 * vpp.y() - m32 * vpp.z();
    H(2, 0) = m13;
    H(2, 1) = -m23;
    H(2, 2) = -m13 * vpp.x() + m23 * vpp.y() + m33 * vpp.z();

    // lambda is a pure scale and is dropped; canonical normalization
    // fixes the sign.
    return Homography(H);
}

Eigen::Vector2d parallax_displacement(const Eigen::Vector3d& point,
                                      const CameraPose& pose_a,
                                      const CameraPose& pose_b,
                                      const PlaneConfig& plane) {
    plane.validate();
    auto through = [&](const CameraPose& pose) {
        Eigen::Vector3d img = pose.project(point);
        Eigen::Matrix3d Hc2p = homography_camera_to_plane(pose).matrix();
        Eigen::Vector3d on_plane = Hc2p * img;
        Eigen::Vector2d xy(on_plane.x() / on_plane.z(), on_plane.y() / on_plane.z());
        return plane.world_to_pixel(xy);
    };
    return through(pose_b) - through(pose_a);
}

} // namespace skyflux::georeg
