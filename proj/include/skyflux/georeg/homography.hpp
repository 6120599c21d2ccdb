#pragma once

#include "skyflux/core/homography.hpp"
#include "skyflux/georeg/pose.hpp"

namespace skyflux::georeg {

/// H mapping plane coordinates (x, y, 1) in meters to image pixels:
/// K [r1 r2 t]. Throws SingularMatrix when the camera center lies on the
/// plane and [r1 r2 t] loses rank.
Homography homography_plane_to_camera(const CameraPose& pose);

/// Closed-form inverse map, image pixels to plane meters, built from the
/// 2x2 minors of T = [r1 r2 t] rather than a generic inversion. Equals
/// normalize(inverse(K [r1 r2 t])) for every valid pose. Throws
/// DegeneratePose when |f * r3.t| < 1e-12 * f * |t|.
Homography homography_camera_to_plane(const CameraPose& pose);

/// Apparent plane-pixel displacement of a fixed 3D point between two
/// poses after projecting each image onto the plane. Zero exactly when
/// the point lies on the plane.
Eigen::Vector2d parallax_displacement(const Eigen::Vector3d& point,
                                      const CameraPose& pose_a,
                                      const CameraPose& pose_b,
                                      const PlaneConfig& plane);

} // namespace skyflux::georeg
