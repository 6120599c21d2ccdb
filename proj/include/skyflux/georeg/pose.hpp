#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "skyflux/core/error.hpp"

namespace skyflux::georeg {

/// World-to-camera pose plus intrinsics for one frame. The world frame
/// carries the scene dominant plane in its XY axes (z = 0 on the plane).
struct CameraPose {
    int frame_index = 0;
    double f = 1.0; // focal length, px
    double u = 0.0; // principal point, px
    double v = 0.0;
    Eigen::Matrix3d R = Eigen::Matrix3d::Identity(); // world -> camera
    Eigen::Vector3d t = Eigen::Vector3d::Zero();     // world -> camera, m

    Eigen::Matrix3d K() const {
        Eigen::Matrix3d k;
        k << f, 0, u, 0, f, v, 0, 0, 1;
        return k;
    }

    Eigen::Vector3d camera_center() const { return -R.transpose() * t; }

    /// Projects a world point to homogeneous image coordinates.
    Eigen::Vector3d project(const Eigen::Vector3d& X) const { return K() * (R * X + t); }

    void validate() const;
};

/// Pixelization of the ground plane: world XY meters to raster pixels.
struct PlaneConfig {
    int output_width = 0;
    int output_height = 0;
    double plane_scale = 1.0;            // meters per pixel
    Eigen::Vector2d plane_origin{0, 0};  // world meters at output pixel (0,0)

    Eigen::Vector2d pixel_to_world(double px, double py) const {
        return plane_origin + plane_scale * Eigen::Vector2d(px, py);
    }
    Eigen::Vector2d world_to_pixel(const Eigen::Vector2d& xy) const {
        return (xy - plane_origin) / plane_scale;
    }

    void validate() const {
        if (output_width <= 0 || output_height <= 0 || plane_scale <= 0)
            throw InvalidSpec("PlaneConfig: dims and scale must be positive");
    }
};

/// Pose file: one comma-separated record per frame after a header line —
/// frame_index,f,u,v,r11..r33 (row-major),tx,ty,tz.
std::vector<CameraPose> load_poses(const std::string& path);
void save_poses(const std::vector<CameraPose>& poses, const std::string& path);

} // namespace skyflux::georeg
