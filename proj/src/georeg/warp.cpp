#include "skyflux/georeg/warp.hpp"

#include <algorithm>
#include <cmath>

#include "skyflux/georeg/homography.hpp"

namespace skyflux::georeg {

WarpResult warp_frame(const Frame& src, const Homography& H_out_to_in,
                      int out_w, int out_h) {
    if (out_w <= 0 || out_h <= 0)
        throw DimensionMismatch("warp_frame: empty output raster");

    WarpResult res;
    res.frame.index = src.index;
    res.frame.timestamp = src.timestamp;
    res.frame.width = out_w;
    res.frame.height = out_h;
    res.frame.channels = src.channels;
    res.frame.data.assign(static_cast<size_t>(out_w) * out_h * src.channels, 0.0);
    res.validity = BinaryMask(out_w, out_h);

    const Eigen::Matrix3d& H = H_out_to_in.matrix();
    for (int y = 0; y < out_h; ++y) {
        for (int x = 0; x < out_w; ++x) {
            Eigen::Vector3d q = H * Eigen::Vector3d(x, y, 1.0);
            if (!(std::abs(q.z()) > 0.0) || !q.allFinite())
                continue;
            double sx = q.x() / q.z();
            double sy = q.y() / q.z();
            // All four bilinear taps must land inside the source image.
            double fx = std::floor(sx);
            double fy = std::floor(sy);
            int x0 = static_cast<int>(fx);
            int y0 = static_cast<int>(fy);
            if (x0 < 0 || y0 < 0 || x0 + 1 >= src.width || y0 + 1 >= src.height)
                continue;
            double ax = sx - fx;
            double ay = sy - fy;
            for (int c = 0; c < src.channels; ++c) {
                double v00 = src.at(x0, y0, c);
                double v10 = src.at(x0 + 1, y0, c);
                double v01 = src.at(x0, y0 + 1, c);
                double v11 = src.at(x0 + 1, y0 + 1, c);
                double v = (1 - ay) * ((1 - ax) * v00 + ax * v10) +
                           ay * ((1 - ax) * v01 + ax * v11);
                res.frame.at(x, y, c) = v;
            }
            res.validity.set(x, y, 1);
        }
    }
    return res;
}

Homography plane_pixel_to_camera(const CameraPose& pose, const PlaneConfig& plane) {
    plane.validate();
    // plane pixel -> plane meters (affine), then meters -> camera pixel.
    Eigen::Matrix3d S = Eigen::Matrix3d::Identity();
    S(0, 0) = plane.plane_scale;
    S(1, 1) = plane.plane_scale;
    S(0, 2) = plane.plane_origin.x();
    S(1, 2) = plane.plane_origin.y();
    Eigen::Matrix3d H = homography_plane_to_camera(pose).matrix() * S;
    return Homography(H);
}

Homography camera_to_plane_pixel(const CameraPose& pose, const PlaneConfig& plane) {
    plane.validate();
    Eigen::Matrix3d Sinv = Eigen::Matrix3d::Identity();
    Sinv(0, 0) = 1.0 / plane.plane_scale;
    Sinv(1, 1) = 1.0 / plane.plane_scale;
    Sinv(0, 2) = -plane.plane_origin.x() / plane.plane_scale;
    Sinv(1, 2) = -plane.plane_origin.y() / plane.plane_scale;
    Eigen::Matrix3d H = Sinv * homography_camera_to_plane(pose).matrix();
    return Homography(H);
}

WarpResult warp_to_plane(const Frame& frame, const CameraPose& pose,
                         const PlaneConfig& plane) {
    return warp_frame(frame, plane_pixel_to_camera(pose, plane),
                      plane.output_width, plane.output_height);
}

BBox warp_box(const BBox& box, const Homography& H) {
    Eigen::Vector2d corners[4] = {
        H.apply({box.x, box.y}),
        H.apply({box.x + box.w, box.y}),
        H.apply({box.x, box.y + box.h}),
        H.apply({box.x + box.w, box.y + box.h}),
    };
    double xmin = corners[0].x(), xmax = corners[0].x();
    double ymin = corners[0].y(), ymax = corners[0].y();
    for (int i = 1; i < 4; ++i) {
        xmin = std::min(xmin, corners[i].x());
        xmax = std::max(xmax, corners[i].x());
        ymin = std::min(ymin, corners[i].y());
        ymax = std::max(ymax, corners[i].y());
    }
    BBox out = box;
    out.x = xmin;
    out.y = ymin;
    out.w = xmax - xmin;
    out.h = ymax - ymin;
    return out;
}

} // namespace skyflux::georeg
