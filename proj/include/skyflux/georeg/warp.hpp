#pragma once

#include "skyflux/core/bbox.hpp"
#include "skyflux/core/frame.hpp"
#include "skyflux/core/homography.hpp"
#include "skyflux/georeg/pose.hpp"

namespace skyflux::georeg {

struct WarpResult {
    Frame frame;
    // 1 where all four bilinear source taps fall inside the input image.
    BinaryMask validity;
};

// Resample src into an out_w x out_h grid. H_out_to_in maps OUTPUT pixel
// coordinates to INPUT pixel coordinates (both with pixel centers at
// integer positions). Out-of-range samples produce 0 and a cleared
// validity bit.
WarpResult warp_frame(const Frame& src, const Homography& H_out_to_in,
                      int out_w, int out_h);

// Stabilize one frame onto the ground-plane raster described by plane.
// Composes plane-pixel -> world -> camera-pixel and resamples.
WarpResult warp_to_plane(const Frame& frame, const CameraPose& pose,
                         const PlaneConfig& plane);

// The plane-pixel -> camera-pixel map used by warp_to_plane, exposed for
// transferring detections between rasters.
Homography plane_pixel_to_camera(const CameraPose& pose, const PlaneConfig& plane);

// Inverse map: camera-pixel -> plane-pixel.
Homography camera_to_plane_pixel(const CameraPose& pose, const PlaneConfig& plane);

// Axis-aligned bound of a warped box: maps the four corners of box through
// H and returns the bounding rectangle of the images.
BBox warp_box(const BBox& box, const Homography& H);

} // namespace skyflux::georeg
