#pragma once

#include <vector>

#include "skyflux/core/bbox.hpp"
#include "skyflux/core/frame.hpp"

namespace skyflux::fusion {

/// One 8-connected blob of true pixels.
struct Component {
    std::vector<int> pixels; // linear indices y * width + x, scan order
    BBox bbox;               // tight, in pixel-cell coordinates
    double centroid_x = 0;   // mean of covered cell centers
    double centroid_y = 0;

    size_t area() const { return pixels.size(); }
};

/// Labels 8-connected components and drops those with fewer than min_area
/// pixels. Components are ordered by their first pixel in scan order;
/// within one component, pixels are in scan order.
std::vector<Component> connected_components(const BinaryMask& mask, double min_area);

} // namespace skyflux::fusion
