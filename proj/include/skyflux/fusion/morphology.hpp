#pragma once

#include "skyflux/core/frame.hpp"

namespace skyflux::fusion {

/// Square-window morphology with the usual boundary conventions: pixels
/// outside the raster read as false for dilation and true for erosion, so
/// closing never removes input pixels and opening never adds any.
BinaryMask dilate(const BinaryMask& mask, int radius);
BinaryMask erode(const BinaryMask& mask, int radius);

/// Closing (fill pinholes / bridge hairline gaps) followed by opening
/// (drop speckles / shave hairs), (2r+1)^2 structuring element. r = 0 is
/// the identity.
BinaryMask morphology_close_open(const BinaryMask& mask, int radius);

} // namespace skyflux::fusion
