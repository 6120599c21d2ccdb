#pragma once

#include <vector>

#include "skyflux/core/config.hpp"
#include "skyflux/core/frame.hpp"

namespace skyflux::flux {

/// Spatiotemporal derivatives of the window's center frame, one raster per
/// channel, layout (y * width + x) * channels + c. First-order spatial
/// gradients and temporal derivative, plus the temporal derivatives of the
/// spatial gradient and the second temporal derivative.
struct DerivativeStack {
    int width = 0;
    int height = 0;
    int channels = 1;
    std::vector<double> ix, iy, it;    // dI/dx, dI/dy, dI/dt
    std::vector<double> ixt, iyt, itt; // d2I/dxdt, d2I/dydt, d2I/dt2

    size_t size() const { return static_cast<size_t>(width) * height * channels; }
    void validate() const;
};

/// Filters the window with separable Gaussian-derivative kernels:
/// spatial scale config.spatial_sigma (radius ceil(3 sigma)), temporal
/// scale config.temporal_sigma truncated to the window half-width.
/// The stack describes the center frame only.
/// Throws WindowTooShort when window length != config.temporal_window,
/// DimensionMismatch when frames disagree in shape.
DerivativeStack compute_derivatives(const std::vector<Frame>& window,
                                    const SequenceConfig& config);

/// trace of the gradient outer-product tensor, box-integrated: per pixel,
/// sum over channels of ix^2 + iy^2 + it^2, then summed over the
/// (2 * integration_radius + 1)^2 neighborhood. Responds to all structure,
/// moving or static.
std::vector<double> structure_tensor_trace(const DerivativeStack& stack,
                                           const SequenceConfig& config);

/// trace of the temporal-gradient tensor: per pixel, channel sum of
/// ixt^2 + iyt^2 + itt^2, box-integrated the same way. Zero on static
/// structure regardless of contrast; this is the moving/non-moving
/// discriminant.
std::vector<double> color_flux_trace(const DerivativeStack& stack,
                                     const SequenceConfig& config);

/// Full 3x3 tensor fields for diagnostics. Symmetric, so six unique
/// elements, each box-integrated and channel-summed. The pipeline itself
/// only ever consumes the traces.
struct TensorElements {
    int width = 0;
    int height = 0;
    std::vector<double> xx, xy, xt, yy, yt, tt;
};

TensorElements structure_tensor_elements(const DerivativeStack& stack,
                                         const SequenceConfig& config);
TensorElements flux_tensor_elements(const DerivativeStack& stack,
                                    const SequenceConfig& config);

} // namespace skyflux::flux
