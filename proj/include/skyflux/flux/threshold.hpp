#pragma once

#include <vector>

#include "skyflux/core/config.hpp"
#include "skyflux/core/frame.hpp"

namespace skyflux::flux {

struct ThresholdResult {
    BinaryMask mask;
    // Set when the thresholder could not split the data (all valid values
    // equal under Otsu); the mask is then all-false.
    bool degenerate = false;
};

/// Cuts a trace field into a binary motion mask.
///   Fixed(v):      mask = trace > v
///   Percentile(p): threshold at the nearest-rank p-th percentile of the
///                  valid pixels, mask = trace > threshold
///   Otsu:          maximize between-class variance on log(trace + 1e-12)
/// Pixels cleared in validity (when given) never enter the statistics and
/// are forced to 0 in the mask.
ThresholdResult threshold_trace(const std::vector<double>& trace, int width, int height,
                                const ThresholdMode& mode,
                                const BinaryMask* validity = nullptr);

} // namespace skyflux::flux
