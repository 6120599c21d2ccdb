#pragma once

#include <variant>

#include "skyflux/core/error.hpp"

namespace skyflux {

/// How a trace field is cut into a binary motion mask.
struct FixedThreshold { double value = 0.01; };
struct PercentileThreshold { double p = 99.0; };
struct OtsuThreshold {};
using ThresholdMode = std::variant<FixedThreshold, PercentileThreshold, OtsuThreshold>;

/// Knobs shared along the detection pipeline. Defaults follow the scales
/// that work at 25 cm ground sample distance.
struct SequenceConfig {
    int temporal_window = 5;        // frames, odd, >= 3
    double spatial_sigma = 1.0;     // px
    double temporal_sigma = 1.0;    // frames
    int integration_radius = 2;     // px, half-width of the local volume
    ThresholdMode trace_threshold_mode = PercentileThreshold{99.0};
    double small_large_area_cutoff = 400.0; // px^2, vehicle vs roof blob
    int morphology_radius = 1;      // px
    double min_blob_area = 12.0;    // px^2
    double overlap_fraction = 0.3;  // motion blob counts as appearance-backed
    double building_iou_link = 0.1; // roof track chaining threshold

    void validate() const {
        if (temporal_window < 3 || temporal_window % 2 == 0)
            throw InvalidSpec("SequenceConfig: temporal_window must be odd and >= 3");
        if (spatial_sigma <= 0 || temporal_sigma <= 0)
            throw InvalidSpec("SequenceConfig: sigmas must be positive");
        if (integration_radius < 0 || morphology_radius < 0)
            throw InvalidSpec("SequenceConfig: radii must be nonnegative");
        if (small_large_area_cutoff <= 0 || min_blob_area < 0)
            throw InvalidSpec("SequenceConfig: areas must be positive");
    }
};

} // namespace skyflux
