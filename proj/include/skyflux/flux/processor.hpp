#pragma once

#include <deque>
#include <optional>
#include <vector>

#include "skyflux/core/config.hpp"
#include "skyflux/core/frame.hpp"

namespace skyflux::flux {

/// Traces for one center frame. validity marks pixels whose entire filter
/// and integration support lay inside valid input in every window frame;
/// everything else must be ignored downstream.
struct FluxFrameResult {
    int frame_index = 0;
    int width = 0;
    int height = 0;
    std::vector<double> structure_trace;
    std::vector<double> flux_trace;
    BinaryMask validity;
};

/// Streaming window evaluator. Each frame's spatial filter passes run
/// once and are reused by every window the frame participates in; the
/// temporal kernels mix the cached rasters. Results are identical to
/// batch compute_derivatives + trace calls on the same window.
///
/// The first and last temporal_window/2 frames of a sequence produce no
/// output.
class FluxProcessor {
public:
    explicit FluxProcessor(const SequenceConfig& config);

    /// Feeds the next frame (with its warp-validity mask, if any) and
    /// returns the trace result for the window now centered, once warm.
    std::optional<FluxFrameResult> push(const Frame& frame,
                                        const BinaryMask* validity = nullptr);

    void reset();

    const SequenceConfig& config() const { return config_; }

private:
    struct Slice {
        int frame_index;
        std::vector<double> dx, dy, s;
        BinaryMask validity;
    };

    SequenceConfig config_;
    std::deque<Slice> ring_;
    int width_ = 0, height_ = 0, channels_ = 0;
    int spatial_radius_;
    std::vector<double> gs_, gd_;         // spatial taps
    std::vector<double> ts_, td1_, td2_;  // temporal taps
};

} // namespace skyflux::flux
