#pragma once

#include <string>
#include <vector>

#include "skyflux/core/frame.hpp"
#include "skyflux/semcodec/container.hpp"

namespace skyflux::semcodec {

/// Encodes frames[0] as a lossless PNG base frame and every later frame
/// as a masked ROI image: background pixels zeroed, then compressed at
/// `quality` (JPEG; quality == 100 switches to lossless PNG).
///
/// masks.size() must be frames.size() - 1 (masks[i] covers frames[i + 1])
/// or frames.size() (masks[0] is ignored; the base frame has no mask).
SemanticContainer encode(const std::vector<Frame>& frames,
                         const std::vector<BinaryMask>& masks, int quality);

/// composite == true: each output frame is the base frame with the stored
/// run-length ROI replaced by the decoded ROI pixels; output[0] is the
/// base frame itself, so frame count, dims, and order match the input.
/// composite == false: returns only the decoded ROI frames as-is
/// (black background), for overlay on an externally held base.
std::vector<Frame> decode(const SemanticContainer& c, bool composite);

/// The (start, length) runs of an encoded frame back as a mask raster.
BinaryMask runs_to_mask(const AbstractFrame& af, int width, int height);

/// Byte accounting for one encoded sequence against two reference costs
/// for the same frames: lossless (PNG per frame) and raw (w*h*ch bytes
/// per frame). Sizes in bytes; MB below means 10^6 bytes.
struct CompressionReport {
    size_t container_bytes = 0;
    size_t base_bytes = 0;          // base PNG payload
    size_t roi_image_bytes = 0;     // sum of abstract image payloads
    size_t mask_rle_bytes = 0;      // sum of serialized run lists
    size_t reference_lossless_bytes = 0;
    size_t reference_raw_bytes = 0;
    double scr_vs_lossless = 0.0;   // reference_lossless / container
    double ratio_vs_raw = 0.0;      // reference_raw / container
    double lossless_vs_raw = 0.0;   // reference_raw / reference_lossless

    struct FrameBytes {
        int frame_index = 0;
        size_t image_bytes = 0;
        size_t rle_bytes = 0;
    };
    std::vector<FrameBytes> per_frame;
};

CompressionReport compression_report(const SemanticContainer& c,
                                     size_t reference_lossless_bytes,
                                     size_t reference_raw_bytes);

/// Aligned text table: one row per representation with MB and the
/// compression ratio against the lossless reference.
std::string format_report(const CompressionReport& r);

} // namespace skyflux::semcodec
