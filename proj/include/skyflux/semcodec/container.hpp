#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "skyflux/core/error.hpp"

namespace skyflux::semcodec {

/// One ROI frame: the masked image (background zeroed) plus the exact
/// run-length mask the compositor uses. Runs are (start, length) pairs
/// over the row-major linear pixel index, sorted and non-overlapping.
struct AbstractFrame {
    int frame_index = 0;          // position in the source sequence; 0 is the base
    uint8_t codec = 0;            // 0 = JPEG, 1 = PNG (lossless)
    std::vector<uint8_t> image_bytes;
    std::vector<std::pair<uint32_t, uint32_t>> mask_runs;

    size_t byte_size() const;     // serialized size of this record
    size_t rle_bytes() const;     // serialized size of the run list alone
};

/// Single-file semantic video container (.svc): one lossless base frame
/// and per-frame masked ROI images. frame_index strictly increasing,
/// dims uniform.
struct SemanticContainer {
    uint32_t version = 1;
    int width = 0;
    int height = 0;
    int channels = 0;
    int quality = 75;             // 100 selects lossless ROI frames
    int base_source_index = 0;    // Frame::index of the base frame
    std::vector<uint8_t> base_png;
    std::vector<AbstractFrame> abstract_frames;

    size_t byte_size() const;     // exact serialized size in bytes
};

/// Deterministic little-endian serialization. Same container, same bytes.
std::vector<uint8_t> serialize_container(const SemanticContainer& c);

/// Validates magic, version, lengths, and run bounds.
/// Throws CorruptContainer on any inconsistency.
SemanticContainer deserialize_container(const std::vector<uint8_t>& bytes);

void save_container(const SemanticContainer& c, const std::string& path);
SemanticContainer load_container(const std::string& path);

} // namespace skyflux::semcodec
