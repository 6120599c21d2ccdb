#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "skyflux/core/frame.hpp"

namespace skyflux {

/// Loads an 8-bit gray or RGB image; intensities scaled to [0,1].
Frame load_frame(const std::string& path);

/// Writes a frame as 8-bit PNG or JPEG (by extension). Values are
/// quantized with round(v * 255).
void save_frame(const Frame& frame, const std::string& path);

/// In-memory encoders used by the semantic codec. Deterministic for
/// identical input and settings.
std::vector<uint8_t> encode_png(const Frame& frame);
std::vector<uint8_t> encode_jpeg(const Frame& frame, int quality);
Frame decode_image(const std::vector<uint8_t>& bytes);

/// Quantizes to the 8-bit grid the encoders operate on. encode/decode of
/// a frame reproduces quantize8(frame) exactly for lossless formats.
Frame quantize8(const Frame& frame);

/// Binary masks as {0,255} 8-bit PNGs.
void save_mask(const BinaryMask& mask, const std::string& path);
BinaryMask load_mask(const std::string& path);

/// Trace fields travel as 16-bit PNGs, linearly scaled; the factor is
/// recorded in a sidecar text file "<path>.scale.txt".
void save_trace_png16(const std::vector<double>& trace, int width, int height,
                      const std::string& path);
std::vector<double> load_trace_png16(const std::string& path, int& width, int& height);

} // namespace skyflux
