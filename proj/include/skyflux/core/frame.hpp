#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "skyflux/core/error.hpp"

namespace skyflux {

/// One video frame. Intensities are unit-interval reals (converted from
/// 8-bit on load), stored row-major and channel-interleaved: the sample
/// for pixel (x, y), channel c sits at data[(y * width + x) * channels + c].
/// Color frames are RGB. Pixel centers are at integer coordinates.
struct Frame {
    int index = 0;
    std::optional<double> timestamp; // seconds
    int width = 0;
    int height = 0;
    int channels = 1; // 1 (gray) or 3 (RGB)
    std::vector<double> data;

    Frame() = default;
    Frame(int w, int h, int ch, int idx = 0)
        : index(idx), width(w), height(h), channels(ch),
          data(static_cast<size_t>(w) * h * ch, 0.0) {
        if (w <= 0 || h <= 0 || (ch != 1 && ch != 3))
            throw DimensionMismatch("Frame: bad dimensions");
    }

    double& at(int x, int y, int c = 0) {
        return data[(static_cast<size_t>(y) * width + x) * channels + c];
    }
    double at(int x, int y, int c = 0) const {
        return data[(static_cast<size_t>(y) * width + x) * channels + c];
    }

    size_t pixel_count() const { return static_cast<size_t>(width) * height; }
    bool same_shape(const Frame& o) const {
        return width == o.width && height == o.height && channels == o.channels;
    }
};

/// Per-pixel boolean raster aligned with the frame it annotates.
struct BinaryMask {
    int width = 0;
    int height = 0;
    std::vector<uint8_t> bits; // 0 or 1

    BinaryMask() = default;
    BinaryMask(int w, int h, bool value = false)
        : width(w), height(h), bits(static_cast<size_t>(w) * h, value ? 1 : 0) {}

    bool at(int x, int y) const { return bits[static_cast<size_t>(y) * width + x] != 0; }
    void set(int x, int y, bool v) { bits[static_cast<size_t>(y) * width + x] = v ? 1 : 0; }

    size_t count() const {
        size_t n = 0;
        for (uint8_t b : bits) n += b;
        return n;
    }
    bool same_shape(const BinaryMask& o) const { return width == o.width && height == o.height; }

    BinaryMask operator&(const BinaryMask& o) const {
        BinaryMask r(width, height);
        for (size_t i = 0; i < bits.size(); ++i) r.bits[i] = bits[i] & o.bits[i];
        return r;
    }
    BinaryMask operator|(const BinaryMask& o) const {
        BinaryMask r(width, height);
        for (size_t i = 0; i < bits.size(); ++i) r.bits[i] = bits[i] | o.bits[i];
        return r;
    }
    BinaryMask operator~() const {
        BinaryMask r(width, height);
        for (size_t i = 0; i < bits.size(); ++i) r.bits[i] = bits[i] ? 0 : 1;
        return r;
    }
};

} // namespace skyflux
