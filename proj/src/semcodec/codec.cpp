#include "skyflux/semcodec/codec.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "skyflux/core/image_io.hpp"

namespace skyflux::semcodec {

namespace {

std::vector<std::pair<uint32_t, uint32_t>> mask_to_runs(const BinaryMask& m) {
    std::vector<std::pair<uint32_t, uint32_t>> runs;
    const size_t n = m.bits.size();
    size_t i = 0;
    while (i < n) {
        if (!m.bits[i]) {
            ++i;
            continue;
        }
        size_t start = i;
        while (i < n && m.bits[i])
            ++i;
        runs.push_back({static_cast<uint32_t>(start), static_cast<uint32_t>(i - start)});
    }
    return runs;
}

Frame masked_frame(const Frame& f, const BinaryMask& m) {
    Frame out = f;
    for (size_t p = 0; p < m.bits.size(); ++p)
        if (!m.bits[p])
            for (int c = 0; c < f.channels; ++c)
                out.data[p * f.channels + c] = 0.0;
    return out;
}

} // namespace

SemanticContainer encode(const std::vector<Frame>& frames,
                         const std::vector<BinaryMask>& masks, int quality) {
    if (frames.empty())
        throw EmptySequence("encode: no frames");
    if (quality < 1 || quality > 100)
        throw InvalidSpec("encode: quality must be in 1..100");
    const size_t n = frames.size();
    const bool aligned = masks.size() == n; // masks[0] present but unused
    if (!aligned && masks.size() != n - 1)
        throw DimensionMismatch("encode: need one mask per non-base frame");
    for (const Frame& f : frames)
        if (!f.same_shape(frames[0]))
            throw DimensionMismatch("encode: frame dims not uniform");
    for (const BinaryMask& m : masks)
        if (m.width != frames[0].width || m.height != frames[0].height)
            throw DimensionMismatch("encode: mask dims do not match frames");

    SemanticContainer c;
    c.width = frames[0].width;
    c.height = frames[0].height;
    c.channels = frames[0].channels;
    c.quality = quality;
    c.base_source_index = frames[0].index;
    c.base_png = encode_png(frames[0]);

    for (size_t i = 1; i < n; ++i) {
        const BinaryMask& m = masks[aligned ? i : i - 1];
        AbstractFrame af;
        af.frame_index = static_cast<int>(i);
        af.mask_runs = mask_to_runs(m);
        Frame roi = masked_frame(frames[i], m);
        if (quality == 100) {
            af.codec = 1;
            af.image_bytes = encode_png(roi);
        } else {
            af.codec = 0;
            af.image_bytes = encode_jpeg(roi, quality);
        }
        c.abstract_frames.push_back(std::move(af));
    }
    return c;
}

BinaryMask runs_to_mask(const AbstractFrame& af, int width, int height) {
    BinaryMask m(width, height);
    for (auto [start, len] : af.mask_runs) {
        if (static_cast<size_t>(start) + len > m.bits.size())
            throw CorruptContainer("mask run exceeds raster");
        std::fill(m.bits.begin() + start, m.bits.begin() + start + len, uint8_t(1));
    }
    return m;
}

std::vector<Frame> decode(const SemanticContainer& c, bool composite) {
    Frame base = decode_image(c.base_png);
    if (base.width != c.width || base.height != c.height || base.channels != c.channels)
        throw CorruptContainer("decode: base frame dims disagree with header");
    base.index = c.base_source_index;

    std::vector<Frame> out;
    if (composite)
        out.push_back(base);
    for (const AbstractFrame& af : c.abstract_frames) {
        Frame roi = decode_image(af.image_bytes);
        if (roi.width != c.width || roi.height != c.height || roi.channels != c.channels)
            throw CorruptContainer("decode: ROI frame dims disagree with header");
        roi.index = c.base_source_index + af.frame_index;
        if (!composite) {
            out.push_back(std::move(roi));
            continue;
        }
        Frame f = base;
        f.index = roi.index;
        for (auto [start, len] : af.mask_runs) {
            size_t lo = static_cast<size_t>(start) * c.channels;
            size_t hi = (static_cast<size_t>(start) + len) * c.channels;
            std::copy(roi.data.begin() + lo, roi.data.begin() + hi, f.data.begin() + lo);
        }
        out.push_back(std::move(f));
    }
    return out;
}

CompressionReport compression_report(const SemanticContainer& c,
                                     size_t reference_lossless_bytes,
                                     size_t reference_raw_bytes) {
    if (reference_lossless_bytes == 0 || reference_raw_bytes == 0)
        throw InvalidSpec("compression_report: reference sizes must be positive");
    CompressionReport r;
    r.container_bytes = c.byte_size();
    r.base_bytes = c.base_png.size();
    for (const AbstractFrame& af : c.abstract_frames) {
        r.roi_image_bytes += af.image_bytes.size();
        r.mask_rle_bytes += af.rle_bytes();
        r.per_frame.push_back({af.frame_index, af.image_bytes.size(), af.rle_bytes()});
    }
    r.reference_lossless_bytes = reference_lossless_bytes;
    r.reference_raw_bytes = reference_raw_bytes;
    r.scr_vs_lossless = static_cast<double>(reference_lossless_bytes) / r.container_bytes;
    r.ratio_vs_raw = static_cast<double>(reference_raw_bytes) / r.container_bytes;
    r.lossless_vs_raw =
        static_cast<double>(reference_raw_bytes) / reference_lossless_bytes;
    return r;
}

std::string format_report(const CompressionReport& r) {
    auto mb = [](size_t bytes) { return static_cast<double>(bytes) / 1e6; };
    std::ostringstream os;
    os << std::fixed;
    os << std::left << std::setw(24) << "Representation" << std::right
       << std::setw(12) << "MB" << std::setw(14) << "vs raw" << std::setw(14)
       << "vs lossless" << "\n";
    auto row = [&](const std::string& name, double megabytes, double vs_raw,
                   double vs_lossless) {
        os << std::left << std::setw(24) << name << std::right << std::setw(12)
           << std::setprecision(3) << megabytes << std::setw(11)
           << std::setprecision(1) << vs_raw << ":1" << std::setw(11)
           << vs_lossless << ":1\n";
    };
    row("Raw RGB", mb(r.reference_raw_bytes), 1.0, 1.0 / r.lossless_vs_raw);
    row("Lossless per-frame", mb(r.reference_lossless_bytes), r.lossless_vs_raw, 1.0);
    row("Semantic container", mb(r.container_bytes), r.ratio_vs_raw,
        r.scr_vs_lossless);
    os << "  base frame " << std::setprecision(3) << mb(r.base_bytes)
       << " MB, ROI images " << mb(r.roi_image_bytes) << " MB, mask runs "
       << mb(r.mask_rle_bytes) << " MB over " << r.per_frame.size()
       << " frames\n";
    return os.str();
}

} // namespace skyflux::semcodec
