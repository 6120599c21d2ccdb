#include "skyflux/semcodec/container.hpp"

#include <cstring>
#include <fstream>

namespace skyflux::semcodec {

namespace {

constexpr char kMagic[4] = {'S', 'V', 'C', '1'};
constexpr uint32_t kVersion = 1;
// magic + version + w + h + ch + quality + count + base index + base length
constexpr size_t kHeaderBytes = 4 + 4 * 7 + 8;

void put_u32(std::vector<uint8_t>& out, uint32_t v) {
    for (int i = 0; i < 4; ++i)
        out.push_back(static_cast<uint8_t>((v >> (8 * i)) & 0xff));
}

void put_u64(std::vector<uint8_t>& out, uint64_t v) {
    for (int i = 0; i < 8; ++i)
        out.push_back(static_cast<uint8_t>((v >> (8 * i)) & 0xff));
}

void put_i32(std::vector<uint8_t>& out, int32_t v) {
    put_u32(out, static_cast<uint32_t>(v));
}

struct Reader {
    const std::vector<uint8_t>& buf;
    size_t pos = 0;

    void need(size_t n) const {
        if (pos + n > buf.size())
            throw CorruptContainer("semantic container: truncated at byte " +
                                   std::to_string(pos));
    }
    uint32_t u32() {
        need(4);
        uint32_t v = 0;
        for (int i = 0; i < 4; ++i)
            v |= static_cast<uint32_t>(buf[pos + i]) << (8 * i);
        pos += 4;
        return v;
    }
    uint64_t u64() {
        need(8);
        uint64_t v = 0;
        for (int i = 0; i < 8; ++i)
            v |= static_cast<uint64_t>(buf[pos + i]) << (8 * i);
        pos += 8;
        return v;
    }
    int32_t i32() { return static_cast<int32_t>(u32()); }
    uint8_t u8() {
        need(1);
        return buf[pos++];
    }
    std::vector<uint8_t> bytes(uint64_t n) {
        need(n);
        std::vector<uint8_t> v(buf.begin() + static_cast<ptrdiff_t>(pos),
                               buf.begin() + static_cast<ptrdiff_t>(pos + n));
        pos += n;
        return v;
    }
};

} // namespace

size_t AbstractFrame::rle_bytes() const { return 4 + 8 * mask_runs.size(); }

size_t AbstractFrame::byte_size() const {
    // index + codec + image length prefix + image + run list
    return 4 + 1 + 8 + image_bytes.size() + rle_bytes();
}

size_t SemanticContainer::byte_size() const {
    size_t n = kHeaderBytes + base_png.size();
    for (const AbstractFrame& af : abstract_frames)
        n += af.byte_size();
    return n;
}

std::vector<uint8_t> serialize_container(const SemanticContainer& c) {
    std::vector<uint8_t> out;
    out.reserve(c.byte_size());
    out.insert(out.end(), kMagic, kMagic + 4);
    put_u32(out, c.version);
    put_u32(out, static_cast<uint32_t>(c.width));
    put_u32(out, static_cast<uint32_t>(c.height));
    put_u32(out, static_cast<uint32_t>(c.channels));
    put_u32(out, static_cast<uint32_t>(c.quality));
    put_u32(out, static_cast<uint32_t>(c.abstract_frames.size()));
    put_i32(out, c.base_source_index);
    put_u64(out, c.base_png.size());
    out.insert(out.end(), c.base_png.begin(), c.base_png.end());
    for (const AbstractFrame& af : c.abstract_frames) {
        put_i32(out, af.frame_index);
        out.push_back(af.codec);
        put_u64(out, af.image_bytes.size());
        out.insert(out.end(), af.image_bytes.begin(), af.image_bytes.end());
        put_u32(out, static_cast<uint32_t>(af.mask_runs.size()));
        for (auto [start, len] : af.mask_runs) {
            put_u32(out, start);
            put_u32(out, len);
        }
    }
    return out;
}

SemanticContainer deserialize_container(const std::vector<uint8_t>& bytes) {
    Reader r{bytes};
    r.need(4);
    if (std::memcmp(bytes.data(), kMagic, 4) != 0)
        throw CorruptContainer("semantic container: bad magic");
    r.pos = 4;

    SemanticContainer c;
    c.version = r.u32();
    if (c.version != kVersion)
        throw CorruptContainer("semantic container: unsupported version " +
                               std::to_string(c.version));
    c.width = static_cast<int>(r.u32());
    c.height = static_cast<int>(r.u32());
    c.channels = static_cast<int>(r.u32());
    c.quality = static_cast<int>(r.u32());
    uint32_t count = r.u32();
    c.base_source_index = r.i32();
    if (c.width <= 0 || c.height <= 0 || (c.channels != 1 && c.channels != 3))
        throw CorruptContainer("semantic container: bad dimensions");
    if (c.quality < 1 || c.quality > 100)
        throw CorruptContainer("semantic container: bad quality");

    c.base_png = r.bytes(r.u64());

    const uint64_t pixels = static_cast<uint64_t>(c.width) * c.height;
    int prev_index = 0;
    for (uint32_t i = 0; i < count; ++i) {
        AbstractFrame af;
        af.frame_index = r.i32();
        if (af.frame_index <= prev_index)
            throw CorruptContainer("semantic container: frame indices not increasing");
        prev_index = af.frame_index;
        af.codec = r.u8();
        if (af.codec > 1)
            throw CorruptContainer("semantic container: unknown codec id");
        af.image_bytes = r.bytes(r.u64());
        uint32_t runs = r.u32();
        af.mask_runs.reserve(runs);
        uint64_t prev_end = 0;
        for (uint32_t k = 0; k < runs; ++k) {
            uint32_t start = r.u32();
            uint32_t len = r.u32();
            if (len == 0 || start < prev_end ||
                static_cast<uint64_t>(start) + len > pixels)
                throw CorruptContainer("semantic container: bad mask run");
            prev_end = static_cast<uint64_t>(start) + len;
            af.mask_runs.push_back({start, len});
        }
        c.abstract_frames.push_back(std::move(af));
    }
    if (r.pos != bytes.size())
        throw CorruptContainer("semantic container: trailing bytes");
    return c;
}

void save_container(const SemanticContainer& c, const std::string& path) {
    std::vector<uint8_t> bytes = serialize_container(c);
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error("cannot open for writing: " + path);
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out)
        throw Error("short write: " + path);
}

SemanticContainer load_container(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error("cannot open: " + path);
    std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                               std::istreambuf_iterator<char>());
    return deserialize_container(bytes);
}

} // namespace skyflux::semcodec
