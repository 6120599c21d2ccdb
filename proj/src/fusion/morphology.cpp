#include "skyflux/fusion/morphology.hpp"

#include <algorithm>

namespace skyflux::fusion {

namespace {

// Separable min/max over the (2r+1) window; `outside` is the value read
// beyond the raster.
BinaryMask window_pass(const BinaryMask& m, int radius, bool take_max, bool outside) {
    auto combine_x = [&](const BinaryMask& src) {
        BinaryMask out(src.width, src.height);
        for (int y = 0; y < src.height; ++y)
            for (int x = 0; x < src.width; ++x) {
                bool acc = !take_max;
                for (int k = -radius; k <= radius; ++k) {
                    int xx = x + k;
                    bool v = (xx < 0 || xx >= src.width) ? outside : src.at(xx, y);
                    acc = take_max ? (acc || v) : (acc && v);
                }
                out.set(x, y, acc);
            }
        return out;
    };
    auto combine_y = [&](const BinaryMask& src) {
        BinaryMask out(src.width, src.height);
        for (int y = 0; y < src.height; ++y)
            for (int x = 0; x < src.width; ++x) {
                bool acc = !take_max;
                for (int k = -radius; k <= radius; ++k) {
                    int yy = y + k;
                    bool v = (yy < 0 || yy >= src.height) ? outside : src.at(x, yy);
                    acc = take_max ? (acc || v) : (acc && v);
                }
                out.set(x, y, acc);
            }
        return out;
    };
    return combine_y(combine_x(m));
}

} // namespace

BinaryMask dilate(const BinaryMask& mask, int radius) {
    if (radius == 0)
        return mask;
    return window_pass(mask, radius, /*take_max=*/true, /*outside=*/false);
}

BinaryMask erode(const BinaryMask& mask, int radius) {
    if (radius == 0)
        return mask;
    return window_pass(mask, radius, /*take_max=*/false, /*outside=*/true);
}

BinaryMask morphology_close_open(const BinaryMask& mask, int radius) {
    if (radius == 0)
        return mask;
    BinaryMask closed = erode(dilate(mask, radius), radius);
    return dilate(erode(closed, radius), radius);
}

} // namespace skyflux::fusion
