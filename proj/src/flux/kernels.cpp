#include "skyflux/flux/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace skyflux::flux {

namespace {

void check_kernel_args(double sigma, int radius) {
    if (!(sigma > 0.0))
        throw InvalidSpec("kernel: sigma must be positive");
    if (radius < 1)
        throw InvalidSpec("kernel: radius must be >= 1");
}

std::vector<double> raw_gaussian(double sigma, int radius) {
    std::vector<double> w(2 * radius + 1);
    for (int k = -radius; k <= radius; ++k)
        w[k + radius] = std::exp(-0.5 * k * k / (sigma * sigma));
    return w;
}

} // namespace

int default_radius(double sigma) {
    return std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
}

std::vector<double> gaussian_taps(double sigma, int radius) {
    check_kernel_args(sigma, radius);
    std::vector<double> w = raw_gaussian(sigma, radius);
    double sum = 0.0;
    for (double v : w) sum += v;
    for (double& v : w) v /= sum;
    return w;
}

std::vector<double> gaussian_d1_taps(double sigma, int radius) {
    check_kernel_args(sigma, radius);
    std::vector<double> w = raw_gaussian(sigma, radius);
    // Antisymmetric k * g(k): zeroth moment vanishes by construction;
    // scale the first moment to exactly 1.
    double m1 = 0.0;
    for (int k = -radius; k <= radius; ++k) {
        w[k + radius] *= k;
        m1 += k * w[k + radius];
    }
    for (double& v : w) v /= m1;
    return w;
}

std::vector<double> gaussian_d2_taps(double sigma, int radius) {
    check_kernel_args(sigma, radius);
    std::vector<double> g = raw_gaussian(sigma, radius);
    std::vector<double> w(g.size());
    for (int k = -radius; k <= radius; ++k)
        w[k + radius] = (k * k - sigma * sigma) * g[k + radius];
    // Truncation breaks the zeroth moment; restore it exactly, then scale
    // the second moment to 2. Symmetry keeps the first moment at zero.
    double m0 = 0.0;
    for (double v : w) m0 += v;
    double mean = m0 / static_cast<double>(w.size());
    for (double& v : w) v -= mean;
    double m2 = 0.0;
    for (int k = -radius; k <= radius; ++k)
        m2 += k * k * w[k + radius];
    for (double& v : w) v *= 2.0 / m2;
    return w;
}

std::vector<double> filter_x(const std::vector<double>& src, int width, int height,
                             int channels, const std::vector<double>& taps) {
    if (src.size() != static_cast<size_t>(width) * height * channels)
        throw DimensionMismatch("filter_x: buffer size does not match dims");
    const int radius = static_cast<int>(taps.size()) / 2;
    std::vector<double> out(src.size());
    for (int y = 0; y < height; ++y) {
        const size_t row = static_cast<size_t>(y) * width;
        for (int x = 0; x < width; ++x) {
            for (int c = 0; c < channels; ++c) {
                double acc = 0.0;
                for (int k = -radius; k <= radius; ++k) {
                    int xx = std::clamp(x + k, 0, width - 1);
                    acc += taps[k + radius] * src[(row + xx) * channels + c];
                }
                out[(row + x) * channels + c] = acc;
            }
        }
    }
    return out;
}

std::vector<double> filter_y(const std::vector<double>& src, int width, int height,
                             int channels, const std::vector<double>& taps) {
    if (src.size() != static_cast<size_t>(width) * height * channels)
        throw DimensionMismatch("filter_y: buffer size does not match dims");
    const int radius = static_cast<int>(taps.size()) / 2;
    std::vector<double> out(src.size());
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            for (int c = 0; c < channels; ++c) {
                double acc = 0.0;
                for (int k = -radius; k <= radius; ++k) {
                    int yy = std::clamp(y + k, 0, height - 1);
                    acc += taps[k + radius] *
                           src[(static_cast<size_t>(yy) * width + x) * channels + c];
                }
                out[(static_cast<size_t>(y) * width + x) * channels + c] = acc;
            }
        }
    }
    return out;
}

std::vector<double> box_sum(const std::vector<double>& src, int width, int height,
                            int radius) {
    if (src.size() != static_cast<size_t>(width) * height)
        throw DimensionMismatch("box_sum: buffer size does not match dims");
    if (radius == 0)
        return src;
    // Replicate-pad box sums are separable like any other correlation.
    std::vector<double> tmp(src.size());
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x) {
            double acc = 0.0;
            for (int k = -radius; k <= radius; ++k)
                acc += src[static_cast<size_t>(y) * width + std::clamp(x + k, 0, width - 1)];
            tmp[static_cast<size_t>(y) * width + x] = acc;
        }
    std::vector<double> out(src.size());
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x) {
            double acc = 0.0;
            for (int k = -radius; k <= radius; ++k)
                acc += tmp[static_cast<size_t>(std::clamp(y + k, 0, height - 1)) * width + x];
            out[static_cast<size_t>(y) * width + x] = acc;
        }
    return out;
}

BinaryMask erode(const BinaryMask& mask, int radius) {
    if (radius == 0)
        return mask;
    BinaryMask tmp(mask.width, mask.height);
    for (int y = 0; y < mask.height; ++y)
        for (int x = 0; x < mask.width; ++x) {
            bool all = true;
            for (int k = -radius; k <= radius && all; ++k)
                all = mask.at(std::clamp(x + k, 0, mask.width - 1), y);
            tmp.set(x, y, all);
        }
    BinaryMask out(mask.width, mask.height);
    for (int y = 0; y < mask.height; ++y)
        for (int x = 0; x < mask.width; ++x) {
            bool all = true;
            for (int k = -radius; k <= radius && all; ++k)
                all = tmp.at(x, std::clamp(y + k, 0, mask.height - 1));
            out.set(x, y, all);
        }
    return out;
}

} // namespace skyflux::flux
