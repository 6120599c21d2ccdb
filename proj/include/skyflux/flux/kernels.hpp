#pragma once

#include <vector>

#include "skyflux/core/error.hpp"
#include "skyflux/core/frame.hpp"

namespace skyflux::flux {

/// Sampled Gaussian taps over [-radius, radius], moment-normalized so
/// filtering is exact on the polynomials it must reproduce. All taps are
/// applied as correlations: out(x) = sum_k taps[k+radius] * in(x+k).
///   gaussian_taps:    sum = 1           (reproduces constants)
///   gaussian_d1_taps: sum = 0, sum k*w = 1   (d/dx of a ramp = 1)
///   gaussian_d2_taps: sum = 0, sum k*w = 0, sum k^2*w = 2  (d2/dx2 x^2 = 2)
std::vector<double> gaussian_taps(double sigma, int radius);
std::vector<double> gaussian_d1_taps(double sigma, int radius);
std::vector<double> gaussian_d2_taps(double sigma, int radius);

/// Default truncation for spatial kernels: ceil(3 sigma), at least 1.
int default_radius(double sigma);

/// 1D correlation along rows / columns of a channel-interleaved buffer,
/// replicate border. Buffer layout matches Frame::data.
std::vector<double> filter_x(const std::vector<double>& src, int width, int height,
                             int channels, const std::vector<double>& taps);
std::vector<double> filter_y(const std::vector<double>& src, int width, int height,
                             int channels, const std::vector<double>& taps);

/// Box sum over the (2r+1)^2 window with replicate border, single-channel
/// input. r = 0 returns the input unchanged.
std::vector<double> box_sum(const std::vector<double>& src, int width, int height,
                            int radius);

/// Square erosion with radius r: output is 1 only where every mask pixel
/// within the (2r+1)^2 window (replicate border) is 1.
BinaryMask erode(const BinaryMask& mask, int radius);

} // namespace skyflux::flux
