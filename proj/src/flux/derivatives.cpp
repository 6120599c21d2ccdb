#include "skyflux/flux/derivatives.hpp"

#include <cmath>

#include "skyflux/flux/kernels.hpp"

namespace skyflux::flux {

void DerivativeStack::validate() const {
    if (width <= 0 || height <= 0 || (channels != 1 && channels != 3))
        throw DimensionMismatch("DerivativeStack: bad dimensions");
    const size_t n = size();
    for (const std::vector<double>* f : {&ix, &iy, &it, &ixt, &iyt, &itt}) {
        if (f->size() != n)
            throw DimensionMismatch("DerivativeStack: raster size mismatch");
        for (double v : *f)
            if (!std::isfinite(v))
                throw DimensionMismatch("DerivativeStack: non-finite value");
    }
}

namespace {

// Weighted sum of per-frame rasters: the temporal filter applied at the
// window center.
std::vector<double> temporal_mix(const std::vector<std::vector<double>>& slices,
                                 const std::vector<double>& taps) {
    std::vector<double> out(slices.front().size(), 0.0);
    for (size_t i = 0; i < slices.size(); ++i) {
        const double w = taps[i];
        const std::vector<double>& s = slices[i];
        for (size_t j = 0; j < out.size(); ++j)
            out[j] += w * s[j];
    }
    return out;
}

std::vector<double> channel_sum_squares(const std::vector<double>& a,
                                        const std::vector<double>& b,
                                        const std::vector<double>& c,
                                        int width, int height, int channels) {
    std::vector<double> q(static_cast<size_t>(width) * height, 0.0);
    for (size_t p = 0; p < q.size(); ++p) {
        double acc = 0.0;
        for (int ch = 0; ch < channels; ++ch) {
            size_t i = p * channels + ch;
            acc += a[i] * a[i] + b[i] * b[i] + c[i] * c[i];
        }
        q[p] = acc;
    }
    return q;
}

std::vector<double> channel_sum_products(const std::vector<double>& a,
                                         const std::vector<double>& b,
                                         int width, int height, int channels) {
    std::vector<double> q(static_cast<size_t>(width) * height, 0.0);
    for (size_t p = 0; p < q.size(); ++p) {
        double acc = 0.0;
        for (int ch = 0; ch < channels; ++ch) {
            size_t i = p * channels + ch;
            acc += a[i] * b[i];
        }
        q[p] = acc;
    }
    return q;
}

} // namespace

DerivativeStack compute_derivatives(const std::vector<Frame>& window,
                                    const SequenceConfig& config) {
    config.validate();
    if (static_cast<int>(window.size()) != config.temporal_window)
        throw WindowTooShort("compute_derivatives: window of " +
                             std::to_string(window.size()) + " frames, expected " +
                             std::to_string(config.temporal_window));
    const Frame& center = window[window.size() / 2];
    for (const Frame& f : window)
        if (!f.same_shape(center))
            throw DimensionMismatch("compute_derivatives: frames differ in shape");

    const int radius = default_radius(config.spatial_sigma);
    const std::vector<double> gs = gaussian_taps(config.spatial_sigma, radius);
    const std::vector<double> gd = gaussian_d1_taps(config.spatial_sigma, radius);

    const int t_radius = config.temporal_window / 2;
    const std::vector<double> ts = gaussian_taps(config.temporal_sigma, t_radius);
    const std::vector<double> td1 = gaussian_d1_taps(config.temporal_sigma, t_radius);
    const std::vector<double> td2 = gaussian_d2_taps(config.temporal_sigma, t_radius);

    // Per-frame separable spatial passes; the temporal kernel then mixes
    // whole rasters.
    std::vector<std::vector<double>> dx_slices, dy_slices, s_slices;
    dx_slices.reserve(window.size());
    for (const Frame& f : window) {
        std::vector<double> fx = filter_x(f.data, f.width, f.height, f.channels, gd);
        dx_slices.push_back(filter_y(fx, f.width, f.height, f.channels, gs));
        std::vector<double> sx = filter_x(f.data, f.width, f.height, f.channels, gs);
        dy_slices.push_back(filter_y(sx, f.width, f.height, f.channels, gd));
        s_slices.push_back(filter_y(sx, f.width, f.height, f.channels, gs));
    }

    DerivativeStack stack;
    stack.width = center.width;
    stack.height = center.height;
    stack.channels = center.channels;
    stack.ix = temporal_mix(dx_slices, ts);
    stack.iy = temporal_mix(dy_slices, ts);
    stack.it = temporal_mix(s_slices, td1);
    stack.ixt = temporal_mix(dx_slices, td1);
    stack.iyt = temporal_mix(dy_slices, td1);
    stack.itt = temporal_mix(s_slices, td2);
    return stack;
}

std::vector<double> structure_tensor_trace(const DerivativeStack& stack,
                                           const SequenceConfig& config) {
    stack.validate();
    std::vector<double> q = channel_sum_squares(stack.ix, stack.iy, stack.it,
                                                stack.width, stack.height, stack.channels);
    return box_sum(q, stack.width, stack.height, config.integration_radius);
}

std::vector<double> color_flux_trace(const DerivativeStack& stack,
                                     const SequenceConfig& config) {
    stack.validate();
    std::vector<double> q = channel_sum_squares(stack.ixt, stack.iyt, stack.itt,
                                                stack.width, stack.height, stack.channels);
    return box_sum(q, stack.width, stack.height, config.integration_radius);
}

namespace {

TensorElements elements_of(const std::vector<double>& a, const std::vector<double>& b,
                           const std::vector<double>& c, const DerivativeStack& stack,
                           const SequenceConfig& config) {
    const int w = stack.width, h = stack.height, ch = stack.channels;
    const int r = config.integration_radius;
    TensorElements e;
    e.width = w;
    e.height = h;
    e.xx = box_sum(channel_sum_products(a, a, w, h, ch), w, h, r);
    e.xy = box_sum(channel_sum_products(a, b, w, h, ch), w, h, r);
    e.xt = box_sum(channel_sum_products(a, c, w, h, ch), w, h, r);
    e.yy = box_sum(channel_sum_products(b, b, w, h, ch), w, h, r);
    e.yt = box_sum(channel_sum_products(b, c, w, h, ch), w, h, r);
    e.tt = box_sum(channel_sum_products(c, c, w, h, ch), w, h, r);
    return e;
}

} // namespace

TensorElements structure_tensor_elements(const DerivativeStack& stack,
                                         const SequenceConfig& config) {
    stack.validate();
    return elements_of(stack.ix, stack.iy, stack.it, stack, config);
}

TensorElements flux_tensor_elements(const DerivativeStack& stack,
                                    const SequenceConfig& config) {
    stack.validate();
    return elements_of(stack.ixt, stack.iyt, stack.itt, stack, config);
}

} // namespace skyflux::flux
