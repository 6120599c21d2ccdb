#include "skyflux/flux/processor.hpp"

#include "skyflux/flux/kernels.hpp"

namespace skyflux::flux {

FluxProcessor::FluxProcessor(const SequenceConfig& config) : config_(config) {
    config_.validate();
    spatial_radius_ = default_radius(config_.spatial_sigma);
    gs_ = gaussian_taps(config_.spatial_sigma, spatial_radius_);
    gd_ = gaussian_d1_taps(config_.spatial_sigma, spatial_radius_);
    const int t_radius = config_.temporal_window / 2;
    ts_ = gaussian_taps(config_.temporal_sigma, t_radius);
    td1_ = gaussian_d1_taps(config_.temporal_sigma, t_radius);
    td2_ = gaussian_d2_taps(config_.temporal_sigma, t_radius);
}

void FluxProcessor::reset() {
    ring_.clear();
    width_ = height_ = channels_ = 0;
}

std::optional<FluxFrameResult> FluxProcessor::push(const Frame& frame,
                                                   const BinaryMask* validity) {
    if (ring_.empty() && width_ == 0) {
        width_ = frame.width;
        height_ = frame.height;
        channels_ = frame.channels;
    } else if (frame.width != width_ || frame.height != height_ ||
               frame.channels != channels_) {
        throw DimensionMismatch("FluxProcessor: frame shape changed mid-sequence");
    }
    if (validity && (validity->width != width_ || validity->height != height_))
        throw DimensionMismatch("FluxProcessor: validity mask shape mismatch");

    Slice slice;
    slice.frame_index = frame.index;
    std::vector<double> fx = filter_x(frame.data, width_, height_, channels_, gd_);
    slice.dx = filter_y(fx, width_, height_, channels_, gs_);
    std::vector<double> sx = filter_x(frame.data, width_, height_, channels_, gs_);
    slice.dy = filter_y(sx, width_, height_, channels_, gd_);
    slice.s = filter_y(sx, width_, height_, channels_, gs_);
    slice.validity = validity ? *validity : BinaryMask(width_, height_, true);
    ring_.push_back(std::move(slice));

    const int T = config_.temporal_window;
    if (static_cast<int>(ring_.size()) > T)
        ring_.pop_front();
    if (static_cast<int>(ring_.size()) < T)
        return std::nullopt;

    const size_t n = static_cast<size_t>(width_) * height_ * channels_;
    std::vector<double> ix(n, 0.0), iy(n, 0.0), it(n, 0.0);
    std::vector<double> ixt(n, 0.0), iyt(n, 0.0), itt(n, 0.0);
    BinaryMask valid(width_, height_, true);
    for (int i = 0; i < T; ++i) {
        const Slice& s = ring_[i];
        const double ws = ts_[i], w1 = td1_[i], w2 = td2_[i];
        for (size_t j = 0; j < n; ++j) {
            ix[j] += ws * s.dx[j];
            iy[j] += ws * s.dy[j];
            it[j] += w1 * s.s[j];
            ixt[j] += w1 * s.dx[j];
            iyt[j] += w1 * s.dy[j];
            itt[j] += w2 * s.s[j];
        }
        valid = valid & s.validity;
    }

    FluxFrameResult res;
    res.frame_index = ring_[T / 2].frame_index;
    res.width = width_;
    res.height = height_;

    const size_t px = static_cast<size_t>(width_) * height_;
    std::vector<double> q_struct(px, 0.0), q_flux(px, 0.0);
    for (size_t p = 0; p < px; ++p) {
        double a = 0.0, b = 0.0;
        for (int c = 0; c < channels_; ++c) {
            size_t i = p * channels_ + c;
            a += ix[i] * ix[i] + iy[i] * iy[i] + it[i] * it[i];
            b += ixt[i] * ixt[i] + iyt[i] * iyt[i] + itt[i] * itt[i];
        }
        q_struct[p] = a;
        q_flux[p] = b;
    }
    res.structure_trace = box_sum(q_struct, width_, height_, config_.integration_radius);
    res.flux_trace = box_sum(q_flux, width_, height_, config_.integration_radius);

    // A trace pixel is trustworthy only if the spatial filters and the
    // box integration never read an invalid sample in any window frame.
    res.validity = erode(valid, spatial_radius_ + config_.integration_radius);
    return res;
}

} // namespace skyflux::flux
