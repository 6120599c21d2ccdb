#include "skyflux/flux/threshold.hpp"

#include <algorithm>
#include <cmath>

namespace skyflux::flux {

namespace {

constexpr double kLogEps = 1e-12;

std::vector<double> valid_values(const std::vector<double>& trace,
                                 const BinaryMask* validity) {
    if (!validity)
        return trace;
    std::vector<double> v;
    v.reserve(trace.size());
    for (size_t i = 0; i < trace.size(); ++i)
        if (validity->bits[i])
            v.push_back(trace[i]);
    return v;
}

BinaryMask cut(const std::vector<double>& trace, int width, int height,
               double threshold, const BinaryMask* validity) {
    BinaryMask mask(width, height);
    for (size_t i = 0; i < trace.size(); ++i) {
        bool on = trace[i] > threshold;
        if (validity && !validity->bits[i])
            on = false;
        mask.bits[i] = on ? 1 : 0;
    }
    return mask;
}

// Threshold on log-trace maximizing between-class variance over a 256-bin
// histogram. Returns false when the values cannot be split.
bool otsu_log_threshold(const std::vector<double>& values, double& thr_log) {
    if (values.empty())
        return false;
    std::vector<double> logs(values.size());
    for (size_t i = 0; i < values.size(); ++i)
        logs[i] = std::log(values[i] + kLogEps);
    auto [mn_it, mx_it] = std::minmax_element(logs.begin(), logs.end());
    const double mn = *mn_it, mx = *mx_it;
    if (!(mx - mn > 1e-12))
        return false;

    constexpr int kBins = 256;
    std::vector<double> hist(kBins, 0.0);
    const double scale = kBins / (mx - mn);
    for (double v : logs) {
        int b = std::min(kBins - 1, static_cast<int>((v - mn) * scale));
        hist[b] += 1.0;
    }
    const double total = static_cast<double>(logs.size());
    double sum_all = 0.0;
    for (int b = 0; b < kBins; ++b)
        sum_all += b * hist[b];

    double w0 = 0.0, sum0 = 0.0, best = -1.0;
    int best_bin = -1;
    for (int b = 0; b < kBins - 1; ++b) {
        w0 += hist[b];
        if (w0 == 0.0)
            continue;
        const double w1 = total - w0;
        if (w1 == 0.0)
            break;
        sum0 += b * hist[b];
        const double mu0 = sum0 / w0;
        const double mu1 = (sum_all - sum0) / w1;
        const double between = w0 * w1 * (mu0 - mu1) * (mu0 - mu1);
        if (between > best) {
            best = between;
            best_bin = b;
        }
    }
    if (best_bin < 0)
        return false;
    // Split at the upper edge of the best bin.
    thr_log = mn + (best_bin + 1) / scale;
    return true;
}

} // namespace

ThresholdResult threshold_trace(const std::vector<double>& trace, int width, int height,
                                const ThresholdMode& mode,
                                const BinaryMask* validity) {
    if (trace.size() != static_cast<size_t>(width) * height)
        throw DimensionMismatch("threshold_trace: trace size does not match dims");
    if (validity && (validity->width != width || validity->height != height))
        throw DimensionMismatch("threshold_trace: validity mask shape mismatch");

    ThresholdResult res;
    if (const auto* fixed = std::get_if<FixedThreshold>(&mode)) {
        res.mask = cut(trace, width, height, fixed->value, validity);
        return res;
    }
    if (const auto* pct = std::get_if<PercentileThreshold>(&mode)) {
        if (!(pct->p >= 0.0) || !(pct->p <= 100.0))
            throw InvalidSpec("threshold_trace: percentile outside [0,100]");
        std::vector<double> v = valid_values(trace, validity);
        if (v.empty()) {
            res.mask = BinaryMask(width, height);
            res.degenerate = true;
            return res;
        }
        std::sort(v.begin(), v.end());
        // Nearest-rank percentile.
        size_t rank = static_cast<size_t>(std::ceil(pct->p / 100.0 * v.size()));
        rank = std::clamp<size_t>(rank, 1, v.size());
        const double theta = v[rank - 1];
        res.mask = cut(trace, width, height, theta, validity);
        return res;
    }

    // Otsu on the log-trace; heavy-tailed raw traces split badly.
    std::vector<double> v = valid_values(trace, validity);
    double thr_log = 0.0;
    if (!otsu_log_threshold(v, thr_log)) {
        res.mask = BinaryMask(width, height);
        res.degenerate = true;
        return res;
    }
    const double theta = std::exp(thr_log) - kLogEps;
    res.mask = cut(trace, width, height, theta, validity);
    return res;
}

} // namespace skyflux::flux
