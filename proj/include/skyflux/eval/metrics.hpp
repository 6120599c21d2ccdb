#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "skyflux/appearance/detections.hpp"
#include "skyflux/core/bbox.hpp"

namespace skyflux::eval {

enum class MatchCriterion {
    IoU,           // pair counts when IoU >= threshold
    CentroidInBox, // pair counts when the detection's center lies in the GT box
};

struct MatchConfig {
    MatchCriterion criterion = MatchCriterion::IoU;
    double iou_threshold = 0.3; // only read for the IoU criterion; in (0, 1]
    // true: greedy descending-IoU one-to-one assignment per frame.
    // false: every qualifying pair is listed and tp counts distinct matched
    // GT boxes; without an assignment, tp can exceed the detection count in
    // degenerate many-to-one scenes, so precision is only meaningful in
    // one-to-one mode.
    bool one_to_one = true;
};

struct MatchPair {
    int frame_index = 0;
    size_t gt_index = 0; // position within the frame's box list
    size_t dt_index = 0;
    double iou = 0.0;
};

struct MatchResult {
    size_t tp = 0;
    size_t gt_count = 0;
    size_t dt_count = 0;
    std::vector<MatchPair> pairs;
};

/// Per-frame matching between ground truth and detections over the union
/// of frames present in either set.
MatchResult match_detections(const appearance::DetectionSet& gt,
                             const appearance::DetectionSet& dt,
                             const MatchConfig& cfg);

/// Percent-valued scores. precision = 100 tp / dt (0 when dt = 0),
/// recall = 100 tp / gt (0 when gt = 0), f = harmonic mean (0 when
/// p + r = 0). Throws InconsistentCounts when tp exceeds either count.
struct Metrics {
    double precision = 0.0;
    double recall = 0.0;
    double f_measure = 0.0;
};

Metrics metrics(size_t tp, size_t gt_count, size_t dt_count);

/// Harmonic mean of two percent scores: 2pr / (p + r), 0 when p + r = 0.
double f_measure(double precision_pct, double recall_pct);

/// One named row per method, formatted to two decimals in an aligned
/// text table with Precision / Recall / F-measure columns.
struct MetricsRow {
    std::string method;
    Metrics scores;
};

std::string format_metrics_table(const std::vector<MetricsRow>& rows,
                                 const std::string& criterion_name);

} // namespace skyflux::eval
