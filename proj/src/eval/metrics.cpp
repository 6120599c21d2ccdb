#include "skyflux/eval/metrics.hpp"

#include <algorithm>
#include <iomanip>
#include <set>
#include <sstream>

#include "skyflux/core/error.hpp"

namespace skyflux::eval {

namespace {

bool pair_qualifies(const BBox& gt, const BBox& dt, const MatchConfig& cfg,
                    double pair_iou) {
    if (cfg.criterion == MatchCriterion::IoU)
        return pair_iou >= cfg.iou_threshold;
    return gt.contains(dt.cx(), dt.cy());
}

struct Candidate {
    double iou;
    size_t gi;
    size_t di;
};

void match_frame(int frame_index, const std::vector<BBox>& gt,
                 const std::vector<BBox>& dt, const MatchConfig& cfg,
                 MatchResult& out) {
    std::vector<Candidate> cands;
    for (size_t gi = 0; gi < gt.size(); ++gi)
        for (size_t di = 0; di < dt.size(); ++di) {
            double v = iou(gt[gi], dt[di]);
            if (pair_qualifies(gt[gi], dt[di], cfg, v))
                cands.push_back({v, gi, di});
        }

    if (!cfg.one_to_one) {
        std::set<size_t> hit_gt;
        for (const Candidate& c : cands) {
            out.pairs.push_back({frame_index, c.gi, c.di, c.iou});
            hit_gt.insert(c.gi);
        }
        out.tp += hit_gt.size();
        return;
    }

    // Greedy descending IoU; ties broken by GT index, then detection index,
    // so matching is independent of candidate construction order.
    std::sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
        if (a.iou != b.iou)
            return a.iou > b.iou;
        if (a.gi != b.gi)
            return a.gi < b.gi;
        return a.di < b.di;
    });
    std::vector<char> gt_used(gt.size(), 0), dt_used(dt.size(), 0);
    for (const Candidate& c : cands) {
        if (gt_used[c.gi] || dt_used[c.di])
            continue;
        gt_used[c.gi] = dt_used[c.di] = 1;
        out.pairs.push_back({frame_index, c.gi, c.di, c.iou});
        ++out.tp;
    }
}

} // namespace

MatchResult match_detections(const appearance::DetectionSet& gt,
                             const appearance::DetectionSet& dt,
                             const MatchConfig& cfg) {
    if (cfg.criterion == MatchCriterion::IoU &&
        (cfg.iou_threshold <= 0.0 || cfg.iou_threshold > 1.0))
        throw InvalidSpec("match_detections: IoU threshold must be in (0, 1]");

    std::set<int> frames;
    for (const auto& [f, boxes] : gt.by_frame)
        frames.insert(f);
    for (const auto& [f, boxes] : dt.by_frame)
        frames.insert(f);

    MatchResult out;
    static const std::vector<BBox> empty;
    for (int f : frames) {
        auto gi = gt.by_frame.find(f);
        auto di = dt.by_frame.find(f);
        const std::vector<BBox>& g = gi == gt.by_frame.end() ? empty : gi->second;
        const std::vector<BBox>& d = di == dt.by_frame.end() ? empty : di->second;
        out.gt_count += g.size();
        out.dt_count += d.size();
        if (!g.empty() && !d.empty())
            match_frame(f, g, d, cfg, out);
    }
    return out;
}

Metrics metrics(size_t tp, size_t gt_count, size_t dt_count) {
    if (tp > gt_count || tp > dt_count)
        throw InconsistentCounts("metrics: tp exceeds a box count");
    Metrics m;
    m.precision = dt_count == 0 ? 0.0 : 100.0 * static_cast<double>(tp) / dt_count;
    m.recall = gt_count == 0 ? 0.0 : 100.0 * static_cast<double>(tp) / gt_count;
    m.f_measure = f_measure(m.precision, m.recall);
    return m;
}

double f_measure(double precision_pct, double recall_pct) {
    double s = precision_pct + recall_pct;
    return s > 0.0 ? 2.0 * precision_pct * recall_pct / s : 0.0;
}

std::string format_metrics_table(const std::vector<MetricsRow>& rows,
                                 const std::string& criterion_name) {
    size_t name_w = 18;
    for (const MetricsRow& r : rows)
        name_w = std::max(name_w, r.method.size() + 2);
    std::ostringstream os;
    os << std::fixed << std::setprecision(2);
    os << std::left << std::setw(static_cast<int>(name_w)) << "Method" << std::right
       << std::setw(11) << "Precision" << std::setw(11) << "Recall"
       << std::setw(11) << "F-measure" << "\n";
    for (const MetricsRow& r : rows)
        os << std::left << std::setw(static_cast<int>(name_w)) << r.method
           << std::right << std::setw(11) << r.scores.precision << std::setw(11)
           << r.scores.recall << std::setw(11) << r.scores.f_measure << "\n";
    os << "matching criterion: " << criterion_name << "\n";
    return os.str();
}

} // namespace skyflux::eval
