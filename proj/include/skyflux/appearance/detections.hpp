#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "skyflux/core/bbox.hpp"
#include "skyflux/core/frame.hpp"

namespace skyflux::appearance {

/// One ingested detector output row, before class merging.
struct DetectionRecord {
    int frame_index = 0;
    double x = 0, y = 0, w = 0, h = 0; // stabilized-plane pixels
    std::string class_label;
    double confidence = 1.0;

    bool operator==(const DetectionRecord&) const = default;
    bool operator<(const DetectionRecord& o) const;
};

/// Accepted detections grouped by frame, plus bookkeeping about rows the
/// filter rejected or did not recognize.
struct DetectionSet {
    std::map<int, std::vector<BBox>> by_frame; // category Vehicle
    // Class labels seen in the file but absent from the filter set; kept
    // for diagnostics, their rows are not ingested.
    std::set<std::string> unknown_classes;
    size_t accepted = 0;
    size_t rejected_confidence = 0;
    size_t rejected_class = 0;
    size_t deduplicated = 0;

    const std::vector<BBox>& frame(int index) const;
};

/// Default merge set: the vehicle-like classes collapsed into one label.
const std::set<std::string>& default_vehicle_classes();

/// Parses "frame_index,class,confidence,x,y,w,h" CSV (one header line).
/// Rows whose class is in class_filter and whose confidence reaches
/// min_confidence become Vehicle boxes; exact duplicate rows collapse to
/// one. Unknown classes are recorded, not fatal. Throws ParseError with
/// the offending line number on malformed rows.
DetectionSet load_detections(const std::string& path,
                             const std::set<std::string>& class_filter,
                             double min_confidence);

void save_detections(const std::vector<DetectionRecord>& records, const std::string& path);

/// Groups records by frame without filtering or deduplication. Class "GT"
/// becomes GroundTruth boxes, everything else Vehicle. Frames keep the
/// loader's canonical (x, y, w, h, confidence) order.
DetectionSet make_detection_set(const std::vector<DetectionRecord>& records);

/// Union of the frame's detection rectangles, clamped to the raster.
/// A pixel is covered when its center (x + 0.5, y + 0.5) lies inside a
/// rectangle; boxes fully outside contribute nothing.
BinaryMask rasterize_detections(const DetectionSet& dets, int frame_index,
                                int width, int height);

} // namespace skyflux::appearance
