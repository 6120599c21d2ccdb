#include "skyflux/appearance/detections.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <tuple>

namespace skyflux::appearance {

bool DetectionRecord::operator<(const DetectionRecord& o) const {
    return std::tie(frame_index, class_label, confidence, x, y, w, h) <
           std::tie(o.frame_index, o.class_label, o.confidence, o.x, o.y, o.w, o.h);
}

const std::vector<BBox>& DetectionSet::frame(int index) const {
    static const std::vector<BBox> empty;
    auto it = by_frame.find(index);
    return it == by_frame.end() ? empty : it->second;
}

const std::set<std::string>& default_vehicle_classes() {
    static const std::set<std::string> classes = {"car", "pick-up", "van"};
    return classes;
}

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    size_t b = s.find_last_not_of(" \t\r");
    return a == std::string::npos ? "" : s.substr(a, b - a + 1);
}

double parse_number(const std::string& cell, int line_no) {
    try {
        size_t used = 0;
        double v = std::stod(cell, &used);
        while (used < cell.size() && std::isspace(static_cast<unsigned char>(cell[used])))
            ++used;
        if (used != cell.size())
            throw std::invalid_argument(cell);
        return v;
    } catch (const std::exception&) {
        throw ParseError("detections line " + std::to_string(line_no) +
                         ": bad number '" + cell + "'");
    }
}

} // namespace

DetectionSet load_detections(const std::string& path,
                             const std::set<std::string>& class_filter,
                             double min_confidence) {
    std::ifstream in(path);
    if (!in)
        throw ParseError("cannot open detection file: " + path);

    DetectionSet set;
    std::set<DetectionRecord> seen;
    std::string line;
    int line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty() || line[0] == '#')
            continue;
        if (!header_seen && line.find("frame_index") != std::string::npos) {
            header_seen = true;
            continue;
        }

        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ','))
            cells.push_back(trim(cell));
        if (cells.size() != 7)
            throw ParseError("detections line " + std::to_string(line_no) +
                             ": expected 7 fields, got " + std::to_string(cells.size()));

        DetectionRecord rec;
        double fi = parse_number(cells[0], line_no);
        if (fi < 0 || fi != std::floor(fi))
            throw ParseError("detections line " + std::to_string(line_no) +
                             ": frame_index must be a nonnegative integer");
        rec.frame_index = static_cast<int>(fi);
        rec.class_label = cells[1];
        rec.confidence = parse_number(cells[2], line_no);
        rec.x = parse_number(cells[3], line_no);
        rec.y = parse_number(cells[4], line_no);
        rec.w = parse_number(cells[5], line_no);
        rec.h = parse_number(cells[6], line_no);
        if (rec.class_label.empty())
            throw ParseError("detections line " + std::to_string(line_no) + ": empty class");
        if (!(rec.w > 0) || !(rec.h > 0))
            throw ParseError("detections line " + std::to_string(line_no) +
                             ": box size must be positive");
        if (rec.confidence < 0.0 || rec.confidence > 1.0)
            throw ParseError("detections line " + std::to_string(line_no) +
                             ": confidence outside [0,1]");

        if (!seen.insert(rec).second) {
            ++set.deduplicated;
            continue;
        }
        if (!class_filter.count(rec.class_label)) {
            set.unknown_classes.insert(rec.class_label);
            ++set.rejected_class;
            continue;
        }
        if (rec.confidence < min_confidence) {
            ++set.rejected_confidence;
            continue;
        }
        BBox box;
        box.x = rec.x;
        box.y = rec.y;
        box.w = rec.w;
        box.h = rec.h;
        box.category = Category::Vehicle;
        box.confidence = rec.confidence;
        box.frame_index = rec.frame_index;
        set.by_frame[rec.frame_index].push_back(box);
        ++set.accepted;
    }

    // Canonical per-frame order so the result is independent of the file's
    // line order.
    for (auto& [idx, boxes] : set.by_frame)
        std::sort(boxes.begin(), boxes.end(), [](const BBox& a, const BBox& b) {
            return std::tie(a.x, a.y, a.w, a.h, a.confidence) <
                   std::tie(b.x, b.y, b.w, b.h, b.confidence);
        });
    return set;
}

DetectionSet make_detection_set(const std::vector<DetectionRecord>& records) {
    DetectionSet set;
    for (const DetectionRecord& r : records) {
        BBox box;
        box.x = r.x;
        box.y = r.y;
        box.w = r.w;
        box.h = r.h;
        box.category = r.class_label == "GT" ? Category::GroundTruth : Category::Vehicle;
        box.confidence = r.confidence;
        box.frame_index = r.frame_index;
        set.by_frame[r.frame_index].push_back(box);
        ++set.accepted;
    }
    for (auto& [idx, boxes] : set.by_frame)
        std::sort(boxes.begin(), boxes.end(), [](const BBox& a, const BBox& b) {
            return std::tie(a.x, a.y, a.w, a.h, a.confidence) <
                   std::tie(b.x, b.y, b.w, b.h, b.confidence);
        });
    return set;
}

void save_detections(const std::vector<DetectionRecord>& records, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw ParseError("cannot write detection file: " + path);
    out << "frame_index,class,confidence,x,y,w,h\n";
    out.precision(17);
    for (const DetectionRecord& r : records)
        out << r.frame_index << ',' << r.class_label << ',' << r.confidence << ','
            << r.x << ',' << r.y << ',' << r.w << ',' << r.h << '\n';
}

BinaryMask rasterize_detections(const DetectionSet& dets, int frame_index,
                                int width, int height) {
    if (width <= 0 || height <= 0)
        throw DimensionMismatch("rasterize_detections: empty raster");
    BinaryMask mask(width, height);
    for (const BBox& b : dets.frame(frame_index)) {
        // A pixel cell [i, i+1) x [j, j+1) is covered when its center lies
        // in the half-open box [x, x+w) x [y, y+h).
        int x0 = std::max(0, static_cast<int>(std::ceil(b.x - 0.5)));
        int y0 = std::max(0, static_cast<int>(std::ceil(b.y - 0.5)));
        int x1 = std::min(width - 1, static_cast<int>(std::ceil(b.x + b.w - 0.5)) - 1);
        int y1 = std::min(height - 1, static_cast<int>(std::ceil(b.y + b.h - 0.5)) - 1);
        for (int y = y0; y <= y1; ++y)
            for (int x = x0; x <= x1; ++x)
                mask.set(x, y, true);
    }
    return mask;
}

} // namespace skyflux::appearance
