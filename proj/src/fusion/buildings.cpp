#include "skyflux/fusion/buildings.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "skyflux/core/error.hpp"

namespace skyflux::fusion {

double BuildingTrack::spread() const {
    double best = 0.0;
    for (size_t i = 0; i < boxes.size(); ++i)
        for (size_t j = i + 1; j < boxes.size(); ++j) {
            double dx = boxes[i].cx() - boxes[j].cx();
            double dy = boxes[i].cy() - boxes[j].cy();
            best = std::max(best, std::hypot(dx, dy));
        }
    return best;
}

void extend_building_tracks(std::vector<BuildingTrack>& tracks, int frame_index,
                            const std::vector<BBox>& boxes, double iou_link) {
    std::vector<bool> taken(tracks.size(), false);
    for (const BBox& box : boxes) {
        int best_track = -1;
        double best_iou = 0.0;
        for (size_t t = 0; t < tracks.size(); ++t) {
            if (taken[t])
                continue;
            double v = iou(tracks[t].boxes.back(), box);
            if (v >= iou_link && v > best_iou) {
                best_iou = v;
                best_track = static_cast<int>(t);
            }
        }
        BBox b = box;
        b.frame_index = frame_index;
        b.category = Category::Building;
        if (best_track >= 0) {
            tracks[best_track].boxes.push_back(b);
            tracks[best_track].last_frame = frame_index;
            taken[best_track] = true;
        } else {
            BuildingTrack t;
            t.id = static_cast<int>(tracks.size());
            t.first_frame = t.last_frame = frame_index;
            t.boxes.push_back(b);
            tracks.push_back(std::move(t));
            taken.push_back(true);
        }
    }
}

std::vector<BuildingTrack> aggregate_buildings(
    const std::vector<std::pair<int, std::vector<BBox>>>& per_frame_buildings,
    double iou_link) {
    std::vector<BuildingTrack> tracks;
    int prev = std::numeric_limits<int>::min();
    for (const auto& [frame_index, boxes] : per_frame_buildings) {
        if (frame_index < prev)
            throw InvalidSpec("aggregate_buildings: frames must be ordered");
        prev = frame_index;
        extend_building_tracks(tracks, frame_index, boxes, iou_link);
    }
    return tracks;
}

void save_building_tracks(const std::vector<BuildingTrack>& tracks, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw ParseError("cannot write building tracks: " + path);
    out << "track_id,frame_index,x,y,w,h\n";
    out.precision(17);
    for (const BuildingTrack& t : tracks)
        for (const BBox& b : t.boxes)
            out << t.id << ',' << b.frame_index << ',' << b.x << ',' << b.y << ','
                << b.w << ',' << b.h << '\n';
}

std::vector<BuildingTrack> load_building_tracks(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ParseError("cannot open building tracks: " + path);
    std::map<int, BuildingTrack> by_id;
    std::string line;
    int line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty() || line[0] == '#')
            continue;
        if (!header_seen && line.find("track_id") != std::string::npos) {
            header_seen = true;
            continue;
        }
        std::stringstream ss(line);
        std::string cell;
        std::vector<double> v;
        while (std::getline(ss, cell, ',')) {
            try {
                v.push_back(std::stod(cell));
            } catch (const std::exception&) {
                throw ParseError("building tracks line " + std::to_string(line_no) +
                                 ": bad number '" + cell + "'");
            }
        }
        if (v.size() != 6)
            throw ParseError("building tracks line " + std::to_string(line_no) +
                             ": expected 6 fields");
        int id = static_cast<int>(v[0]);
        BBox b;
        b.frame_index = static_cast<int>(v[1]);
        b.x = v[2];
        b.y = v[3];
        b.w = v[4];
        b.h = v[5];
        b.category = Category::Building;
        auto [it, inserted] = by_id.try_emplace(id);
        if (inserted) {
            it->second.id = id;
            it->second.first_frame = b.frame_index;
        }
        it->second.boxes.push_back(b);
        it->second.last_frame = b.frame_index;
    }
    std::vector<BuildingTrack> tracks;
    for (auto& [id, t] : by_id)
        tracks.push_back(std::move(t));
    return tracks;
}

} // namespace skyflux::fusion
