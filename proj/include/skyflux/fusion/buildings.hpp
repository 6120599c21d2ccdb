#pragma once

#include <string>
#include <utility>
#include <vector>

#include "skyflux/core/bbox.hpp"

namespace skyflux::fusion {

/// Roof-top detections of one building chained across frames. The spatial
/// spread of the member boxes grows with the building's height, since
/// taller structures drift farther under platform motion.
struct BuildingTrack {
    int id = 0;
    int first_frame = 0;
    int last_frame = 0;
    std::vector<BBox> boxes; // chronological

    /// Largest distance between any two member-box centers, in pixels.
    double spread() const;
};

/// Greedy chaining: each frame's boxes join the track whose latest box
/// has the highest IoU, provided it reaches iou_link and that track was
/// not already extended this frame; otherwise a new track starts.
std::vector<BuildingTrack> aggregate_buildings(
    const std::vector<std::pair<int, std::vector<BBox>>>& per_frame_buildings,
    double iou_link);

/// One incremental step of the same chaining, for streaming callers.
/// Processing frames in order through this function reproduces
/// aggregate_buildings exactly.
void extend_building_tracks(std::vector<BuildingTrack>& tracks, int frame_index,
                            const std::vector<BBox>& boxes, double iou_link);

/// Text format: "track_id,frame_index,x,y,w,h", one row per member box,
/// after a header line.
void save_building_tracks(const std::vector<BuildingTrack>& tracks, const std::string& path);
std::vector<BuildingTrack> load_building_tracks(const std::string& path);

} // namespace skyflux::fusion
