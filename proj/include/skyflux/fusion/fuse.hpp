#pragma once

#include <limits>
#include <vector>

#include "skyflux/appearance/detections.hpp"
#include "skyflux/core/config.hpp"
#include "skyflux/core/frame.hpp"
#include "skyflux/fusion/buildings.hpp"

namespace skyflux::fusion {

/// Decision-table result for one frame. Masks are subsets of the raw
/// motion input; moving_vehicle_mask and building_mask never overlap, and
/// building_mask avoids the appearance mask entirely.
struct FusionOutput {
    int frame_index = 0;
    BinaryMask moving_vehicle_mask;
    BinaryMask building_mask;
    appearance::DetectionSet categorized; // every blob with its category
    std::vector<BBox> building_boxes;     // refined roof boxes, feed aggregation
    size_t other_moving_count = 0;        // logged; in no output mask
};

/// Applies the motion/appearance decision table to one frame:
///   blob overlaps appearance (>= overlap_fraction of its pixels)
///                                      -> MovingVehicle
///   blob without appearance, area >  cutoff -> Building
///   blob without appearance, area <= cutoff -> OtherMovingOrFalse
///   appearance component under the overlap fraction -> StationaryVehicleOrFalse
/// The motion mask is cleaned by morphology_close_open and min_blob_area
/// before blobbing. The building mask is the Building blobs re-closed,
/// size-filtered, and stripped of appearance, moving-vehicle, and
/// off-motion pixels.
FusionOutput fuse(const BinaryMask& motion, const BinaryMask& appearance,
                  int frame_index, const SequenceConfig& config);

/// Roof-top parked-vehicle filter: every MovingVehicle whose box center
/// falls inside one of the aggregated building boxes is demoted to
/// StationaryVehicleOrFalse, and the boxes' pixels are cleared from the
/// moving-vehicle mask.
void apply_building_filter(FusionOutput& out, const std::vector<BBox>& building_boxes);

/// Streaming fusion with temporal roof aggregation: every processed
/// frame's refined roof boxes extend the building tracks, and (when the
/// filter is enabled) all member boxes seen so far filter the current
/// frame. The filter can be disabled to measure its contribution.
class FusionPipeline {
public:
    explicit FusionPipeline(const SequenceConfig& config, bool roof_filter = true);

    FusionOutput process(int frame_index, const BinaryMask& motion,
                         const BinaryMask& appearance);

    const std::vector<BuildingTrack>& tracks() const { return tracks_; }

private:
    SequenceConfig config_;
    bool roof_filter_;
    std::vector<BuildingTrack> tracks_;
    int last_frame_ = std::numeric_limits<int>::min();
};

} // namespace skyflux::fusion
