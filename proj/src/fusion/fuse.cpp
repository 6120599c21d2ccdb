#include "skyflux/fusion/fuse.hpp"

#include <algorithm>
#include <cmath>

#include "skyflux/fusion/components.hpp"
#include "skyflux/fusion/morphology.hpp"

namespace skyflux::fusion {

namespace {

// Fraction of the component's pixels set in `other`.
double overlap_fraction_of(const Component& c, const BinaryMask& other) {
    size_t hit = 0;
    for (int p : c.pixels)
        hit += other.bits[p];
    return static_cast<double>(hit) / static_cast<double>(c.pixels.size());
}

void clear_box_pixels(BinaryMask& mask, const BBox& box) {
    int x0 = std::max(0, static_cast<int>(std::ceil(box.x - 0.5)));
    int y0 = std::max(0, static_cast<int>(std::ceil(box.y - 0.5)));
    int x1 = std::min(mask.width - 1, static_cast<int>(std::ceil(box.x + box.w - 0.5)) - 1);
    int y1 = std::min(mask.height - 1, static_cast<int>(std::ceil(box.y + box.h - 0.5)) - 1);
    for (int y = y0; y <= y1; ++y)
        for (int x = x0; x <= x1; ++x)
            mask.set(x, y, false);
}

} // namespace

FusionOutput fuse(const BinaryMask& motion, const BinaryMask& appearance,
                  int frame_index, const SequenceConfig& config) {
    if (!motion.same_shape(appearance))
        throw DimensionMismatch("fuse: motion and appearance masks differ in shape");
    config.validate();

    const int w = motion.width, h = motion.height;
    FusionOutput out;
    out.frame_index = frame_index;
    out.moving_vehicle_mask = BinaryMask(w, h);
    out.building_mask = BinaryMask(w, h);

    BinaryMask motion_clean = morphology_close_open(motion, config.morphology_radius);
    std::vector<Component> blobs = connected_components(motion_clean, config.min_blob_area);

    std::vector<BBox>& cat = out.categorized.by_frame[frame_index];
    BinaryMask building_pixels(w, h);
    BinaryMask moving_pixels(w, h);

    // Each appearance detection is judged by how much of it the cleaned
    // motion evidence covers. Motion blobs smear along the travel
    // direction, so the blob-side fraction would shrink with speed; the
    // detection-side fraction does not. Confirmed detections keep their
    // own geometry.
    BinaryMask confirmed(w, h);
    for (const Component& ac : connected_components(appearance, 1.0)) {
        BBox box = ac.bbox;
        box.frame_index = frame_index;
        if (overlap_fraction_of(ac, motion_clean) >= config.overlap_fraction) {
            box.category = Category::MovingVehicle;
            for (int p : ac.pixels)
                confirmed.bits[p] = 1;
        } else {
            box.category = Category::StationaryVehicleOrFalse;
        }
        cat.push_back(box);
    }

    // Motion blobs backing a confirmed detection carry its smear; the
    // rest are parallax-sized or small clutter.
    for (const Component& blob : blobs) {
        double frac = overlap_fraction_of(blob, confirmed);
        if (frac > 0.0) {
            for (int p : blob.pixels)
                moving_pixels.bits[p] = 1;
            continue;
        }
        BBox box = blob.bbox;
        box.frame_index = frame_index;
        if (static_cast<double>(blob.area()) > config.small_large_area_cutoff) {
            box.category = Category::Building;
            for (int p : blob.pixels)
                building_pixels.bits[p] = 1;
        } else {
            box.category = Category::OtherMovingOrFalse;
            ++out.other_moving_count;
        }
        cat.push_back(box);
    }

    // Moving-vehicle mask: blob pixels that were genuinely moving in the
    // raw input (morphology may have padded the blobs).
    out.moving_vehicle_mask = moving_pixels & motion;

    // Building mask: re-close the parallax blobs, then keep only pixels
    // that are raw motion, not appearance, and not claimed by a vehicle.
    BinaryMask building_clean = morphology_close_open(building_pixels, config.morphology_radius);
    building_clean = building_clean & motion & ~appearance & ~moving_pixels;
    for (const Component& bc : connected_components(building_clean, config.min_blob_area)) {
        BBox box = bc.bbox;
        box.frame_index = frame_index;
        box.category = Category::Building;
        out.building_boxes.push_back(box);
        for (int p : bc.pixels)
            out.building_mask.bits[p] = 1;
    }
    return out;
}

void apply_building_filter(FusionOutput& out, const std::vector<BBox>& building_boxes) {
    if (building_boxes.empty())
        return;
    for (auto& [frame, boxes] : out.categorized.by_frame)
        for (BBox& b : boxes) {
            if (b.category != Category::MovingVehicle)
                continue;
            for (const BBox& roof : building_boxes)
                if (roof.contains(b.cx(), b.cy())) {
                    b.category = Category::StationaryVehicleOrFalse;
                    break;
                }
        }
    for (const BBox& roof : building_boxes)
        clear_box_pixels(out.moving_vehicle_mask, roof);
}

FusionPipeline::FusionPipeline(const SequenceConfig& config, bool roof_filter)
    : config_(config), roof_filter_(roof_filter) {
    config_.validate();
}

FusionOutput FusionPipeline::process(int frame_index, const BinaryMask& motion,
                                     const BinaryMask& appearance) {
    if (frame_index < last_frame_)
        throw InvalidSpec("FusionPipeline: frames must arrive in order");
    last_frame_ = frame_index;

    FusionOutput out = fuse(motion, appearance, frame_index, config_);
    extend_building_tracks(tracks_, frame_index, out.building_boxes,
                           config_.building_iou_link);
    if (roof_filter_) {
        std::vector<BBox> member_boxes;
        for (const BuildingTrack& t : tracks_)
            member_boxes.insert(member_boxes.end(), t.boxes.begin(), t.boxes.end());
        apply_building_filter(out, member_boxes);
    }
    return out;
}

} // namespace skyflux::fusion
