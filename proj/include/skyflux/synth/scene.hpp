#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "skyflux/appearance/detections.hpp"
#include "skyflux/core/bbox.hpp"
#include "skyflux/core/frame.hpp"
#include "skyflux/georeg/pose.hpp"

namespace skyflux::synth {

using Color = std::array<double, 3>;

/// Axis-aligned rectangle on a horizontal plane, in world meters.
/// height_m lifts the rectangle above the ground plane (vehicles parked
/// on roofs); moving vehicles translate at velocity meters per second.
struct RectObject {
    double x = 0, y = 0, w = 4.5, h = 2.2; // meters
    double vx = 0, vy = 0;                 // m/s, moving vehicles only
    double height_m = 0;
    Color color{0.8, 0.1, 0.1};
};

struct BuildingSpec {
    double x = 0, y = 0, w = 20, h = 15; // footprint, meters
    double height_m = 30;
    Color roof_color{0.55, 0.5, 0.48};
};

/// Camera circles the scene center at fixed altitude, aimed at the
/// center. Angles advance angular_rate_rad per frame.
struct OrbitSpec {
    double radius_m = 2600;
    double altitude_m = 1500;
    double angular_rate_rad = 0.005;
    double start_angle_rad = 0;
    double center_x = 32, center_y = 32; // world meters
};

struct ImageSpec {
    int width = 256, height = 256;
    double f = 12000; // px
    double u = 127.5, v = 127.5;
};

/// Seeded sum of sinusoidal gratings over world meters; static ground
/// texture with enough gradient structure for the motion tensors.
struct TextureSpec {
    double base = 0.45;
    double amplitude = 0.18;
    int waves = 8;
    double min_wavelength_m = 2.0;
    double max_wavelength_m = 18.0;
};

struct SceneSpec {
    uint32_t seed = 1;
    int frame_count = 12;
    double frame_rate_hz = 4.0;
    ImageSpec image;
    OrbitSpec orbit;
    georeg::PlaneConfig plane; // stabilized raster; also the GT box frame
    TextureSpec texture;
    std::vector<RectObject> vehicles; // moving
    std::vector<RectObject> parked;   // static; height_m > 0 puts them on a roof
    std::vector<BuildingSpec> buildings;

    void validate() const; // throws InvalidSpec
};

SceneSpec default_scene_spec();

struct RenderResult {
    std::vector<Frame> frames;
    std::vector<georeg::CameraPose> poses;
    // Per-frame apparent boxes in stabilized-plane pixels. gt_moving has
    // class "GT" (moving vehicles only); gt_vehicles has class "car" and
    // adds the parked vehicles, mirroring an appearance detector's targets.
    std::vector<appearance::DetectionRecord> gt_moving;
    std::vector<appearance::DetectionRecord> gt_vehicles;
    std::vector<BBox> building_footprints; // plane pixels, Category::Building
};

/// Pinhole-renders every orbit frame by per-pixel raycast: nearest
/// horizontal rectangle wins, ground texture behind. Poses, ground-truth
/// boxes, and roofs all come from the same projection math the
/// stabilization stage uses.
RenderResult render_sequence(const SceneSpec& spec);

/// Pose of one orbit frame (exposed for geometric oracles).
georeg::CameraPose orbit_pose(const SceneSpec& spec, int frame_index);

/// Apparent plane-pixel bounding box of a world rectangle at height_m
/// seen through the given pose (axis-aligned hull of the four corners).
BBox apparent_box(const SceneSpec& spec, const georeg::CameraPose& pose,
                  double x, double y, double w, double h, double height_m);

/// Controllable stand-in for an appearance detector: seeded per-box
/// dropout, uniform corner jitter (pixels), and per-true-box injected
/// false positives placed uniformly in the plane raster. Rates in [0, 1].
struct OracleConfig {
    double dropout = 0.0;
    double jitter_px = 0.0;
    double false_positive_rate = 0.0;
    uint32_t seed = 7;
};

std::vector<appearance::DetectionRecord>
oracle_appearance(const std::vector<appearance::DetectionRecord>& gt,
                  const OracleConfig& cfg, int plane_width, int plane_height);

/// SceneSpec as a JSON document. Unknown keys are rejected; absent keys
/// keep their defaults.
SceneSpec scene_spec_from_json(const std::string& text);
std::string scene_spec_to_json(const SceneSpec& spec);
SceneSpec load_scene_spec(const std::string& path);
void save_scene_spec(const SceneSpec& spec, const std::string& path);

} // namespace skyflux::synth
