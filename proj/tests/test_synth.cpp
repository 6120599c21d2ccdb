#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>

#include "skyflux/core/error.hpp"
#include "skyflux/flux/processor.hpp"
#include "skyflux/georeg/homography.hpp"
#include "skyflux/georeg/warp.hpp"
#include "skyflux/synth/scene.hpp"

using namespace skyflux;
using namespace skyflux::synth;
namespace fs = std::filesystem;

namespace {

// Small desk-scale scene: 32 m ground patch at 0.25 m/px.
SceneSpec small_scene() {
    SceneSpec s = default_scene_spec();
    s.frame_count = 9;
    s.image.width = 128;
    s.image.height = 128;
    s.image.f = 6000.0;
    s.image.u = 63.5;
    s.image.v = 63.5;
    s.plane.output_width = 128;
    s.plane.output_height = 128;
    s.plane.plane_scale = 0.25;
    s.plane.plane_origin = {0.0, 0.0};
    s.orbit.center_x = 16.0;
    s.orbit.center_y = 16.0;
    // Steep view: a 1:3 slant keeps displaced roofs inside the raster.
    s.orbit.radius_m = 500.0;
    s.orbit.altitude_m = 1500.0;
    s.orbit.angular_rate_rad = 0.004;
    return s;
}

struct ColorCentroid {
    double x = 0, y = 0;
    int n = 0;
};

// Mean position of pixels close to a flat-shaded object color.
ColorCentroid color_centroid(const Frame& f, const Color& c, double tol = 0.1) {
    ColorCentroid r;
    for (int y = 0; y < f.height; ++y)
        for (int x = 0; x < f.width; ++x) {
            if (std::abs(f.at(x, y, 0) - c[0]) < tol &&
                std::abs(f.at(x, y, 1) - c[1]) < tol &&
                std::abs(f.at(x, y, 2) - c[2]) < tol) {
                r.x += x;
                r.y += y;
                ++r.n;
            }
        }
    if (r.n > 0) {
        r.x /= r.n;
        r.y /= r.n;
    }
    return r;
}

} // namespace

TEST_CASE("static camera over an empty scene renders identical frames") {
    SceneSpec s = small_scene();
    s.frame_count = 4;
    s.orbit.angular_rate_rad = 0.0;
    RenderResult r = render_sequence(s);
    REQUIRE(r.frames.size() == 4);
    for (int i = 1; i < 4; ++i) {
        CHECK(r.frames[i].data == r.frames[0].data);
        CHECK(r.poses[i].R.isApprox(r.poses[0].R));
    }
    CHECK(r.gt_moving.empty());
    CHECK(r.building_footprints.empty());
}

TEST_CASE("rendering is deterministic for a fixed spec") {
    SceneSpec s = small_scene();
    s.frame_count = 3;
    s.vehicles.push_back({8.0, 16.0, 4.5, 2.2, 1.0, 0.0, 0.0, {0.85, 0.1, 0.1}});
    s.buildings.push_back({20.0, 6.0, 8.0, 6.0, 30.0, {0.2, 0.3, 0.7}});
    RenderResult a = render_sequence(s);
    RenderResult b = render_sequence(s);
    for (int i = 0; i < 3; ++i)
        CHECK(a.frames[i].data == b.frames[i].data);
    REQUIRE(a.gt_moving.size() == b.gt_moving.size());
    for (size_t i = 0; i < a.gt_moving.size(); ++i)
        CHECK(a.gt_moving[i] == b.gt_moving[i]);
}

TEST_CASE("nadir apparent box of an on-plane rectangle is its footprint") {
    SceneSpec s = small_scene();
    s.orbit.radius_m = 0.0; // camera straight above the scene center
    georeg::CameraPose pose = orbit_pose(s, 0);
    BBox b = apparent_box(s, pose, 10.0, 20.0, 4.0, 2.0, 0.0);
    CHECK(b.x == doctest::Approx(40.0).epsilon(1e-9));
    CHECK(b.y == doctest::Approx(80.0).epsilon(1e-9));
    CHECK(b.w == doctest::Approx(16.0).epsilon(1e-9));
    CHECK(b.h == doctest::Approx(8.0).epsilon(1e-9));
}

TEST_CASE("ground-truth boxes follow the moving vehicle") {
    SceneSpec s = small_scene();
    s.frame_count = 8;
    // 1 m/s east at 4 Hz = 0.25 m/frame = 1 plane px/frame.
    s.vehicles.push_back({8.0, 16.0, 4.5, 2.2, 1.0, 0.0, 0.0, {0.85, 0.1, 0.1}});
    RenderResult r = render_sequence(s);
    REQUIRE(r.gt_moving.size() == 8);
    for (int i = 0; i < 8; ++i) {
        CHECK(r.gt_moving[i].frame_index == i);
        CHECK(r.gt_moving[i].class_label == "GT");
        CHECK(r.gt_moving[i].x == doctest::Approx(32.0 + i).epsilon(1e-6));
        CHECK(r.gt_moving[i].y == doctest::Approx(64.0).epsilon(1e-6));
    }
    // gt_vehicles mirrors the same boxes with the detector-facing class.
    REQUIRE(r.gt_vehicles.size() == 8);
    CHECK(r.gt_vehicles[0].class_label == "car");
    CHECK(r.gt_vehicles[0].x == doctest::Approx(r.gt_moving[0].x));
}

TEST_CASE("stabilized on-plane vehicle stays put while the camera orbits") {
    SceneSpec s = small_scene();
    s.frame_count = 6;
    s.parked.push_back({14.0, 18.0, 4.5, 2.2, 0.0, 0.0, 0.0, {0.1, 0.2, 0.85}});
    RenderResult r = render_sequence(s);

    Color c{0.1, 0.2, 0.85};
    double base_x = 0, base_y = 0;
    for (int i = 0; i < 6; ++i) {
        georeg::WarpResult w = georeg::warp_to_plane(r.frames[i], r.poses[i], s.plane);
        ColorCentroid cc = color_centroid(w.frame, c);
        REQUIRE(cc.n > 50);
        if (i == 0) {
            base_x = cc.x;
            base_y = cc.y;
        } else {
            CHECK(std::abs(cc.x - base_x) < 0.5);
            CHECK(std::abs(cc.y - base_y) < 0.5);
        }
    }
}

TEST_CASE("warped roof drift matches the parallax prediction within half a pixel") {
    SceneSpec s = small_scene();
    s.frame_count = 6;
    s.orbit.angular_rate_rad = 0.05; // 25 m baseline: ~1.4 px roof drift per frame
    BuildingSpec b{10.0, 12.0, 10.0, 8.0, 20.0, {0.75, 0.15, 0.15}};
    s.buildings.push_back(b);
    RenderResult r = render_sequence(s);

    Color roof{0.75, 0.15, 0.15};
    std::vector<Eigen::Vector2d> centroids;
    for (int i = 0; i < 6; ++i) {
        georeg::WarpResult w = georeg::warp_to_plane(r.frames[i], r.poses[i], s.plane);
        ColorCentroid cc = color_centroid(w.frame, roof);
        REQUIRE(cc.n > 100);
        centroids.push_back({cc.x, cc.y});
    }
    Eigen::Vector3d roof_center(b.x + b.w / 2.0, b.y + b.h / 2.0, -b.height_m);
    for (int i = 1; i < 6; ++i) {
        Eigen::Vector2d got = centroids[i] - centroids[i - 1];
        Eigen::Vector2d want = georeg::parallax_displacement(
            roof_center, r.poses[i - 1], r.poses[i], s.plane);
        CHECK((got - want).norm() < 0.5);
        CHECK(want.norm() > 1.0); // the motion being matched is not degenerate
    }
}

TEST_CASE("roof drift grows strictly with building height") {
    double prev = 0.0;
    for (double height : {15.0, 35.0, 55.0}) {
        SceneSpec s = small_scene();
        s.frame_count = 4;
        s.orbit.angular_rate_rad = 0.05;
        // East-side footprint: taller roofs shift west, staying in frame.
        s.buildings.push_back({22.0, 12.0, 10.0, 8.0, height, {0.75, 0.15, 0.15}});
        RenderResult r = render_sequence(s);
        Color roof{0.75, 0.15, 0.15};
        double total = 0.0;
        Eigen::Vector2d last{0, 0};
        for (int i = 0; i < 4; ++i) {
            georeg::WarpResult w =
                georeg::warp_to_plane(r.frames[i], r.poses[i], s.plane);
            ColorCentroid cc = color_centroid(w.frame, roof);
            REQUIRE(cc.n > 100);
            Eigen::Vector2d c{cc.x, cc.y};
            if (i > 0)
                total += (c - last).norm();
            last = c;
        }
        CHECK(total > prev);
        prev = total;
    }
}

TEST_CASE("background flux trace is null after stabilization") {
    SceneSpec s = small_scene();
    s.frame_count = 9;
    s.vehicles.push_back({8.0, 16.0, 4.5, 2.2, 1.0, 0.0, 0.0, {0.85, 0.1, 0.1}});
    RenderResult r = render_sequence(s);

    SequenceConfig cfg;
    flux::FluxProcessor proc(cfg);
    std::vector<flux::FluxFrameResult> results;
    for (int i = 0; i < s.frame_count; ++i) {
        georeg::WarpResult w = georeg::warp_to_plane(r.frames[i], r.poses[i], s.plane);
        auto res = proc.push(w.frame, &w.validity);
        if (res)
            results.push_back(std::move(*res));
    }
    REQUIRE(results.size() == 5);

    for (const flux::FluxFrameResult& res : results) {
        // The vehicle's GT box for this frame, grown by the filter support.
        const appearance::DetectionRecord& gt = r.gt_moving[res.frame_index];
        double margin = 8.0;
        double peak = 0.0, background = 0.0;
        for (int y = 0; y < res.height; ++y)
            for (int x = 0; x < res.width; ++x) {
                if (!res.validity.at(x, y))
                    continue;
                double v = res.flux_trace[y * res.width + x];
                bool near_vehicle = x >= gt.x - margin && x <= gt.x + gt.w + margin &&
                                    y >= gt.y - margin && y <= gt.y + gt.h + margin;
                if (near_vehicle)
                    peak = std::max(peak, v);
                else
                    background = std::max(background, v);
            }
        CHECK(peak > 0.0);
        CHECK(background < 0.01 * peak);
    }
}

TEST_CASE("scene validation rejects inconsistent specs") {
    SceneSpec s = small_scene();
    s.frame_count = 0;
    CHECK_THROWS_AS(s.validate(), InvalidSpec);

    s = small_scene();
    s.buildings.push_back({0, 0, 5, 5, 2000.0, {0.5, 0.5, 0.5}}); // above the camera
    CHECK_THROWS_AS(s.validate(), InvalidSpec);

    s = small_scene();
    s.vehicles.push_back({0, 0, 0.0, 2.0, 1.0, 0.0, 0.0, {0.5, 0.5, 0.5}});
    CHECK_THROWS_AS(s.validate(), InvalidSpec);

    s = small_scene();
    s.texture.min_wavelength_m = 5.0;
    s.texture.max_wavelength_m = 2.0;
    CHECK_THROWS_AS(s.validate(), InvalidSpec);
}

TEST_CASE("appearance oracle is the identity at zero rates") {
    SceneSpec s = small_scene();
    s.frame_count = 5;
    s.vehicles.push_back({8.0, 16.0, 4.5, 2.2, 1.0, 0.0, 0.0, {0.85, 0.1, 0.1}});
    s.parked.push_back({20.0, 24.0, 4.5, 2.2, 0.0, 0.0, 0.0, {0.1, 0.2, 0.85}});
    RenderResult r = render_sequence(s);

    OracleConfig cfg;
    std::vector<appearance::DetectionRecord> out =
        oracle_appearance(r.gt_vehicles, cfg, 128, 128);
    REQUIRE(out.size() == r.gt_vehicles.size());
    for (size_t i = 0; i < out.size(); ++i) {
        CHECK(out[i].class_label == "car");
        CHECK(out[i].frame_index == r.gt_vehicles[i].frame_index);
        CHECK(out[i].x == r.gt_vehicles[i].x);
        CHECK(out[i].y == r.gt_vehicles[i].y);
        CHECK(out[i].w == r.gt_vehicles[i].w);
        CHECK(out[i].h == r.gt_vehicles[i].h);
    }

    OracleConfig drop_all;
    drop_all.dropout = 1.0;
    CHECK(oracle_appearance(r.gt_vehicles, drop_all, 128, 128).empty());
}

TEST_CASE("dropout retention lands in the binomial confidence band") {
    std::vector<appearance::DetectionRecord> gt;
    for (int i = 0; i < 1000; ++i)
        gt.push_back({i, 10.0, 10.0, 18.0, 9.0, "GT", 1.0});
    OracleConfig cfg;
    cfg.dropout = 0.2;
    cfg.seed = 123;
    std::vector<appearance::DetectionRecord> out = oracle_appearance(gt, cfg, 128, 128);
    // Binomial(1000, 0.8): mean 800, sd 12.65; 99% band is +-2.576 sd.
    CHECK(out.size() >= 767);
    CHECK(out.size() <= 833);
}

TEST_CASE("oracle jitter and false positives stay bounded and seeded") {
    std::vector<appearance::DetectionRecord> gt;
    for (int i = 0; i < 400; ++i)
        gt.push_back({i / 4, 30.0 + (i % 4) * 10, 40.0, 18.0, 9.0, "GT", 1.0});
    OracleConfig cfg;
    cfg.jitter_px = 2.0;
    cfg.false_positive_rate = 0.5;
    cfg.seed = 9;
    std::vector<appearance::DetectionRecord> out = oracle_appearance(gt, cfg, 128, 128);
    CHECK(out.size() > 400); // injected boxes on top of the kept ones

    size_t injected = 0;
    for (const appearance::DetectionRecord& d : out) {
        bool is_jittered_gt = false;
        for (const appearance::DetectionRecord& g : gt)
            if (g.frame_index == d.frame_index && std::abs(d.x - g.x) <= 2.0 &&
                std::abs(d.y - g.y) <= 2.0 && std::abs(d.w - g.w) <= 2.0 &&
                std::abs(d.h - g.h) <= 2.0) {
                is_jittered_gt = true;
                break;
            }
        if (!is_jittered_gt) {
            ++injected;
            CHECK(d.x >= 0.0);
            CHECK(d.y >= 0.0);
            CHECK(d.x + d.w <= 130.0);
            CHECK(d.y + d.h <= 130.0);
        }
    }
    // Binomial(400, 0.5): mean 200, sd 10; allow +-4 sd.
    CHECK(injected >= 160);
    CHECK(injected <= 240);

    std::vector<appearance::DetectionRecord> again = oracle_appearance(gt, cfg, 128, 128);
    REQUIRE(again.size() == out.size());
    for (size_t i = 0; i < out.size(); ++i)
        CHECK(again[i] == out[i]);

    OracleConfig bad = cfg;
    bad.dropout = 1.5;
    CHECK_THROWS_AS(oracle_appearance(gt, bad, 128, 128), InvalidSpec);
}

TEST_CASE("scene specs round-trip through JSON") {
    SceneSpec s = small_scene();
    s.seed = 42;
    s.frame_count = 7;
    s.vehicles.push_back({8.0, 16.0, 4.5, 2.2, 1.0, -0.5, 0.0, {0.85, 0.1, 0.1}});
    s.parked.push_back({20.0, 24.0, 4.0, 2.0, 0.0, 0.0, 12.0, {0.1, 0.2, 0.85}});
    s.buildings.push_back({10.0, 12.0, 10.0, 8.0, 50.0, {0.75, 0.15, 0.15}});

    SceneSpec back = scene_spec_from_json(scene_spec_to_json(s));
    CHECK(back.seed == 42);
    CHECK(back.frame_count == 7);
    CHECK(back.image.f == s.image.f);
    CHECK(back.orbit.radius_m == s.orbit.radius_m);
    CHECK(back.plane.plane_scale == s.plane.plane_scale);
    REQUIRE(back.vehicles.size() == 1);
    CHECK(back.vehicles[0].vy == -0.5);
    REQUIRE(back.parked.size() == 1);
    CHECK(back.parked[0].height_m == 12.0);
    REQUIRE(back.buildings.size() == 1);
    CHECK(back.buildings[0].height_m == 50.0);
    CHECK(back.buildings[0].roof_color[0] == 0.75);

    // Renders from the round-tripped spec match the original bit for bit.
    s.frame_count = back.frame_count = 2;
    RenderResult ra = render_sequence(s);
    RenderResult rb = render_sequence(back);
    CHECK(ra.frames[1].data == rb.frames[1].data);

    fs::path dir = fs::temp_directory_path() / "skyflux_test_synth";
    fs::create_directories(dir);
    fs::path p = dir / "scene.json";
    save_scene_spec(s, p.string());
    SceneSpec loaded = load_scene_spec(p.string());
    CHECK(loaded.frame_count == 2);
    CHECK(loaded.buildings.size() == 1);
}

TEST_CASE("scene JSON rejects unknown keys and malformed documents") {
    CHECK_THROWS_AS(scene_spec_from_json("{\"frme_count\": 3}"), InvalidSpec);
    CHECK_THROWS_AS(scene_spec_from_json("{\"orbit\": {\"radius\": 5}}"), InvalidSpec);
    CHECK_THROWS_AS(scene_spec_from_json("not json"), ParseError);
    CHECK_THROWS_AS(scene_spec_from_json("{\"frame_count\": 0}"), InvalidSpec);
    CHECK_THROWS_AS(scene_spec_from_json("{\"orbit\": {\"center\": [1]}}"), InvalidSpec);
}
