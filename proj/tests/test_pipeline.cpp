#include <atomic>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"

#include "skyflux/cli/pipeline.hpp"
#include "skyflux/core/error.hpp"
#include "skyflux/core/image_io.hpp"
#include "skyflux/semcodec/container.hpp"
#include "skyflux/synth/scene.hpp"

using namespace skyflux;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
    fs::path dir = fs::temp_directory_path() / "skyflux_pipeline_tests" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Small oblique orbit: 96 px plane at 0.25 m/px, one vehicle slow enough
// for a solid, appearance-backed motion blob. The camera image is wider
// than the plane window so the whole window stays valid.
synth::SceneSpec smoke_scene() {
    synth::SceneSpec spec;
    spec.seed = 11;
    spec.frame_count = 9;
    spec.frame_rate_hz = 4.0;
    spec.image.width = 160;
    spec.image.height = 160;
    spec.image.f = 6000.0;
    spec.image.u = 79.5;
    spec.image.v = 79.5;
    spec.orbit.radius_m = 300.0;
    spec.orbit.altitude_m = 1500.0;
    spec.orbit.angular_rate_rad = 0.004;
    spec.orbit.start_angle_rad = 0.6;
    spec.orbit.center_x = 12.0;
    spec.orbit.center_y = 12.0;
    spec.plane.output_width = 96;
    spec.plane.output_height = 96;
    spec.plane.plane_scale = 0.25;
    spec.plane.plane_origin = Eigen::Vector2d(0.0, 0.0);
    spec.texture.waves = 6;
    spec.vehicles.push_back({4.0, 12.0, 6.0, 3.0, 2.0, 0.0, 0.0, {0.85, 0.1, 0.1}});
    return spec;
}

cli::PipelineConfig smoke_config(const fs::path& in, const fs::path& out) {
    cli::PipelineConfig cfg;
    cfg.input_dir = in.string();
    cfg.output_dir = out.string();
    cfg.seq.trace_threshold_mode = FixedThreshold{0.01};
    return cfg;
}

} // namespace

TEST_CASE("full pipeline: manifest, artifacts, determinism, decode and report stages") {
    fs::path in = fresh_dir("run_in");
    fs::path out_a = fresh_dir("run_out_a");
    fs::path out_b = fresh_dir("run_out_b");

    cli::stage_synth(smoke_scene(), synth::OracleConfig{}, in.string());
    CHECK(fs::exists(in / "frames" / "frame_000000.png"));
    CHECK(fs::exists(in / "poses.csv"));
    CHECK(fs::exists(in / "detections.csv"));
    CHECK(fs::exists(in / "gt_moving.csv"));
    CHECK(fs::exists(in / "scene.json"));

    std::vector<std::string> log;
    auto capture = [&](const std::string& line) { log.push_back(line); };
    REQUIRE(cli::run_pipeline(smoke_config(in, out_a), capture) == 0);
    CHECK(log.empty()); // nothing logged unless verbose or failing

    // every stage left its artifacts
    CHECK(fs::exists(out_a / "stabilized" / "frame_000000.png"));
    CHECK(fs::exists(out_a / "stabilized" / "validity_000008.png"));
    CHECK(fs::exists(out_a / "flux" / "mask_000002.png"));
    CHECK(fs::exists(out_a / "flux" / "trace_000006.png"));
    CHECK(fs::exists(out_a / "appearance" / "accepted.csv"));
    CHECK(fs::exists(out_a / "fusion" / "moving_000004.png"));
    CHECK(fs::exists(out_a / "fusion" / "overlay_000004.png"));
    CHECK(fs::exists(out_a / "fusion" / "detections.csv"));
    CHECK(fs::exists(out_a / "fusion" / "tracks.csv"));
    CHECK(fs::exists(out_a / "codec" / "clip.svc"));
    CHECK(fs::exists(out_a / "eval" / "metrics.txt"));

    // the pipeline saw the vehicle: moving-mask pixels and detection rows
    size_t moving_px = 0;
    for (int i = 2; i <= 6; ++i) {
        char name[32];
        std::snprintf(name, sizeof(name), "moving_%06d.png", i);
        moving_px += load_mask((out_a / "fusion" / name).string()).count();
    }
    CHECK(moving_px > 0);
    CHECK(read_file(out_a / "fusion" / "detections.csv").find("MovingVehicle") !=
          std::string::npos);

    std::string metrics = read_file(out_a / "eval" / "metrics.txt");
    CHECK(metrics.find("frames evaluated: 2..6") != std::string::npos);
    CHECK(metrics.find("matching criterion: IoU >= 0.30") != std::string::npos);
    auto mj = nlohmann::json::parse(read_file(out_a / "eval" / "metrics.json"));
    CHECK(mj.at("gt").get<int>() == 5); // one ground-truth box per evaluated frame

    SUBCASE("manifest lists all six stage outputs with sizes matching disk") {
        auto manifest = nlohmann::json::parse(read_file(out_a / "manifest.json"));
        const auto& artifacts = manifest.at("artifacts");
        REQUIRE(artifacts.is_object());
        std::set<std::string> stages_seen;
        for (const auto& item : artifacts.items()) {
            CHECK(fs::file_size(out_a / item.key()) == item.value().get<uint64_t>());
            stages_seen.insert(item.key().substr(0, item.key().find('/')));
        }
        for (const char* stage :
             {"stabilized", "flux", "appearance", "fusion", "codec", "eval"})
            CHECK(stages_seen.count(stage) == 1);
        CHECK(artifacts.count("manifest.json") == 0);
    }

    SUBCASE("rerun into a fresh directory and in place: byte-identical artifacts") {
        std::string manifest_a = read_file(out_a / "manifest.json");
        REQUIRE(cli::run_pipeline(smoke_config(in, out_b)) == 0);
        CHECK(read_file(out_b / "manifest.json") == manifest_a);
        CHECK(read_file(out_b / "codec" / "clip.svc") ==
              read_file(out_a / "codec" / "clip.svc"));
        CHECK(read_file(out_b / "fusion" / "detections.csv") ==
              read_file(out_a / "fusion" / "detections.csv"));
        CHECK(read_file(out_b / "eval" / "metrics.txt") ==
              read_file(out_a / "eval" / "metrics.txt"));
        CHECK(read_file(out_b / "stabilized" / "frame_000004.png") ==
              read_file(out_a / "stabilized" / "frame_000004.png"));

        REQUIRE(cli::run_pipeline(smoke_config(in, out_a)) == 0);
        CHECK(read_file(out_a / "manifest.json") == manifest_a);
    }

    SUBCASE("decode and report stages run standalone on the pipeline output") {
        cli::PipelineConfig cfg = smoke_config(in, out_a);
        REQUIRE(cli::run_stages(cfg, {"decode", "report"}, false, capture) == 0);
        auto container = semcodec::load_container((out_a / "codec" / "clip.svc").string());
        size_t decoded = 0;
        for (const auto& e : fs::directory_iterator(out_a / "codec" / "decoded"))
            decoded += e.is_regular_file();
        CHECK(decoded == 1 + container.abstract_frames.size());
        CHECK(fs::exists(out_a / "codec" / "decoded" / "frame_000002.png"));
        std::string report = read_file(out_a / "codec" / "report.txt");
        CHECK(report.find("Semantic container") != std::string::npos);
        CHECK(report.find("Raw RGB") != std::string::npos);
    }

    SUBCASE("eval honors the centroid criterion override") {
        cli::PipelineConfig cfg = smoke_config(in, out_a);
        cli::CliOverrides o;
        o.criterion = "centroid";
        cli::apply_overrides(cfg, o);
        REQUIRE(cli::run_stages(cfg, {"eval"}, false, capture) == 0);
        CHECK(read_file(out_a / "eval" / "metrics.txt")
                  .find("centroid inside ground-truth box") != std::string::npos);
    }
}

TEST_CASE("missing pose file fails the stabilize stage with a marker") {
    fs::path in = fresh_dir("fail_in");
    fs::path out = fresh_dir("fail_out");
    cli::stage_synth(smoke_scene(), synth::OracleConfig{}, in.string());
    fs::remove(in / "poses.csv");

    std::vector<std::string> log;
    int rc = cli::run_pipeline(smoke_config(in, out),
                               [&](const std::string& line) { log.push_back(line); });
    CHECK(rc != 0);
    REQUIRE(log.size() == 1);
    CHECK(log[0].rfind("stage stabilize: ", 0) == 0);
    CHECK(log[0].find("poses.csv") != std::string::npos);
    CHECK(fs::exists(out / "stabilize.partial"));
    CHECK(read_file(out / "stabilize.partial").find("poses.csv") != std::string::npos);
    CHECK_FALSE(fs::exists(out / "manifest.json"));

    // restoring the input clears the marker on the next run
    cli::stage_synth(smoke_scene(), synth::OracleConfig{}, in.string());
    REQUIRE(cli::run_pipeline(smoke_config(in, out)) == 0);
    CHECK_FALSE(fs::exists(out / "stabilize.partial"));
    CHECK(fs::exists(out / "manifest.json"));
}

TEST_CASE("a failing downstream stage keeps earlier artifacts and names itself") {
    fs::path in = fresh_dir("fail2_in");
    fs::path out = fresh_dir("fail2_out");
    cli::stage_synth(smoke_scene(), synth::OracleConfig{}, in.string());
    fs::remove(in / "detections.csv"); // ingest reads this

    std::vector<std::string> log;
    int rc = cli::run_pipeline(smoke_config(in, out),
                               [&](const std::string& line) { log.push_back(line); });
    CHECK(rc != 0);
    REQUIRE(log.size() == 1);
    CHECK(log[0].rfind("stage ingest: ", 0) == 0);
    CHECK(fs::exists(out / "ingest.partial"));
    CHECK(fs::exists(out / "stabilized" / "frame_000000.png")); // earlier stages kept
    CHECK(fs::exists(out / "flux" / "mask_000002.png"));
    CHECK_FALSE(fs::exists(out / "manifest.json"));
}

TEST_CASE("pipeline config: defaults, file parsing, and override precedence") {
    cli::PipelineConfig cfg = cli::default_pipeline_config();
    CHECK(cfg.seq.temporal_window == 5);
    CHECK(cfg.jpeg_quality == 75);
    CHECK(cfg.roof_filter);
    CHECK(std::holds_alternative<PercentileThreshold>(cfg.seq.trace_threshold_mode));

    SUBCASE("empty document keeps every default") {
        cli::PipelineConfig parsed = cli::pipeline_config_from_json("{}");
        CHECK(parsed.seq.temporal_window == cfg.seq.temporal_window);
        CHECK(parsed.jpeg_quality == cfg.jpeg_quality);
        CHECK(parsed.min_confidence == cfg.min_confidence);
        CHECK(parsed.classes == cfg.classes);
    }

    SUBCASE("round trip preserves the tunable fields") {
        cfg.seq.temporal_window = 7;
        cfg.seq.trace_threshold_mode = FixedThreshold{0.002};
        cfg.plane.output_width = 128;
        cfg.plane.output_height = 96;
        cfg.plane.plane_scale = 0.5;
        cfg.plane.plane_origin = Eigen::Vector2d(3.0, -2.0);
        cfg.jpeg_quality = 92;
        cfg.match.criterion = eval::MatchCriterion::CentroidInBox;
        cfg.roof_filter = false;
        cli::PipelineConfig back = cli::pipeline_config_from_json(
            cli::pipeline_config_to_json(cfg));
        CHECK(back.seq.temporal_window == 7);
        CHECK(std::get<FixedThreshold>(back.seq.trace_threshold_mode).value == 0.002);
        CHECK(back.plane.output_width == 128);
        CHECK(back.plane.plane_origin == Eigen::Vector2d(3.0, -2.0));
        CHECK(back.jpeg_quality == 92);
        CHECK(back.match.criterion == eval::MatchCriterion::CentroidInBox);
        CHECK_FALSE(back.roof_filter);
    }

    SUBCASE("command line beats the config file") {
        cli::PipelineConfig file_cfg =
            cli::pipeline_config_from_json("{\"jpeg_quality\": 50, \"roof_filter\": true}");
        CHECK(file_cfg.jpeg_quality == 50);
        cli::CliOverrides o;
        o.jpeg_quality = 90;
        o.roof_filter = false;
        o.percentile = 97.5;
        cli::apply_overrides(file_cfg, o);
        CHECK(file_cfg.jpeg_quality == 90);
        CHECK_FALSE(file_cfg.roof_filter);
        CHECK(std::get<PercentileThreshold>(file_cfg.seq.trace_threshold_mode).p == 97.5);
    }

    SUBCASE("rejects unknown keys, bad values, and conflicting overrides") {
        CHECK_THROWS_AS(cli::pipeline_config_from_json("{\"bogus\": 1}"), ParseError);
        CHECK_THROWS_AS(cli::pipeline_config_from_json("{\"match\": {\"mode\": \"x\"}}"),
                        ParseError);
        CHECK_THROWS_AS(
            cli::pipeline_config_from_json("{\"match\": {\"criterion\": \"best\"}}"),
            ParseError);
        CHECK_THROWS_AS(cli::pipeline_config_from_json("{\"jpeg_quality\": \"high\"}"),
                        ParseError);
        CHECK_THROWS_AS(cli::pipeline_config_from_json("not json"), ParseError);

        cli::PipelineConfig c = cli::default_pipeline_config();
        cli::CliOverrides o;
        o.percentile = 99.0;
        o.fixed_threshold = 0.01;
        CHECK_THROWS_AS(cli::apply_overrides(c, o), InvalidSpec);

        c = cli::default_pipeline_config();
        c.output_dir = "x";
        c.jpeg_quality = 0;
        CHECK_THROWS_AS(c.validate(), InvalidSpec);
        c.jpeg_quality = 75;
        c.jobs = 0;
        CHECK_THROWS_AS(c.validate(), InvalidSpec);
    }
}

TEST_CASE("parallel_for covers the range exactly once and propagates errors") {
    std::vector<int> hits(200, 0);
    std::mutex m;
    cli::parallel_for(3, 203, 4, [&](int i) {
        std::lock_guard<std::mutex> lock(m);
        hits[i - 3] += 1;
    });
    for (int h : hits) CHECK(h == 1);

    std::atomic<int> ran{0};
    CHECK_THROWS_AS(cli::parallel_for(0, 100, 4,
                                      [&](int i) {
                                          ran.fetch_add(1);
                                          if (i == 37) throw Error("boom");
                                      }),
                    Error);
    CHECK(ran.load() >= 1);

    cli::parallel_for(5, 5, 4, [&](int) { FAIL("empty range must not invoke"); });

    // serial path preserves order
    std::vector<int> order;
    cli::parallel_for(0, 5, 1, [&](int i) { order.push_back(i); });
    CHECK(order == std::vector<int>{0, 1, 2, 3, 4});
}

TEST_CASE("ingest honors the confidence floor and class filter") {
    fs::path in = fresh_dir("ingest_in");
    fs::path out = fresh_dir("ingest_out");
    {
        std::ofstream f(in / "detections.csv");
        f << "frame_index,class,confidence,x,y,w,h\n";
        f << "0,car,0.9,10,10,8,6\n";
        f << "0,car,0.2,30,10,8,6\n";   // below the floor
        f << "0,llama,0.9,50,10,8,6\n"; // unknown class
        f << "1,van,0.6,12,10,8,6\n";
    }
    cli::PipelineConfig cfg;
    cfg.input_dir = in.string();
    cfg.output_dir = out.string();
    REQUIRE(cli::run_stages(cfg, {"ingest"}, false, [](const std::string&) {}) == 0);

    auto set = appearance::load_detections((out / "appearance" / "accepted.csv").string(),
                                           {"Vehicle"}, 0.0);
    CHECK(set.accepted == 2);
    CHECK(set.frame(0).size() == 1);
    CHECK(set.frame(1).size() == 1);

    auto stats = nlohmann::json::parse(read_file(out / "appearance" / "ingest.json"));
    CHECK(stats.at("accepted").get<int>() == 2);
    CHECK(stats.at("rejected_confidence").get<int>() == 1);
    CHECK(stats.at("rejected_class").get<int>() == 1);
    CHECK(stats.at("unknown_classes")[0].get<std::string>() == "llama");
}
