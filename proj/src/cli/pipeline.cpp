#include "skyflux/cli/pipeline.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "json.hpp"

#include "skyflux/core/error.hpp"
#include "skyflux/core/image_io.hpp"
#include "skyflux/eval/metrics.hpp"
#include "skyflux/flux/processor.hpp"
#include "skyflux/flux/threshold.hpp"
#include "skyflux/fusion/fuse.hpp"
#include "skyflux/georeg/warp.hpp"
#include "skyflux/semcodec/codec.hpp"

namespace skyflux::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

std::string frame_file(const std::string& prefix, int index) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%s_%06d.png", prefix.c_str(), index);
    return buf;
}

/// Files named "<prefix>_<digits>.png" under dir, sorted by index.
std::vector<std::pair<int, std::string>> list_indexed(const fs::path& dir,
                                                      const std::string& prefix) {
    std::vector<std::pair<int, std::string>> items;
    if (!fs::is_directory(dir)) return items;
    const std::string head = prefix + "_";
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        std::string name = entry.path().filename().string();
        if (name.size() <= head.size() + 4 || name.compare(0, head.size(), head) != 0)
            continue;
        if (name.compare(name.size() - 4, 4, ".png") != 0) continue;
        std::string digits = name.substr(head.size(), name.size() - head.size() - 4);
        if (digits.empty() ||
            digits.find_first_not_of("0123456789") != std::string::npos)
            continue;
        items.emplace_back(std::stoi(digits), entry.path().string());
    }
    std::sort(items.begin(), items.end());
    return items;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    out << text;
    if (!out.good()) throw Error("cannot write " + path.string());
}

void check_keys(const ordered_json& j, const char* where,
                std::initializer_list<const char*> allowed) {
    for (const auto& item : j.items()) {
        bool known = false;
        for (const char* k : allowed)
            if (item.key() == k) { known = true; break; }
        if (!known)
            throw ParseError(std::string("pipeline config: unknown key \"") + item.key() +
                             "\" in " + where);
    }
}

ThresholdMode threshold_from_json(const ordered_json& j) {
    std::string mode = j.at("mode").get<std::string>();
    if (mode == "fixed") {
        check_keys(j, "threshold", {"mode", "value"});
        FixedThreshold t;
        if (j.contains("value")) t.value = j.at("value").get<double>();
        return t;
    }
    if (mode == "percentile") {
        check_keys(j, "threshold", {"mode", "p"});
        PercentileThreshold t;
        if (j.contains("p")) t.p = j.at("p").get<double>();
        return t;
    }
    if (mode == "otsu") {
        check_keys(j, "threshold", {"mode"});
        return OtsuThreshold{};
    }
    throw ParseError("pipeline config: unknown threshold mode \"" + mode + "\"");
}

ordered_json threshold_to_json(const ThresholdMode& m) {
    ordered_json j;
    if (const auto* f = std::get_if<FixedThreshold>(&m)) {
        j["mode"] = "fixed";
        j["value"] = f->value;
    } else if (const auto* p = std::get_if<PercentileThreshold>(&m)) {
        j["mode"] = "percentile";
        j["p"] = p->p;
    } else {
        j["mode"] = "otsu";
    }
    return j;
}

/// Plane raster for stabilization: explicit config wins, otherwise the
/// scene description shipped with a synthetic input is reused.
georeg::PlaneConfig effective_plane(const PipelineConfig& cfg) {
    if (cfg.plane.output_width > 0) {
        cfg.plane.validate();
        return cfg.plane;
    }
    fs::path scene = fs::path(cfg.input_dir) / "scene.json";
    if (fs::exists(scene)) return synth::load_scene_spec(scene.string()).plane;
    throw InvalidSpec("no plane raster configured: set plane dimensions in the "
                      "pipeline config or provide " + scene.string());
}

fs::path require_input(const PipelineConfig& cfg) {
    if (cfg.input_dir.empty())
        throw InvalidSpec("no input directory configured");
    return fs::path(cfg.input_dir);
}

std::array<double, 3> category_color(Category c) {
    switch (c) {
        case Category::MovingVehicle: return {1.0, 0.0, 0.0};
        case Category::StationaryVehicleOrFalse: return {1.0, 1.0, 0.0};
        case Category::OtherMovingOrFalse: return {0.6, 0.6, 0.6};
        case Category::Building: return {0.0, 0.4, 1.0};
        case Category::Vehicle: return {0.0, 1.0, 0.0};
        case Category::GroundTruth: return {1.0, 1.0, 1.0};
    }
    return {1.0, 0.0, 1.0};
}

void draw_box_outline(Frame& f, const BBox& box) {
    auto color = category_color(box.category);
    int x0 = std::max(0, static_cast<int>(std::lround(box.x)));
    int y0 = std::max(0, static_cast<int>(std::lround(box.y)));
    int x1 = std::min(f.width - 1, static_cast<int>(std::lround(box.x + box.w)));
    int y1 = std::min(f.height - 1, static_cast<int>(std::lround(box.y + box.h)));
    if (x0 > x1 || y0 > y1) return;
    auto paint = [&](int x, int y) {
        for (int c = 0; c < f.channels; ++c) f.at(x, y, c) = color[c % 3];
    };
    for (int x = x0; x <= x1; ++x) { paint(x, y0); paint(x, y1); }
    for (int y = y0; y <= y1; ++y) { paint(x0, y); paint(x1, y); }
}

/// RGB copy for overlay drawing; grayscale input replicates into color.
Frame to_rgb(const Frame& f) {
    if (f.channels == 3) return f;
    Frame out(f.width, f.height, 3, f.index);
    for (size_t p = 0; p < f.pixel_count(); ++p)
        for (int c = 0; c < 3; ++c) out.data[p * 3 + c] = f.data[p];
    return out;
}

std::string criterion_name(const eval::MatchConfig& m) {
    if (m.criterion == eval::MatchCriterion::CentroidInBox)
        return "detection centroid inside ground-truth box";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "IoU >= %.2f", m.iou_threshold);
    return buf;
}

} // namespace

void PipelineConfig::validate() const {
    if (output_dir.empty())
        throw InvalidSpec("pipeline: output directory is required");
    seq.validate();
    if (jpeg_quality < 1 || jpeg_quality > 100)
        throw InvalidSpec("pipeline: jpeg_quality must be in [1, 100]");
    if (min_confidence < 0.0 || min_confidence > 1.0)
        throw InvalidSpec("pipeline: min_confidence must be in [0, 1]");
    if (jobs < 1) throw InvalidSpec("pipeline: jobs must be >= 1");
    if (plane.output_width > 0) plane.validate();
    if (match.criterion == eval::MatchCriterion::IoU &&
        (match.iou_threshold <= 0.0 || match.iou_threshold > 1.0))
        throw InvalidSpec("pipeline: iou_threshold must be in (0, 1]");
}

PipelineConfig default_pipeline_config() { return PipelineConfig{}; }

namespace {
PipelineConfig parse_config_fields(const ordered_json& j);
} // namespace

PipelineConfig pipeline_config_from_json(const std::string& text) {
    ordered_json j;
    try {
        j = ordered_json::parse(text);
    } catch (const ordered_json::parse_error& e) {
        throw ParseError(std::string("pipeline config: ") + e.what());
    }
    try {
        return parse_config_fields(j);
    } catch (const ordered_json::exception& e) {
        throw ParseError(std::string("pipeline config: ") + e.what());
    }
}

namespace {

PipelineConfig parse_config_fields(const ordered_json& j) {
    check_keys(j, "the top level",
               {"temporal_window", "spatial_sigma", "temporal_sigma", "integration_radius",
                "threshold", "small_large_area_cutoff", "morphology_radius", "min_blob_area",
                "overlap_fraction", "building_iou_link", "plane", "jpeg_quality",
                "roi_includes_buildings", "min_confidence", "classes", "match",
                "roof_filter", "jobs", "verbose"});
    PipelineConfig cfg;
    auto& s = cfg.seq;
    if (j.contains("temporal_window")) s.temporal_window = j["temporal_window"].get<int>();
    if (j.contains("spatial_sigma")) s.spatial_sigma = j["spatial_sigma"].get<double>();
    if (j.contains("temporal_sigma")) s.temporal_sigma = j["temporal_sigma"].get<double>();
    if (j.contains("integration_radius"))
        s.integration_radius = j["integration_radius"].get<int>();
    if (j.contains("threshold")) s.trace_threshold_mode = threshold_from_json(j["threshold"]);
    if (j.contains("small_large_area_cutoff"))
        s.small_large_area_cutoff = j["small_large_area_cutoff"].get<double>();
    if (j.contains("morphology_radius")) s.morphology_radius = j["morphology_radius"].get<int>();
    if (j.contains("min_blob_area")) s.min_blob_area = j["min_blob_area"].get<double>();
    if (j.contains("overlap_fraction")) s.overlap_fraction = j["overlap_fraction"].get<double>();
    if (j.contains("building_iou_link"))
        s.building_iou_link = j["building_iou_link"].get<double>();
    if (j.contains("plane")) {
        const auto& p = j["plane"];
        check_keys(p, "plane", {"width", "height", "scale_m_per_px", "origin"});
        cfg.plane.output_width = p.at("width").get<int>();
        cfg.plane.output_height = p.at("height").get<int>();
        if (p.contains("scale_m_per_px"))
            cfg.plane.plane_scale = p["scale_m_per_px"].get<double>();
        if (p.contains("origin")) {
            if (!p["origin"].is_array() || p["origin"].size() != 2)
                throw ParseError("pipeline config: plane origin must be [x, y]");
            cfg.plane.plane_origin =
                Eigen::Vector2d(p["origin"][0].get<double>(), p["origin"][1].get<double>());
        }
    }
    if (j.contains("jpeg_quality")) cfg.jpeg_quality = j["jpeg_quality"].get<int>();
    if (j.contains("roi_includes_buildings"))
        cfg.roi_includes_buildings = j["roi_includes_buildings"].get<bool>();
    if (j.contains("min_confidence")) cfg.min_confidence = j["min_confidence"].get<double>();
    if (j.contains("classes")) {
        cfg.classes.clear();
        for (const auto& c : j["classes"]) cfg.classes.insert(c.get<std::string>());
    }
    if (j.contains("match")) {
        const auto& m = j["match"];
        check_keys(m, "match", {"criterion", "iou_threshold", "one_to_one"});
        if (m.contains("criterion")) {
            std::string c = m["criterion"].get<std::string>();
            if (c == "iou")
                cfg.match.criterion = eval::MatchCriterion::IoU;
            else if (c == "centroid")
                cfg.match.criterion = eval::MatchCriterion::CentroidInBox;
            else
                throw ParseError("pipeline config: unknown match criterion \"" + c + "\"");
        }
        if (m.contains("iou_threshold"))
            cfg.match.iou_threshold = m["iou_threshold"].get<double>();
        if (m.contains("one_to_one")) cfg.match.one_to_one = m["one_to_one"].get<bool>();
    }
    if (j.contains("roof_filter")) cfg.roof_filter = j["roof_filter"].get<bool>();
    if (j.contains("jobs")) cfg.jobs = j["jobs"].get<int>();
    if (j.contains("verbose")) cfg.verbose = j["verbose"].get<bool>();
    return cfg;
}

} // namespace

std::string pipeline_config_to_json(const PipelineConfig& cfg) {
    ordered_json j;
    j["temporal_window"] = cfg.seq.temporal_window;
    j["spatial_sigma"] = cfg.seq.spatial_sigma;
    j["temporal_sigma"] = cfg.seq.temporal_sigma;
    j["integration_radius"] = cfg.seq.integration_radius;
    j["threshold"] = threshold_to_json(cfg.seq.trace_threshold_mode);
    j["small_large_area_cutoff"] = cfg.seq.small_large_area_cutoff;
    j["morphology_radius"] = cfg.seq.morphology_radius;
    j["min_blob_area"] = cfg.seq.min_blob_area;
    j["overlap_fraction"] = cfg.seq.overlap_fraction;
    j["building_iou_link"] = cfg.seq.building_iou_link;
    if (cfg.plane.output_width > 0) {
        j["plane"] = {{"width", cfg.plane.output_width},
                      {"height", cfg.plane.output_height},
                      {"scale_m_per_px", cfg.plane.plane_scale},
                      {"origin", {cfg.plane.plane_origin.x(), cfg.plane.plane_origin.y()}}};
    }
    j["jpeg_quality"] = cfg.jpeg_quality;
    j["roi_includes_buildings"] = cfg.roi_includes_buildings;
    j["min_confidence"] = cfg.min_confidence;
    j["classes"] = cfg.classes;
    j["match"] = {{"criterion",
                   cfg.match.criterion == eval::MatchCriterion::IoU ? "iou" : "centroid"},
                  {"iou_threshold", cfg.match.iou_threshold},
                  {"one_to_one", cfg.match.one_to_one}};
    j["roof_filter"] = cfg.roof_filter;
    j["jobs"] = cfg.jobs;
    j["verbose"] = cfg.verbose;
    return j.dump(2) + "\n";
}

PipelineConfig load_pipeline_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open pipeline config " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return pipeline_config_from_json(ss.str());
}

void apply_overrides(PipelineConfig& cfg, const CliOverrides& o) {
    if (o.jpeg_quality) cfg.jpeg_quality = *o.jpeg_quality;
    if (o.min_confidence) cfg.min_confidence = *o.min_confidence;
    if (o.roof_filter) cfg.roof_filter = *o.roof_filter;
    if (o.roi_includes_buildings) cfg.roi_includes_buildings = *o.roi_includes_buildings;
    if (o.percentile && o.fixed_threshold)
        throw InvalidSpec("pipeline: --percentile and --threshold are exclusive");
    if (o.percentile) cfg.seq.trace_threshold_mode = PercentileThreshold{*o.percentile};
    if (o.fixed_threshold) cfg.seq.trace_threshold_mode = FixedThreshold{*o.fixed_threshold};
    if (o.temporal_window) cfg.seq.temporal_window = *o.temporal_window;
    if (o.iou_threshold) cfg.match.iou_threshold = *o.iou_threshold;
    if (o.criterion) {
        if (*o.criterion == "iou")
            cfg.match.criterion = eval::MatchCriterion::IoU;
        else if (*o.criterion == "centroid")
            cfg.match.criterion = eval::MatchCriterion::CentroidInBox;
        else
            throw InvalidSpec("pipeline: unknown match criterion \"" + *o.criterion + "\"");
    }
    if (o.jobs) cfg.jobs = *o.jobs;
    if (o.verbose) cfg.verbose = *o.verbose;
}

void parallel_for(int begin, int end, int jobs, const std::function<void(int)>& fn) {
    int n = end - begin;
    if (n <= 0) return;
    if (jobs <= 1 || n == 1) {
        for (int i = begin; i < end; ++i) fn(i);
        return;
    }
    std::atomic<int> next{begin};
    std::atomic<bool> stop{false};
    std::mutex error_mutex;
    std::exception_ptr first_error;
    auto worker = [&] {
        while (!stop.load()) {
            int i = next.fetch_add(1);
            if (i >= end) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                stop.store(true);
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    int workers = std::min(jobs, n);
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

void stage_synth(const synth::SceneSpec& spec, const synth::OracleConfig& oracle,
                 const std::string& input_dir) {
    synth::RenderResult r = synth::render_sequence(spec);
    fs::path dir(input_dir);
    fs::create_directories(dir / "frames");
    for (size_t i = 0; i < r.frames.size(); ++i)
        save_frame(r.frames[i], (dir / "frames" / frame_file("frame", r.frames[i].index)).string());
    georeg::save_poses(r.poses, (dir / "poses.csv").string());
    appearance::save_detections(r.gt_moving, (dir / "gt_moving.csv").string());
    auto detections =
        synth::oracle_appearance(r.gt_vehicles, oracle, spec.plane.output_width,
                                 spec.plane.output_height);
    appearance::save_detections(detections, (dir / "detections.csv").string());
    synth::save_scene_spec(spec, (dir / "scene.json").string());
}

void stage_stabilize(const PipelineConfig& cfg) {
    fs::path in = require_input(cfg);
    fs::path out = fs::path(cfg.output_dir) / "stabilized";
    auto poses = georeg::load_poses((in / "poses.csv").string());
    std::map<int, georeg::CameraPose> by_index;
    for (const auto& p : poses) by_index[p.frame_index] = p;
    auto items = list_indexed(in / "frames", "frame");
    if (items.empty())
        throw EmptySequence("no input frames under " + (in / "frames").string());
    for (const auto& [idx, path] : items)
        if (!by_index.count(idx))
            throw ParseError("no pose for frame " + std::to_string(idx) + " in " +
                             (in / "poses.csv").string());
    georeg::PlaneConfig plane = effective_plane(cfg);
    fs::create_directories(out);
    parallel_for(0, static_cast<int>(items.size()), cfg.jobs, [&](int i) {
        const auto& [idx, path] = items[i];
        Frame f = load_frame(path);
        f.index = idx;
        georeg::WarpResult wr = georeg::warp_to_plane(f, by_index.at(idx), plane);
        wr.frame.index = idx;
        save_frame(wr.frame, (out / frame_file("frame", idx)).string());
        save_mask(wr.validity, (out / frame_file("validity", idx)).string());
    });
}

void stage_flux(const PipelineConfig& cfg) {
    fs::path in = fs::path(cfg.output_dir) / "stabilized";
    fs::path out = fs::path(cfg.output_dir) / "flux";
    auto items = list_indexed(in, "frame");
    if (static_cast<int>(items.size()) < cfg.seq.temporal_window)
        throw WindowTooShort("have " + std::to_string(items.size()) +
                             " stabilized frames, need at least " +
                             std::to_string(cfg.seq.temporal_window));
    fs::create_directories(out);
    flux::FluxProcessor proc(cfg.seq);
    size_t emitted = 0;
    for (const auto& [idx, path] : items) {
        Frame f = load_frame(path);
        f.index = idx;
        BinaryMask validity = load_mask((in / frame_file("validity", idx)).string());
        auto res = proc.push(f, &validity);
        if (!res) continue;
        ++emitted;
        int ci = res->frame_index;
        save_trace_png16(res->flux_trace, res->width, res->height,
                         (out / frame_file("trace", ci)).string());
        flux::ThresholdResult thr =
            flux::threshold_trace(res->flux_trace, res->width, res->height,
                                  cfg.seq.trace_threshold_mode, &res->validity);
        save_mask(thr.mask, (out / frame_file("mask", ci)).string());
        save_mask(res->validity, (out / frame_file("validity", ci)).string());
    }
    if (emitted == 0)
        throw WindowTooShort("flux produced no output frames");
}

void stage_ingest(const PipelineConfig& cfg) {
    fs::path in = require_input(cfg);
    fs::path out = fs::path(cfg.output_dir) / "appearance";
    appearance::DetectionSet set = appearance::load_detections(
        (in / "detections.csv").string(), cfg.classes, cfg.min_confidence);
    fs::create_directories(out);
    std::vector<appearance::DetectionRecord> rows;
    for (const auto& [frame, boxes] : set.by_frame)
        for (const auto& b : boxes)
            rows.push_back({frame, b.x, b.y, b.w, b.h, to_string(b.category), b.confidence});
    appearance::save_detections(rows, (out / "accepted.csv").string());
    nlohmann::json stats;
    stats["accepted"] = set.accepted;
    stats["rejected_confidence"] = set.rejected_confidence;
    stats["rejected_class"] = set.rejected_class;
    stats["deduplicated"] = set.deduplicated;
    stats["unknown_classes"] = set.unknown_classes;
    write_text(out / "ingest.json", stats.dump(2) + "\n");
}

void stage_fuse(const PipelineConfig& cfg) {
    fs::path flux_dir = fs::path(cfg.output_dir) / "flux";
    fs::path out = fs::path(cfg.output_dir) / "fusion";
    auto items = list_indexed(flux_dir, "mask");
    if (items.empty())
        throw EmptySequence("no motion masks under " + flux_dir.string());
    fs::path accepted = fs::path(cfg.output_dir) / "appearance" / "accepted.csv";
    appearance::DetectionSet dets =
        appearance::load_detections(accepted.string(), {"Vehicle"}, 0.0);
    fs::create_directories(out);
    fusion::FusionPipeline pipeline(cfg.seq, cfg.roof_filter);
    fs::path stab = fs::path(cfg.output_dir) / "stabilized";
    std::vector<appearance::DetectionRecord> rows;
    for (const auto& [idx, path] : items) {
        BinaryMask motion = load_mask(path);
        BinaryMask app =
            appearance::rasterize_detections(dets, idx, motion.width, motion.height);
        fusion::FusionOutput fo = pipeline.process(idx, motion, app);
        save_mask(fo.moving_vehicle_mask, (out / frame_file("moving", idx)).string());
        save_mask(fo.building_mask, (out / frame_file("building", idx)).string());
        for (const auto& b : fo.categorized.frame(idx))
            rows.push_back({idx, b.x, b.y, b.w, b.h, to_string(b.category), b.confidence});
        fs::path sp = stab / frame_file("frame", idx);
        if (fs::exists(sp)) {
            Frame overlay = to_rgb(load_frame(sp.string()));
            for (const auto& b : fo.categorized.frame(idx)) draw_box_outline(overlay, b);
            save_frame(overlay, (out / frame_file("overlay", idx)).string());
        }
    }
    appearance::save_detections(rows, (out / "detections.csv").string());
    fusion::save_building_tracks(pipeline.tracks(), (out / "tracks.csv").string());
}

void stage_encode(const PipelineConfig& cfg) {
    fs::path stab = fs::path(cfg.output_dir) / "stabilized";
    fs::path fusion_dir = fs::path(cfg.output_dir) / "fusion";
    fs::path out = fs::path(cfg.output_dir) / "codec";
    auto items = list_indexed(fusion_dir, "moving");
    if (items.empty())
        throw EmptySequence("no moving-vehicle masks under " + fusion_dir.string());
    int first = items.front().first;
    int last = items.back().first;
    std::vector<Frame> frames;
    std::vector<BinaryMask> masks;
    for (int idx = first; idx <= last; ++idx) {
        fs::path fp = stab / frame_file("frame", idx);
        if (!fs::exists(fp))
            throw ParseError("missing stabilized frame " + fp.string());
        Frame f = load_frame(fp.string());
        f.index = idx;
        frames.push_back(std::move(f));
        if (idx == first) continue; // base frame carries no ROI mask
        fs::path mp = fusion_dir / frame_file("moving", idx);
        if (!fs::exists(mp))
            throw ParseError("missing moving-vehicle mask " + mp.string());
        BinaryMask m = load_mask(mp.string());
        if (cfg.roi_includes_buildings)
            m = m | load_mask((fusion_dir / frame_file("building", idx)).string());
        masks.push_back(std::move(m));
    }
    semcodec::SemanticContainer c = semcodec::encode(frames, masks, cfg.jpeg_quality);
    fs::create_directories(out);
    semcodec::save_container(c, (out / "clip.svc").string());
}

void stage_decode(const PipelineConfig& cfg) {
    fs::path codec_dir = fs::path(cfg.output_dir) / "codec";
    semcodec::SemanticContainer c =
        semcodec::load_container((codec_dir / "clip.svc").string());
    std::vector<Frame> frames = semcodec::decode(c, true);
    fs::path out = codec_dir / "decoded";
    fs::create_directories(out);
    for (const auto& f : frames)
        save_frame(f, (out / frame_file("frame", f.index)).string());
}

void stage_eval(const PipelineConfig& cfg) {
    fs::path in = require_input(cfg);
    fs::path fusion_dir = fs::path(cfg.output_dir) / "fusion";
    fs::path out = fs::path(cfg.output_dir) / "eval";
    auto mask_items = list_indexed(fusion_dir, "moving");
    if (mask_items.empty())
        throw EmptySequence("no fusion outputs under " + fusion_dir.string());
    appearance::DetectionSet gt =
        appearance::load_detections((in / "gt_moving.csv").string(), {"GT"}, 0.0);
    appearance::DetectionSet dt = appearance::load_detections(
        (fusion_dir / "detections.csv").string(), {"MovingVehicle"}, 0.0);
    // Scores cover only the frames the pipeline produced output for; the
    // warm-up frames of the temporal window have no detections by design.
    std::set<int> evaluated;
    for (const auto& [idx, path] : mask_items) evaluated.insert(idx);
    appearance::DetectionSet gt_eval;
    for (const auto& [frame, boxes] : gt.by_frame)
        if (evaluated.count(frame)) gt_eval.by_frame[frame] = boxes;
    eval::MatchResult match = eval::match_detections(gt_eval, dt, cfg.match);
    eval::Metrics m = eval::metrics(match.tp, match.gt_count, match.dt_count);
    std::string method = cfg.roof_filter ? "Flux + appearance + roof filter"
                                         : "Flux + appearance";
    std::ostringstream head;
    head << "frames evaluated: " << mask_items.front().first << ".."
         << mask_items.back().first << " (" << mask_items.size() << " frames)\n"
         << "ground truth boxes: " << match.gt_count
         << ", detections: " << match.dt_count << ", matched: " << match.tp << "\n\n";
    fs::create_directories(out);
    write_text(out / "metrics.txt",
               head.str() + eval::format_metrics_table({{method, m}},
                                                       criterion_name(cfg.match)));
    nlohmann::json j;
    j["criterion"] = criterion_name(cfg.match);
    j["frames"] = {mask_items.front().first, mask_items.back().first};
    j["gt"] = match.gt_count;
    j["detections"] = match.dt_count;
    j["matched"] = match.tp;
    j["precision"] = m.precision;
    j["recall"] = m.recall;
    j["f_measure"] = m.f_measure;
    write_text(out / "metrics.json", j.dump(2) + "\n");
}

void stage_report(const PipelineConfig& cfg) {
    fs::path codec_dir = fs::path(cfg.output_dir) / "codec";
    fs::path stab = fs::path(cfg.output_dir) / "stabilized";
    semcodec::SemanticContainer c =
        semcodec::load_container((codec_dir / "clip.svc").string());
    size_t count = 1 + c.abstract_frames.size();
    size_t lossless = 0;
    for (size_t i = 0; i < count; ++i) {
        fs::path fp = stab / frame_file("frame", c.base_source_index + static_cast<int>(i));
        if (!fs::exists(fp))
            throw ParseError("missing stabilized frame " + fp.string() +
                             " needed as compression reference");
        lossless += fs::file_size(fp);
    }
    size_t raw = static_cast<size_t>(c.width) * c.height * c.channels * count;
    semcodec::CompressionReport rep = semcodec::compression_report(c, lossless, raw);
    write_text(codec_dir / "report.txt", semcodec::format_report(rep));
}

std::string build_manifest(const std::string& output_dir) {
    nlohmann::json artifacts = nlohmann::json::object();
    fs::path root(output_dir);
    for (const auto& entry : fs::recursive_directory_iterator(root)) {
        if (!entry.is_regular_file()) continue;
        if (entry.path().extension() == ".partial") continue;
        std::string rel = fs::relative(entry.path(), root).generic_string();
        if (rel == "manifest.json") continue;
        artifacts[rel] = static_cast<uint64_t>(entry.file_size());
    }
    nlohmann::json j;
    j["artifacts"] = artifacts;
    return j.dump(2) + "\n";
}

namespace {

using StageFn = void (*)(const PipelineConfig&);

const std::vector<std::pair<std::string, StageFn>>& stage_table() {
    static const std::vector<std::pair<std::string, StageFn>> table = {
        {"stabilize", &stage_stabilize}, {"flux", &stage_flux},
        {"ingest", &stage_ingest},       {"fuse", &stage_fuse},
        {"encode", &stage_encode},       {"eval", &stage_eval},
        {"decode", &stage_decode},       {"report", &stage_report},
    };
    return table;
}

void emit(const std::function<void(const std::string&)>& log, const std::string& line) {
    if (log)
        log(line);
    else
        std::cerr << line << "\n";
}

} // namespace

int run_stages(const PipelineConfig& cfg, const std::vector<std::string>& names,
               bool write_manifest, const std::function<void(const std::string&)>& log) {
    cfg.validate();
    fs::create_directories(cfg.output_dir);
    for (const auto& name : names) {
        StageFn fn = nullptr;
        for (const auto& [n, f] : stage_table())
            if (n == name) fn = f;
        if (!fn) throw InvalidSpec("unknown pipeline stage \"" + name + "\"");
        fs::path marker = fs::path(cfg.output_dir) / (name + ".partial");
        fs::remove(marker);
        if (cfg.verbose) emit(log, "[" + name + "] running");
        try {
            fn(cfg);
        } catch (const std::exception& e) {
            write_text(marker, std::string(e.what()) + "\n");
            emit(log, "stage " + name + ": " + e.what());
            return 1;
        }
    }
    if (write_manifest)
        write_text(fs::path(cfg.output_dir) / "manifest.json",
                   build_manifest(cfg.output_dir));
    return 0;
}

int run_pipeline(const PipelineConfig& cfg,
                 const std::function<void(const std::string&)>& log) {
    return run_stages(cfg, {"stabilize", "flux", "ingest", "fuse", "encode", "eval"},
                      true, log);
}

} // namespace skyflux::cli
