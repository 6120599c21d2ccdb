#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "skyflux/cli/pipeline.hpp"
#include "skyflux/core/error.hpp"
#include "skyflux/synth/scene.hpp"

namespace {

using skyflux::cli::CliOverrides;
using skyflux::cli::PipelineConfig;

struct GlobalArgs {
    std::string config_path;
    int jobs = 0;
    unsigned seed = 0;
    bool seed_set = false;
    bool verbose = false;
};

/// Config precedence: command line > config file > built-in defaults.
PipelineConfig make_config(const GlobalArgs& g, const CliOverrides& o,
                           const std::string& input_dir, const std::string& output_dir) {
    PipelineConfig cfg = g.config_path.empty()
                             ? skyflux::cli::default_pipeline_config()
                             : skyflux::cli::load_pipeline_config(g.config_path);
    CliOverrides merged = o;
    if (g.jobs > 0) merged.jobs = g.jobs;
    if (g.verbose) merged.verbose = true;
    skyflux::cli::apply_overrides(cfg, merged);
    cfg.input_dir = input_dir;
    cfg.output_dir = output_dir;
    return cfg;
}

int run_one(const GlobalArgs& g, const CliOverrides& o, const std::string& stage,
            const std::string& input_dir, const std::string& output_dir) {
    PipelineConfig cfg = make_config(g, o, input_dir, output_dir);
    return skyflux::cli::run_stages(cfg, {stage}, false);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Moving-vehicle detection and semantic compression for "
                 "georegistered aerial video"};
    app.require_subcommand(1);

    GlobalArgs g;
    app.add_option("--config", g.config_path, "Pipeline config JSON file")
        ->check(CLI::ExistingFile);
    app.add_option("--jobs", g.jobs, "Worker threads for per-frame stages");
    auto* seed_opt = app.add_option("--seed", g.seed, "Scene seed (synth only)");
    app.add_flag("--verbose", g.verbose, "Log each stage as it runs");

    CliOverrides o;
    std::string input_dir, output_dir;

    auto add_io = [&](CLI::App* cmd, bool needs_input) {
        if (needs_input)
            cmd->add_option("--input", input_dir, "Input directory")->required();
        cmd->add_option("--outdir", output_dir, "Pipeline output directory")->required();
    };

    // synth
    auto* synth_cmd = app.add_subcommand("synth", "Render a synthetic scene into an input directory");
    std::string scene_path;
    skyflux::synth::OracleConfig oracle;
    synth_cmd->add_option("--scene", scene_path, "Scene description JSON")
        ->required()->check(CLI::ExistingFile);
    synth_cmd->add_option("--out", output_dir, "Input directory to create")->required();
    synth_cmd->add_option("--dropout", oracle.dropout, "Oracle detector miss rate");
    synth_cmd->add_option("--jitter", oracle.jitter_px, "Oracle box jitter, px");
    synth_cmd->add_option("--fp-rate", oracle.false_positive_rate,
                          "Oracle false positives per ground-truth box");
    synth_cmd->add_option("--oracle-seed", oracle.seed, "Oracle RNG seed");

    // single stages
    auto* stabilize_cmd = app.add_subcommand("stabilize", "Warp frames onto the ground plane");
    add_io(stabilize_cmd, true);
    auto* flux_cmd = app.add_subcommand("flux", "Motion traces and masks from stabilized frames");
    add_io(flux_cmd, false);
    auto* ingest_cmd = app.add_subcommand("ingest", "Filter appearance detections");
    add_io(ingest_cmd, true);
    auto* fuse_cmd = app.add_subcommand("fuse", "Fuse motion with appearance detections");
    add_io(fuse_cmd, false);
    auto* encode_cmd = app.add_subcommand("encode", "Pack stabilized frames and ROI masks into a container");
    add_io(encode_cmd, false);
    auto* decode_cmd = app.add_subcommand("decode", "Reconstruct composite frames from the container");
    add_io(decode_cmd, false);
    auto* eval_cmd = app.add_subcommand("eval", "Score detections against ground truth");
    add_io(eval_cmd, true);
    auto* report_cmd = app.add_subcommand("report", "Compression accounting for the container");
    add_io(report_cmd, false);
    auto* run_cmd = app.add_subcommand("run", "Full pipeline with artifact manifest");
    add_io(run_cmd, true);

    // stage knobs, each applied only when given
    double quality = 0, min_conf = 0, percentile = 0, fixed_thr = 0, iou_thr = 0;
    std::string criterion;
    bool no_roof = false, roi_buildings = false;
    for (CLI::App* cmd : {flux_cmd, run_cmd}) {
        cmd->add_option("--percentile", percentile, "Trace threshold percentile");
        cmd->add_option("--threshold", fixed_thr, "Fixed trace threshold");
    }
    for (CLI::App* cmd : {ingest_cmd, run_cmd})
        cmd->add_option("--min-confidence", min_conf, "Appearance confidence floor");
    for (CLI::App* cmd : {fuse_cmd, run_cmd})
        cmd->add_flag("--no-roof-filter", no_roof, "Keep roof-top parked-vehicle detections");
    for (CLI::App* cmd : {encode_cmd, run_cmd}) {
        cmd->add_option("--quality", quality, "ROI JPEG quality (100 = lossless)");
        cmd->add_flag("--roi-buildings", roi_buildings, "Include building pixels in the ROI");
    }
    for (CLI::App* cmd : {eval_cmd, run_cmd}) {
        cmd->add_option("--criterion", criterion, "Match criterion: iou or centroid");
        cmd->add_option("--iou-threshold", iou_thr, "IoU needed to match");
    }

    // Global flags may follow the subcommand name.
    for (CLI::App* cmd : {synth_cmd, stabilize_cmd, flux_cmd, ingest_cmd, fuse_cmd,
                          encode_cmd, decode_cmd, eval_cmd, report_cmd, run_cmd})
        cmd->fallthrough();

    CLI11_PARSE(app, argc, argv);
    g.seed_set = seed_opt->count() > 0;

    auto collect = [&](CLI::App* cmd) {
        auto given = [&](const std::string& name) {
            const CLI::Option* opt = cmd->get_option_no_throw(name);
            return opt != nullptr && opt->count() > 0;
        };
        if (given("--quality")) o.jpeg_quality = static_cast<int>(quality);
        if (given("--min-confidence")) o.min_confidence = min_conf;
        if (given("--no-roof-filter")) o.roof_filter = false;
        if (given("--roi-buildings")) o.roi_includes_buildings = true;
        if (given("--percentile")) o.percentile = percentile;
        if (given("--threshold")) o.fixed_threshold = fixed_thr;
        if (given("--criterion")) o.criterion = criterion;
        if (given("--iou-threshold")) o.iou_threshold = iou_thr;
    };

    try {
        if (synth_cmd->parsed()) {
            skyflux::synth::SceneSpec spec = skyflux::synth::load_scene_spec(scene_path);
            if (g.seed_set) spec.seed = g.seed;
            try {
                skyflux::cli::stage_synth(spec, oracle, output_dir);
            } catch (const std::exception& e) {
                std::cerr << "stage synth: " << e.what() << "\n";
                return 1;
            }
            return 0;
        }
        for (auto& [cmd, name] : std::initializer_list<std::pair<CLI::App*, const char*>>{
                 {stabilize_cmd, "stabilize"}, {flux_cmd, "flux"}, {ingest_cmd, "ingest"},
                 {fuse_cmd, "fuse"}, {encode_cmd, "encode"}, {decode_cmd, "decode"},
                 {eval_cmd, "eval"}, {report_cmd, "report"}}) {
            if (cmd->parsed()) {
                collect(cmd);
                return run_one(g, o, name, input_dir, output_dir);
            }
        }
        if (run_cmd->parsed()) {
            collect(run_cmd);
            PipelineConfig cfg = make_config(g, o, input_dir, output_dir);
            return skyflux::cli::run_pipeline(cfg);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
