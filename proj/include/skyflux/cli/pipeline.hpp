#pragma once

#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "skyflux/appearance/detections.hpp"
#include "skyflux/core/config.hpp"
#include "skyflux/eval/metrics.hpp"
#include "skyflux/georeg/pose.hpp"
#include "skyflux/synth/scene.hpp"

namespace skyflux::cli {

/// Everything the pipeline stages read. Stages communicate only through
/// files under input_dir and output_dir, so each can be rerun alone.
struct PipelineConfig {
    std::string input_dir;  // frames/, poses.csv, detections.csv, gt_moving.csv
    std::string output_dir; // stabilized/, flux/, appearance/, fusion/, codec/, eval/
    SequenceConfig seq;
    georeg::PlaneConfig plane;
    int jpeg_quality = 75;
    bool roi_includes_buildings = false;
    double min_confidence = 0.5;
    std::set<std::string> classes = appearance::default_vehicle_classes();
    eval::MatchConfig match;
    bool roof_filter = true;
    int jobs = 1;
    bool verbose = false;

    void validate() const;
};

PipelineConfig default_pipeline_config();

/// JSON form of the tunable fields (directories excluded). Unknown keys
/// are rejected.
PipelineConfig pipeline_config_from_json(const std::string& text);
std::string pipeline_config_to_json(const PipelineConfig& cfg);
PipelineConfig load_pipeline_config(const std::string& path);

/// Command-line values that take precedence over the config file.
struct CliOverrides {
    std::optional<int> jpeg_quality;
    std::optional<double> min_confidence;
    std::optional<bool> roof_filter;
    std::optional<bool> roi_includes_buildings;
    std::optional<double> percentile;     // swaps in a percentile threshold
    std::optional<double> fixed_threshold; // swaps in a fixed threshold
    std::optional<int> temporal_window;
    std::optional<double> iou_threshold;
    std::optional<std::string> criterion; // "iou" | "centroid"
    std::optional<int> jobs;
    std::optional<bool> verbose;
};

void apply_overrides(PipelineConfig& cfg, const CliOverrides& o);

/// Contiguous index-range work sharing across up to `jobs` threads.
/// Exceptions propagate to the caller after all threads join.
void parallel_for(int begin, int end, int jobs, const std::function<void(int)>& fn);

// Individual stages. Each throws on failure; file layout under the
// directories is fixed (see the README format reference).
void stage_synth(const synth::SceneSpec& spec, const synth::OracleConfig& oracle,
                 const std::string& input_dir);
void stage_stabilize(const PipelineConfig& cfg);
void stage_flux(const PipelineConfig& cfg);
void stage_ingest(const PipelineConfig& cfg);
void stage_fuse(const PipelineConfig& cfg);
void stage_encode(const PipelineConfig& cfg);
void stage_decode(const PipelineConfig& cfg); // codec/decoded/, not part of run
void stage_eval(const PipelineConfig& cfg);
void stage_report(const PipelineConfig& cfg);

/// Runs the named stages in order. Entering a stage removes its old
/// partial marker; a failing stage writes "<stage>.partial" with the error
/// text under output_dir, reports "stage <name>: <error>" through `log`
/// (stderr when no logger is given), and stops with a nonzero return.
/// write_manifest adds manifest.json on success, mapping every artifact's
/// relative path to its byte size.
int run_stages(const PipelineConfig& cfg, const std::vector<std::string>& stage_names,
               bool write_manifest,
               const std::function<void(const std::string&)>& log = {});

/// The full chain: stabilize, flux, ingest, fuse, encode, eval, then the
/// manifest.
int run_pipeline(const PipelineConfig& cfg,
                 const std::function<void(const std::string&)>& log = {});

/// The manifest content for the current on-disk state (sorted paths).
std::string build_manifest(const std::string& output_dir);

} // namespace skyflux::cli
