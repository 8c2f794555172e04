#pragma once

#include "scanviz/attnmap.hpp"
#include "scanviz/metrics/evaluate.hpp"
#include "scanviz/sampler.hpp"
#include "scanviz/types.hpp"

#include <optional>
#include <string>
#include <vector>

namespace scanviz::pipeline {

/// Where the per-class EFD values painted into an attention volume come from.
enum class MapSource {
    TrainPrior,  // class EFD averaged over the training stimuli, painted on the target layout
    Self,        // the target stimulus's own fixations (ground-truth element maps)
};

MapSource parse_map_source(const std::string& s);  // "train-prior" | "self"

struct MapOptions {
    int grid_width = 256;
    attnmap::VolumeOptions volume;
    MapSource source = MapSource::TrainPrior;
};

struct BuiltVolume {
    std::string stimulus_id;
    AttentionVolume volume;
    Stimulus stimulus;
};

std::vector<std::string> stimuli_with_role(const Dataset& ds, SplitRole role);

/// Volumes for the given stimuli; writes <out_dir>/<stimulus_id>/ when out_dir is non-empty.
std::vector<BuiltVolume> build_maps(const Dataset& ds, const std::vector<std::string>& stimulus_ids,
                                    const MapOptions& opts, const std::string& out_dir = {},
                                    std::vector<std::string>* warnings = nullptr);

/// Seed of the sampling stream for one stimulus under a run seed.
std::uint64_t stimulus_seed(std::uint64_t seed, const std::string& stimulus_id);

struct PipelineOptions {
    std::uint64_t seed = 7;
    double window_ms = 5000.0;
    std::optional<std::size_t> paths_per_stimulus;  // default: number of human scanpaths on the stimulus
    double fovea_sigma_frac = 0.15;
    MapOptions maps;
    metrics::EvalOptions eval;
};

struct PipelineResult {
    sampler::SamplerConfig config;
    std::vector<Scanpath> predictions;
    metrics::EvalReport report;
    std::vector<std::string> warnings;
};

/// build-maps → sample → eval over the eval split (the dataset is split 5:1 when it has no split).
/// Outputs under out_dir when non-empty: maps/, sampler_config.json, paths.json, report.json, report.csv.
PipelineResult run_pipeline(Dataset ds, const PipelineOptions& opts, const std::string& out_dir = {});

}  // namespace scanviz::pipeline
