#include "scanviz/pipeline.hpp"

#include "scanviz/ingest.hpp"
#include "scanviz/parallel.hpp"
#include "scanviz/volume_io.hpp"

#include <filesystem>

namespace scanviz::pipeline {

namespace fs = std::filesystem;

MapSource parse_map_source(const std::string& s) {
    if (s == "train-prior") return MapSource::TrainPrior;
    if (s == "self") return MapSource::Self;
    throw Error("unknown map source '" + s + "' (expected train-prior or self)");
}

std::vector<std::string> stimuli_with_role(const Dataset& ds, SplitRole role) {
    std::vector<std::string> out;
    for (const auto& s : ds.stimuli) {
        auto it = ds.split.find(s.stimulus_id);
        if (it != ds.split.end() && it->second == role) out.push_back(s.stimulus_id);
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<BuiltVolume> build_maps(const Dataset& ds, const std::vector<std::string>& stimulus_ids,
                                    const MapOptions& opts, const std::string& out_dir,
                                    std::vector<std::string>* warnings) {
    attnmap::SliceClassValues prior;
    if (opts.source == MapSource::TrainPrior) {
        auto train = stimuli_with_role(ds, SplitRole::Train);
        if (train.empty()) throw Error("build_maps: train-prior maps need training stimuli");
        prior = attnmap::prior_class_efd(ds, train, opts.volume.boundaries_ms);
    }

    std::vector<BuiltVolume> out(stimulus_ids.size());
    std::vector<std::vector<std::string>> local_warnings(stimulus_ids.size());
    parallel_for(stimulus_ids.size(), [&](std::size_t k) {
        const Stimulus& s = ds.stimulus(stimulus_ids[k]);
        const Grid g = default_grid(s, opts.grid_width);
        auto values = opts.source == MapSource::TrainPrior
                          ? prior
                          : attnmap::stimulus_class_efd(s, attnmap::all_fixations(ds, s.stimulus_id),
                                                        opts.volume.boundaries_ms);
        if (s.annotations.empty()) local_warnings[k].push_back("stimulus " + s.stimulus_id + " has no annotations");
        out[k] = {s.stimulus_id, attnmap::build_volume_from_values(s, values, g, opts.volume, &local_warnings[k]), s};
        if (!out_dir.empty())
            write_volume((fs::path(out_dir) / s.stimulus_id).string(), out[k].volume,
                         {s.stimulus_id, s.width, s.height});
    });
    if (warnings)
        for (auto& w : local_warnings) warnings->insert(warnings->end(), w.begin(), w.end());
    return out;
}

std::uint64_t stimulus_seed(std::uint64_t seed, const std::string& stimulus_id) {
    return derive_seed(seed, "sample/" + stimulus_id);
}

PipelineResult run_pipeline(Dataset ds, const PipelineOptions& opts, const std::string& out_dir) {
    PipelineResult result;
    if (ds.split.empty()) ds = ingest::split_alphabetic(std::move(ds));
    const auto eval_ids = stimuli_with_role(ds, SplitRole::Eval);
    if (eval_ids.empty()) throw Error("pipeline: dataset has no eval stimuli");

    const std::string maps_dir = out_dir.empty() ? "" : (fs::path(out_dir) / "maps").string();
    auto volumes = build_maps(ds, eval_ids, opts.maps, maps_dir, &result.warnings);

    result.config = sampler::fit_sampler_config(ds, opts.window_ms);
    result.config.fovea_sigma_frac = opts.fovea_sigma_frac;
    result.config.seed = opts.seed;

    for (const auto& bv : volumes) {
        std::size_t n = opts.paths_per_stimulus.value_or(std::max<std::size_t>(1, ds.scanpaths_for(bv.stimulus_id).size()));
        sampler::SamplerConfig cfg = result.config;
        cfg.seed = stimulus_seed(opts.seed, bv.stimulus_id);
        auto paths = sampler::generate_scanpaths(bv.volume, cfg, {bv.stimulus_id, bv.stimulus.width, bv.stimulus.height}, n);
        result.predictions.insert(result.predictions.end(), paths.begin(), paths.end());
    }

    metrics::EvalOptions eval = opts.eval;
    eval.window_ms = opts.window_ms;
    eval.split = SplitRole::Eval;
    result.report = metrics::evaluate(result.predictions, ds, eval);

    if (!out_dir.empty()) {
        write_json_file((fs::path(out_dir) / "sampler_config.json").string(), json(result.config));
        save_scanpaths((fs::path(out_dir) / "paths.json").string(), result.predictions);
        write_json_file((fs::path(out_dir) / "report.json").string(), metrics::report_to_json(result.report));
        write_text_file((fs::path(out_dir) / "report.csv").string(), metrics::report_to_csv(result.report, "umss"));
    }
    return result;
}

}  // namespace scanviz::pipeline
