#include "scanviz/cli.hpp"

#include "scanviz/analysis.hpp"
#include "scanviz/fixtures.hpp"
#include "scanviz/ingest.hpp"
#include "scanviz/json_io.hpp"
#include "scanviz/pipeline.hpp"
#include "scanviz/render.hpp"
#include "scanviz/rng.hpp"
#include "scanviz/sampler.hpp"
#include "scanviz/volume_io.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>

namespace scanviz::cli {

namespace fs = std::filesystem;

namespace {

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::string read_bytes(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw Error("cannot open " + p.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// FNV-1a over the file bytes; directories hash their files in sorted relative-path order.
std::string input_hash(const std::string& path) {
    const fs::path p(path);
    if (!fs::is_directory(p)) return hex64(fnv1a(read_bytes(p)));
    std::vector<fs::path> files;
    for (const auto& e : fs::recursive_directory_iterator(p))
        if (e.is_regular_file()) files.push_back(e.path());
    std::sort(files.begin(), files.end());
    std::uint64_t h = fnv1a("");
    for (const auto& f : files) {
        h = fnv1a(fs::relative(f, p).generic_string(), h);
        h = fnv1a(read_bytes(f), h);
    }
    return hex64(h);
}

std::string join(const std::vector<std::string>& v, const std::string& sep) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? sep : "") + v[i];
    return out;
}

std::string csv_number(double v) {
    if (!std::isfinite(v)) return "";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

/// Parsed option values of one subcommand, keyed by long name.
json config_snapshot(const CLI::App& sub) {
    json j = json::object();
    for (const CLI::Option* opt : sub.get_options()) {
        if (opt->get_lnames().empty() || opt->get_lnames()[0] == "help") continue;
        const std::string& name = opt->get_lnames()[0];
        if (opt->get_type_size() == 0) {
            j[name] = opt->count() > 0;
        } else if (opt->count() > 0) {
            const auto& r = opt->results();
            j[name] = r.size() == 1 ? json(r[0]) : json(r);
        } else if (!opt->get_default_str().empty()) {
            j[name] = opt->get_default_str();
        }
    }
    return j;
}

struct Run {
    std::string command;
    json config;
    std::optional<std::uint64_t> seed;
    std::vector<std::string> inputs;
    std::vector<std::string> outputs;
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

    void write_manifest(const std::string& path) const {
        json j;
        j["command"] = command;
        j["config"] = config;
        j["seed"] = seed ? json(*seed) : json(nullptr);
        json in = json::array();
        for (const auto& p : inputs) in.push_back({{"path", p}, {"fnv1a64", input_hash(p)}});
        j["inputs"] = in;
        j["outputs"] = outputs;
        j["version"] = kVersion;
        j["wall_time_ms"] =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
        write_json_file(path, j);
    }
};

std::string manifest_next_to(const std::string& file) { return file + ".manifest.json"; }
std::string manifest_in(const std::string& dir) { return (fs::path(dir) / "manifest.json").string(); }

void print_warnings(const std::vector<std::string>& warnings, std::ostream& err) {
    for (const auto& w : warnings) err << "warning: " << w << "\n";
}

std::optional<SplitRole> parse_split_filter(const std::string& s) {
    if (s == "eval") return SplitRole::Eval;
    if (s == "train") return SplitRole::Train;
    if (s == "all") return std::nullopt;
    throw Error("unknown split '" + s + "' (expected eval, train or all)");
}

attnmap::FirstSlice parse_first_slice(const std::string& s) {
    if (s == "center") return attnmap::FirstSlice::Center;
    if (s == "mde") return attnmap::FirstSlice::Mde;
    throw Error("unknown first-slice mode '" + s + "' (expected center or mde)");
}

std::pair<int, int> parse_ratio(const std::string& s) {
    int a = 0, b = 0;
    char colon = 0;
    std::istringstream in(s);
    if (!(in >> a >> colon >> b) || colon != ':' || a < 0 || b < 0 || a + b == 0)
        throw Error("bad split ratio '" + s + "' (expected train:eval, e.g. 5:1)");
    return {a, b};
}

// ---------------------------------------------------------------------------------------------

struct IngestArgs {
    std::string gaze, ann, stimuli, out, merge_table, columns, split = "5:1";
    double dispersion = 35.0, min_dur = 100.0;
};

int cmd_ingest(const IngestArgs& a, Run& run, std::ostream& out, std::ostream& err) {
    ingest::IngestOptions opts;
    opts.idt = {a.dispersion, a.min_dur};
    if (!a.merge_table.empty()) opts.merge = MergeTable::from_json_file(a.merge_table);
    if (!a.columns.empty()) opts.columns = ingest::load_column_mapping(a.columns);
    std::tie(opts.split_train, opts.split_eval) = parse_ratio(a.split);

    auto result = ingest::ingest(a.gaze, a.ann, a.stimuli, opts);
    print_warnings(result.warnings, err);
    save_dataset(a.out, result.dataset);
    run.inputs = {a.gaze, a.ann, a.stimuli};
    if (!a.merge_table.empty()) run.inputs.push_back(a.merge_table);
    if (!a.columns.empty()) run.inputs.push_back(a.columns);
    run.outputs = {a.out};
    run.write_manifest(manifest_next_to(a.out));
    out << "ingested " << result.dataset.stimuli.size() << " stimuli, " << result.dataset.scanpaths.size()
        << " scanpaths (" << result.invalid_rows << " invalid rows)\n";
    return 0;
}

// ---------------------------------------------------------------------------------------------

struct AnalyzeArgs {
    std::string dataset, out;
    double bin_ms = 500.0, window_ms = 10000.0;
    int k = 3;
    bool include_background = false;
};

std::string matrix_csv(const analysis::TransitionMatrix& m) {
    std::ostringstream s;
    s << "from";
    for (char c : m.labels) s << ',' << c;
    s << '\n';
    for (std::size_t i = 0; i < m.labels.size(); ++i) {
        s << m.labels[i];
        for (std::size_t j = 0; j < m.labels.size(); ++j) s << ',' << csv_number(m.probs(Eigen::Index(i), Eigen::Index(j)));
        s << '\n';
    }
    return s.str();
}

template <typename Matrix>
std::string viewer_matrix_csv(const std::vector<std::string>& viewers, const Matrix& m) {
    std::ostringstream s;
    s << "viewer";
    for (const auto& v : viewers) s << ',' << v;
    s << '\n';
    for (std::size_t i = 0; i < viewers.size(); ++i) {
        s << viewers[i];
        for (std::size_t j = 0; j < viewers.size(); ++j) s << ',' << csv_number(double(m(Eigen::Index(i), Eigen::Index(j))));
        s << '\n';
    }
    return s.str();
}

int cmd_analyze(const AnalyzeArgs& a, Run& run, std::ostream& out, std::ostream& err) {
    const Dataset ds = load_dataset(a.dataset);
    const fs::path dir(a.out);
    fs::create_directories(dir);
    std::vector<std::string> written;
    auto emit = [&](const std::string& name, const std::string& text) {
        write_text_file((dir / name).string(), text);
        written.push_back((dir / name).string());
    };

    // EFD dynamics per class.
    std::vector<analysis::EfdSeries> series;
    std::ostringstream efd;
    efd << "class,bin_start_ms,bin_end_ms,efd\n";
    for (int c = 0; c < kNumElementClasses; ++c) {
        auto se = analysis::efd_time_series(ds, ElementClass(c), a.bin_ms, a.window_ms);
        bool present = false;
        for (std::size_t b = 0; b < se.values.size(); ++b) {
            efd << to_char(ElementClass(c)) << ',' << csv_number(double(b) * a.bin_ms) << ','
                << csv_number(double(b + 1) * a.bin_ms) << ',' << (se.values[b] ? csv_number(*se.values[b]) : "")
                << '\n';
            present = present || se.values[b].has_value();
        }
        if (present) series.push_back(std::move(se));
    }
    emit("efd_series.csv", efd.str());

    // Clustering of the dynamics curves.
    json clusters;
    clusters["k"] = a.k;
    try {
        auto cl = analysis::cluster_dynamics(series, a.k);
        json labels = json::object();
        for (std::size_t i = 0; i < series.size(); ++i)
            labels[std::string(1, to_char(series[i].element_class))] = cl.labels[i];
        clusters["labels"] = labels;
        clusters["inertia"] = cl.inertia;
    } catch (const Error& e) {
        clusters["skipped"] = e.what();
        err << "warning: clustering skipped: " << e.what() << "\n";
    }
    emit("clusters.json", clusters.dump(2) + "\n");

    // Transition matrices over the whole window and the early/middle/late phases.
    std::vector<analysis::LabelSequence> sequences;
    for (const auto& p : ds.scanpaths) sequences.push_back(analysis::label_sequence(p, ds.stimulus(p.stimulus_id)));
    analysis::TransitionOptions topts;
    topts.include_background = a.include_background;
    emit("transitions_all.csv", matrix_csv(analysis::transition_matrix(sequences, topts)));
    for (auto [t0, t1] : {std::pair{0.0, 2000.0}, std::pair{2000.0, 5000.0}, std::pair{5000.0, 10000.0}}) {
        auto w = topts;
        w.window_ms = {t0, t1};
        emit("transitions_" + std::to_string(int(t0)) + "-" + std::to_string(int(t1)) + ".csv",
             matrix_csv(analysis::transition_matrix(sequences, w)));
    }

    // Viewer consistency.
    std::vector<std::string> viewers;
    for (const auto& p : ds.scanpaths) viewers.push_back(p.viewer_id);
    std::sort(viewers.begin(), viewers.end());
    viewers.erase(std::unique(viewers.begin(), viewers.end()), viewers.end());
    if (viewers.size() >= 2) {
        auto rep = analysis::viewer_consistency(ds, viewers, topts);
        emit("viewer_ss.csv", viewer_matrix_csv(rep.viewers, rep.sequence_score));
        emit("viewer_cc.csv", viewer_matrix_csv(rep.viewers, rep.transition_cc));
    } else {
        err << "warning: viewer consistency needs at least two viewers\n";
    }

    run.inputs = {a.dataset};
    run.outputs = written;
    run.write_manifest(manifest_in(a.out));
    out << "wrote " << written.size() << " files to " << a.out << "\n";
    return 0;
}

// ---------------------------------------------------------------------------------------------

struct MapArgs {
    int grid = 256;
    std::vector<double> boundaries{500.0, 2000.0, 5000.0};
    std::string first_slice = "center", source = "train-prior";
    double blend = 0.5, center_sigma = 0.25, floor_eps = 1e-6;

    pipeline::MapOptions options() const {
        pipeline::MapOptions m;
        m.grid_width = grid;
        m.volume.boundaries_ms = boundaries;
        m.volume.first_slice = parse_first_slice(first_slice);
        m.volume.center_blend = blend;
        m.volume.center_sigma_frac = center_sigma;
        m.volume.floor_eps = floor_eps;
        m.source = pipeline::parse_map_source(source);
        return m;
    }

    void add_to(CLI::App* sub) {
        sub->add_option("--grid", grid, "Grid width in cells (height follows the aspect ratio)")
            ->capture_default_str()
            ->check(CLI::PositiveNumber);
        sub->add_option("--boundaries", boundaries, "Slice end times in ms")->delimiter(',')->capture_default_str();
        sub->add_option("--first-slice", first_slice, "First slice: center or mde")
            ->capture_default_str()
            ->check(CLI::IsMember({"center", "mde"}));
        sub->add_option("--blend", blend, "Centre-bias weight in the first slice")->capture_default_str();
        sub->add_option("--center-sigma", center_sigma, "Centre-bias sigma as a fraction of the grid")
            ->capture_default_str();
        sub->add_option("--floor", floor_eps, "Floor for zero cells, relative to slice mass")->capture_default_str();
        sub->add_option("--source", source, "Class values: train-prior or self")
            ->capture_default_str()
            ->check(CLI::IsMember({"train-prior", "self"}));
    }
};

struct BuildMapsArgs {
    std::string dataset, out, split = "eval";
    double window_ms = 5000.0;
    MapArgs maps;
};

int cmd_build_maps(const BuildMapsArgs& a, Run& run, std::ostream& out, std::ostream& err) {
    Dataset ds = load_dataset(a.dataset);
    if (ds.split.empty()) ds = ingest::split_alphabetic(std::move(ds));
    const auto role = parse_split_filter(a.split);
    std::vector<std::string> ids;
    if (role) {
        ids = pipeline::stimuli_with_role(ds, *role);
    } else {
        for (const auto& s : ds.stimuli) ids.push_back(s.stimulus_id);
        std::sort(ids.begin(), ids.end());
    }
    if (ids.empty()) throw Error("no stimuli in split '" + a.split + "'");

    std::vector<std::string> warnings;
    auto built = pipeline::build_maps(ds, ids, a.maps.options(), a.out, &warnings);
    print_warnings(warnings, err);
    auto cfg = sampler::fit_sampler_config(ds, a.window_ms);
    const std::string cfg_path = (fs::path(a.out) / "sampler_config.json").string();
    write_json_file(cfg_path, json(cfg));

    run.inputs = {a.dataset};
    for (const auto& id : ids) run.outputs.push_back((fs::path(a.out) / id).string());
    run.outputs.push_back(cfg_path);
    run.write_manifest(manifest_in(a.out));
    out << "built " << built.size() << " volumes in " << a.out << "\n";
    return 0;
}

// ---------------------------------------------------------------------------------------------

struct SampleArgs {
    std::string volume, config, out;
    std::size_t n = 17;
    std::uint64_t seed = 0;
};

std::vector<fs::path> volume_dirs(const fs::path& root) {
    if (fs::exists(root / "volume.json")) return {root};
    std::vector<fs::path> dirs;
    if (fs::is_directory(root))
        for (const auto& e : fs::directory_iterator(root))
            if (e.is_directory() && fs::exists(e.path() / "volume.json")) dirs.push_back(e.path());
    std::sort(dirs.begin(), dirs.end());
    if (dirs.empty()) throw Error("no attention volume found under " + root.string());
    return dirs;
}

int cmd_sample(const SampleArgs& a, Run& run, std::ostream& out, std::ostream&) {
    sampler::SamplerConfig cfg = a.config.empty() ? sampler::SamplerConfig{} : sampler::load_config(a.config);
    std::vector<Scanpath> paths;
    for (const auto& dir : volume_dirs(a.volume)) {
        auto stored = read_volume(dir.string());
        std::string id = stored.stimulus.stimulus_id.empty() ? dir.filename().string() : stored.stimulus.stimulus_id;
        const Grid g = stored.volume.grid();
        sampler::PixelFrame frame{id, stored.stimulus.width > 0 ? stored.stimulus.width : g.width,
                                  stored.stimulus.height > 0 ? stored.stimulus.height : g.height};
        cfg.seed = pipeline::stimulus_seed(a.seed, id);
        auto generated = sampler::generate_scanpaths(stored.volume, cfg, frame, a.n);
        paths.insert(paths.end(), generated.begin(), generated.end());
    }
    save_scanpaths(a.out, paths);
    run.inputs = {a.volume};
    if (!a.config.empty()) run.inputs.push_back(a.config);
    run.outputs = {a.out};
    run.write_manifest(manifest_next_to(a.out));
    out << "sampled " << paths.size() << " scanpaths\n";
    return 0;
}

// ---------------------------------------------------------------------------------------------

struct EvalArgs {
    std::string pred, truth, out, csv, method = "prediction", split = "eval", volumes;
    std::vector<std::string> metrics{"ss", "scanmatch", "dtw", "stde", "multimatch"};
    std::vector<std::string> agg{"mean", "best"};
    bool human = false, no_pairs = false;
    double window_ms = 5000.0, saliency_sigma = 35.0;
    int stde_k = 3;
    int saliency_slice = -1;
};

metrics::EvalOptions eval_options(const std::vector<std::string>& metric_names, const std::vector<std::string>& agg,
                                  double window_ms) {
    metrics::EvalOptions o;
    o.metrics.clear();
    for (const auto& m : metric_names) o.metrics.push_back(metrics::parse_metric(m));
    o.modes.clear();
    for (const auto& m : agg) o.modes.push_back(metrics::parse_agg_mode(m));
    o.window_ms = window_ms;
    return o;
}

std::string sibling_csv(const std::string& report_path) {
    fs::path p(report_path);
    return p.replace_extension(".csv").string();
}

int cmd_eval(const EvalArgs& a, Run& run, std::ostream& out, std::ostream&) {
    if (a.pred.empty() && !a.human) throw Error("eval needs --pred or --human");
    const Dataset truth = load_dataset(a.truth);
    auto opts = eval_options(a.metrics, a.agg, a.window_ms);
    opts.human_baseline = a.human;
    opts.include_pairs = !a.no_pairs;
    opts.split = parse_split_filter(a.split);
    opts.params.stde.k = a.stde_k;

    const std::vector<Scanpath> preds = a.pred.empty() ? std::vector<Scanpath>{} : load_scanpaths(a.pred);
    auto report = metrics::evaluate(preds, truth, opts);
    json j = metrics::report_to_json(report);

    if (!a.volumes.empty()) {
        std::map<std::string, AttentionMap> maps;
        double window = a.window_ms;
        for (const auto& dir : volume_dirs(a.volumes)) {
            auto stored = read_volume(dir.string());
            std::string id = stored.stimulus.stimulus_id.empty() ? dir.filename().string() : stored.stimulus.stimulus_id;
            if (!truth.find_stimulus(id)) continue;
            const auto& v = stored.volume;
            std::size_t k = a.saliency_slice < 0 ? v.slices.size() - 1 : std::size_t(a.saliency_slice);
            if (k >= v.slices.size()) throw Error("saliency slice index out of range for volume " + dir.string());
            maps.emplace(id, v.slices[k]);
            window = v.boundaries_ms[k];
        }
        auto sal = metrics::evaluate_saliency(maps, truth, window, a.saliency_sigma);
        j["saliency"] = {{"nss", sal.nss}, {"cc", sal.cc}, {"kl", sal.kl}, {"sim", sal.sim},
                         {"stimuli", sal.stimuli}, {"window_ms", window}, {"sigma_px", a.saliency_sigma}};
        run.inputs.push_back(a.volumes);
    }

    const std::string csv = a.csv.empty() ? sibling_csv(a.out) : a.csv;
    write_json_file(a.out, j);
    write_text_file(csv, metrics::report_to_csv(report, a.method));
    run.inputs.insert(run.inputs.begin(), a.truth);
    if (!a.pred.empty()) run.inputs.insert(run.inputs.begin(), a.pred);
    run.outputs = {a.out, csv};
    run.write_manifest(manifest_next_to(a.out));
    out << "evaluated " << report.stimuli.size() << " stimuli\n";
    return 0;
}

// ---------------------------------------------------------------------------------------------

struct RenderArgs {
    std::string dataset, stimulus, paths, image, out;
    std::vector<std::string> viewers;
    double radius_scale = 1.0;
    bool no_labels = false;
};

int cmd_render(const RenderArgs& a, Run& run, std::ostream& out, std::ostream&) {
    const Dataset ds = load_dataset(a.dataset);
    const Stimulus& s = ds.stimulus(a.stimulus);
    std::vector<Scanpath> source = a.paths.empty() ? ds.scanpaths : load_scanpaths(a.paths);
    std::vector<Scanpath> selected;
    for (auto& p : source)
        if (p.stimulus_id == s.stimulus_id &&
            (a.viewers.empty() || std::find(a.viewers.begin(), a.viewers.end(), p.viewer_id) != a.viewers.end()))
            selected.push_back(std::move(p));
    const std::string image = a.image.empty() ? s.image : a.image;
    render::render_overlay(image, s, selected, a.out, {a.radius_scale, !a.no_labels});

    run.inputs = {a.dataset};
    if (!a.paths.empty()) run.inputs.push_back(a.paths);
    if (!image.empty() && fs::exists(image)) run.inputs.push_back(image);
    run.outputs = {a.out};
    run.write_manifest(manifest_next_to(a.out));
    out << "rendered " << selected.size() << " scanpaths\n";
    return 0;
}

// ---------------------------------------------------------------------------------------------

struct FixturesArgs {
    std::string spec, out;
    std::uint64_t seed = 0;
};

int cmd_fixtures(const FixturesArgs& a, Run& run, std::ostream& out, std::ostream&) {
    const Dataset ds = fixtures::gen_fixtures(fixtures::load_fixture_spec(a.spec), a.seed);
    save_dataset(a.out, ds);
    run.inputs = {a.spec};
    run.outputs = {a.out};
    run.write_manifest(manifest_next_to(a.out));
    out << "generated " << ds.stimuli.size() << " stimuli, " << ds.scanpaths.size() << " scanpaths\n";
    return 0;
}

// ---------------------------------------------------------------------------------------------

struct PipelineArgs {
    std::string dataset, out;
    std::uint64_t seed = 7;
    std::size_t n = 0;
    double window_ms = 5000.0, fovea = 0.15;
    std::vector<std::string> metrics{"ss", "scanmatch", "dtw", "stde", "multimatch"};
    std::vector<std::string> agg{"mean", "best"};
    MapArgs maps;
};

int cmd_pipeline(const PipelineArgs& a, Run& run, std::ostream& out, std::ostream& err) {
    pipeline::PipelineOptions opts;
    opts.seed = a.seed;
    opts.window_ms = a.window_ms;
    if (a.n > 0) opts.paths_per_stimulus = a.n;
    opts.fovea_sigma_frac = a.fovea;
    opts.maps = a.maps.options();
    opts.eval = eval_options(a.metrics, a.agg, a.window_ms);

    auto result = pipeline::run_pipeline(load_dataset(a.dataset), opts, a.out);
    print_warnings(result.warnings, err);
    run.inputs = {a.dataset};
    for (const char* name : {"maps", "sampler_config.json", "paths.json", "report.json", "report.csv"})
        run.outputs.push_back((fs::path(a.out) / name).string());
    run.write_manifest(manifest_in(a.out));
    out << "pipeline: " << result.predictions.size() << " scanpaths on " << result.report.stimuli.size()
        << " stimuli\n";
    return 0;
}

std::string single_line(std::string s) {
    std::replace(s.begin(), s.end(), '\n', ' ');
    return s;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"scanviz: gaze analysis, attention maps and scanpath synthesis for visualisations"};
    app.name("scanviz");
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);

    IngestArgs ia;
    auto* ingest_cmd = app.add_subcommand("ingest", "Import raw gaze and annotations into a dataset");
    ingest_cmd->add_option("--gaze", ia.gaze, "Gaze sample CSV")->required();
    ingest_cmd->add_option("--ann", ia.ann, "Element annotation JSON")->required();
    ingest_cmd->add_option("--stimuli", ia.stimuli, "Stimulus list JSON")->required();
    ingest_cmd->add_option("--out", ia.out, "Output dataset JSON")->required();
    ingest_cmd->add_option("--dispersion", ia.dispersion, "IDT dispersion threshold in px")->capture_default_str();
    ingest_cmd->add_option("--min-dur", ia.min_dur, "IDT minimum fixation duration in ms")->capture_default_str();
    ingest_cmd->add_option("--merge-table", ia.merge_table, "JSON map from raw class names to class letters");
    ingest_cmd->add_option("--columns", ia.columns, "JSON map from canonical to exported column names");
    ingest_cmd->add_option("--split", ia.split, "Train:eval ratio")->capture_default_str();

    AnalyzeArgs aa;
    auto* analyze_cmd = app.add_subcommand("analyze", "EFD dynamics, transitions, clusters, viewer consistency");
    analyze_cmd->add_option("--dataset", aa.dataset, "Dataset JSON")->required();
    analyze_cmd->add_option("--out", aa.out, "Output directory")->required();
    analyze_cmd->add_option("--bin", aa.bin_ms, "EFD bin width in ms")->capture_default_str();
    analyze_cmd->add_option("--window", aa.window_ms, "EFD window in ms")->capture_default_str();
    analyze_cmd->add_option("--k", aa.k, "Number of dynamics clusters")->capture_default_str();
    analyze_cmd->add_flag("--include-background", aa.include_background, "Keep '_' in transition matrices");

    BuildMapsArgs ba;
    auto* maps_cmd = app.add_subcommand("build-maps", "Build multi-duration element attention volumes");
    maps_cmd->add_option("--dataset", ba.dataset, "Dataset JSON")->required();
    maps_cmd->add_option("--out", ba.out, "Output directory")->required();
    maps_cmd->add_option("--split", ba.split, "Stimuli to build: eval, train or all")
        ->capture_default_str()
        ->check(CLI::IsMember({"eval", "train", "all"}));
    maps_cmd->add_option("--window", ba.window_ms, "Viewing window for the sampler fit in ms")->capture_default_str();
    ba.maps.add_to(maps_cmd);

    SampleArgs sa;
    auto* sample_cmd = app.add_subcommand("sample", "Generate scanpaths from attention volumes");
    sample_cmd->add_option("--volume", sa.volume, "Volume directory, or a directory of volumes")->required();
    sample_cmd->add_option("--config", sa.config, "Sampler config JSON");
    sample_cmd->add_option("--n", sa.n, "Scanpaths per stimulus")->capture_default_str()->check(CLI::PositiveNumber);
    sample_cmd->add_option("--seed", sa.seed, "Random seed")->required();
    sample_cmd->add_option("--out", sa.out, "Output scanpaths JSON")->required();

    EvalArgs ea;
    auto* eval_cmd = app.add_subcommand("eval", "Score predicted scanpaths against a dataset");
    eval_cmd->add_option("--pred", ea.pred, "Predicted scanpaths JSON");
    eval_cmd->add_option("--truth", ea.truth, "Ground-truth dataset JSON")->required();
    eval_cmd->add_option("--metrics", ea.metrics, "ss, scanmatch, dtw, stde, multimatch")
        ->delimiter(',')
        ->capture_default_str()
        ->check(CLI::IsMember({"ss", "scanmatch", "dtw", "stde", "multimatch"}));
    eval_cmd->add_option("--agg", ea.agg, "mean, best, hungarian")
        ->delimiter(',')
        ->capture_default_str()
        ->check(CLI::IsMember({"mean", "best", "hungarian"}));
    eval_cmd->add_option("--out", ea.out, "Report JSON")->required();
    eval_cmd->add_option("--csv", ea.csv, "Report CSV (default: next to the JSON report)");
    eval_cmd->add_option("--method", ea.method, "Method name in the CSV row")->capture_default_str();
    eval_cmd->add_flag("--human", ea.human, "Human baseline: truths against truths, self-pairs excluded");
    eval_cmd->add_flag("--no-pairs", ea.no_pairs, "Omit per-pair scores from the report");
    eval_cmd->add_option("--window", ea.window_ms, "Viewing window in ms")->capture_default_str();
    eval_cmd->add_option("--split", ea.split, "Stimuli to score: eval, train or all")
        ->capture_default_str()
        ->check(CLI::IsMember({"eval", "train", "all"}));
    eval_cmd->add_option("--stde-k", ea.stde_k, "sTDE embedding length")->capture_default_str();
    eval_cmd->add_option("--volumes", ea.volumes, "Attention volumes to score as saliency maps");
    eval_cmd->add_option("--saliency-slice", ea.saliency_slice, "Volume slice to score (-1: last)")
        ->capture_default_str();
    eval_cmd->add_option("--saliency-sigma", ea.saliency_sigma, "Ground-truth blur sigma in px")
        ->capture_default_str();

    RenderArgs ra;
    auto* render_cmd = app.add_subcommand("render", "SVG overlay of scanpaths on a stimulus");
    render_cmd->add_option("--dataset", ra.dataset, "Dataset JSON")->required();
    render_cmd->add_option("--stimulus", ra.stimulus, "Stimulus id")->required();
    render_cmd->add_option("--paths", ra.paths, "Scanpaths JSON (default: the dataset's own)");
    render_cmd->add_option("--image", ra.image, "Stimulus bitmap (default: the dataset's image path)");
    render_cmd->add_option("--viewers", ra.viewers, "Only these viewers")->delimiter(',');
    render_cmd->add_option("--radius-scale", ra.radius_scale, "Circle radius per sqrt(ms)")->capture_default_str();
    render_cmd->add_flag("--no-labels", ra.no_labels, "Omit fixation numbers");
    render_cmd->add_option("--out", ra.out, "Output SVG")->required();

    FixturesArgs fa;
    auto* fixtures_cmd = app.add_subcommand("fixtures", "Generate a synthetic dataset from a fixture spec");
    fixtures_cmd->add_option("--spec", fa.spec, "Fixture spec JSON")->required();
    fixtures_cmd->add_option("--seed", fa.seed, "Random seed")->required();
    fixtures_cmd->add_option("--out", fa.out, "Output dataset JSON")->required();

    PipelineArgs pa;
    auto* pipeline_cmd = app.add_subcommand("pipeline", "build-maps, sample and eval in one run");
    pipeline_cmd->add_option("--dataset", pa.dataset, "Dataset JSON")->required();
    pipeline_cmd->add_option("--out", pa.out, "Output directory")->required();
    pipeline_cmd->add_option("--seed", pa.seed, "Random seed")->capture_default_str();
    pipeline_cmd->add_option("--n", pa.n, "Scanpaths per stimulus (0: as many as human viewers)")
        ->capture_default_str();
    pipeline_cmd->add_option("--window", pa.window_ms, "Viewing window in ms")->capture_default_str();
    pipeline_cmd->add_option("--fovea", pa.fovea, "Foveal mask sigma as a fraction of the grid")->capture_default_str();
    pipeline_cmd->add_option("--metrics", pa.metrics, "Scanpath metrics")
        ->delimiter(',')
        ->capture_default_str()
        ->check(CLI::IsMember({"ss", "scanmatch", "dtw", "stde", "multimatch"}));
    pipeline_cmd->add_option("--agg", pa.agg, "Aggregations")
        ->delimiter(',')
        ->capture_default_str()
        ->check(CLI::IsMember({"mean", "best", "hungarian"}));
    pa.maps.add_to(pipeline_cmd);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        const CLI::App* target = &app;
        for (const auto* sub : app.get_subcommands()) target = sub;
        out << target->help();
        return 0;
    } catch (const CLI::CallForVersion&) {
        out << kVersion << "\n";
        return 0;
    } catch (const CLI::ParseError& e) {
        const CLI::App* target = &app;
        for (const auto* sub : app.get_subcommands()) target = sub;
        err << "error: " << single_line(e.what()) << "\n" << target->help();
        return 2;
    }

    CLI::App* sub = app.get_subcommands().front();
    Run r;
    r.command = "scanviz " + join(args, " ");
    r.config = config_snapshot(*sub);
    try {
        if (sub == ingest_cmd) return cmd_ingest(ia, r, out, err);
        if (sub == analyze_cmd) return cmd_analyze(aa, r, out, err);
        if (sub == maps_cmd) return cmd_build_maps(ba, r, out, err);
        if (sub == sample_cmd) {
            r.seed = sa.seed;
            return cmd_sample(sa, r, out, err);
        }
        if (sub == eval_cmd) return cmd_eval(ea, r, out, err);
        if (sub == render_cmd) return cmd_render(ra, r, out, err);
        if (sub == fixtures_cmd) {
            r.seed = fa.seed;
            return cmd_fixtures(fa, r, out, err);
        }
        if (sub == pipeline_cmd) {
            r.seed = pa.seed;
            return cmd_pipeline(pa, r, out, err);
        }
    } catch (const std::exception& e) {
        err << "error: " << single_line(e.what()) << "\n";
        return 1;
    }
    return 2;
}

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return run(args, std::cout, std::cerr);
}

}  // namespace scanviz::cli
