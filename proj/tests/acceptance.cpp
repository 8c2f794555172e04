// Acceptance runner: one PASS/FAIL line per criterion, non-zero exit when any criterion fails.
// The dataset-conditional criterion runs only when SCANVIZ_MASSVIS_DIR points at a dataset.

#include "oracles.hpp"
#include "scanviz/analysis.hpp"
#include "scanviz/attnmap.hpp"
#include "scanviz/core.hpp"
#include "scanviz/fixtures.hpp"
#include "scanviz/ingest.hpp"
#include "scanviz/json_io.hpp"
#include "scanviz/metrics/alignment.hpp"
#include "scanviz/metrics/evaluate.hpp"
#include "scanviz/metrics/hungarian.hpp"
#include "scanviz/metrics/trajectory.hpp"
#include "scanviz/pipeline.hpp"
#include "scanviz/sampler.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iomanip>
#include <iostream>
#include <sstream>

using namespace scanviz;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    enum Status { Pass, Fail, Skipped } status = Pass;
    std::string detail;
};

// Collects failed checks with a short reason; the first few are reported.
struct Checker {
    std::size_t checks = 0, failures = 0;
    std::vector<std::string> reasons;

    void expect(bool ok, const std::string& what) {
        ++checks;
        if (ok) return;
        ++failures;
        if (reasons.size() < 3) reasons.push_back(what);
    }
    Outcome outcome(const std::string& summary) const {
        std::ostringstream os;
        os << summary << "; " << checks << " checks";
        if (failures > 0) {
            os << ", " << failures << " failed";
            for (const auto& r : reasons) os << " [" << r << "]";
        }
        return {failures == 0 ? Outcome::Pass : Outcome::Fail, os.str()};
    }
};

std::string fmt(double v, int precision = 4) {
    std::ostringstream os;
    os << std::setprecision(precision) << v;
    return os.str();
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// 1 ----------------------------------------------------------------------------------------------

Outcome metric_identity() {
    const auto t0 = std::chrono::steady_clock::now();
    Checker c;
    const Stimulus s = oracle::blank_stimulus(1024, 768);
    Rng rng(20240101);
    for (int i = 0; i < 200; ++i) {
        const auto p = oracle::random_scanpath(rng, 3 + int(rng.below(18)), s.width, s.height);
        const std::string tag = "path " + std::to_string(i);
        c.expect(std::abs(metrics::sequence_score(analysis::scanpath_to_string(p, s),
                                                  analysis::scanpath_to_string(p, s)) - 1.0) <= 1e-9, tag + " ss");
        c.expect(std::abs(metrics::scanmatch(p, p, s) - 1.0) <= 1e-9, tag + " scanmatch");
        c.expect(std::abs(metrics::stde(p, p, s) - 1.0) <= 1e-9, tag + " stde");
        for (double v : metrics::multimatch(p, p, s).as_array()) c.expect(std::abs(v - 1.0) <= 1e-9, tag + " multimatch");
        c.expect(metrics::dtw2d(p, p) == 0.0, tag + " dtw");
    }
    const double secs = seconds_since(t0);
    c.expect(secs < 10.0, "runtime " + fmt(secs) + " s");
    return c.outcome("200 paths in " + fmt(secs, 3) + " s");
}

// 2 ----------------------------------------------------------------------------------------------

Outcome oracle_equivalence() {
    const auto t0 = std::chrono::steady_clock::now();
    Checker c;
    Rng rng(4242);
    const std::string alphabet = "AXGLOTSD_";
    const double max_sub = 10.0;
    const Eigen::MatrixXd sub = metrics::scanmatch_substitution(3, 3, max_sub);

    for (int i = 0; i < 5000; ++i) {
        std::string a(1 + rng.below(6), ' '), b(1 + rng.below(6), ' ');
        for (auto& ch : a) ch = alphabet[rng.below(9)];
        for (auto& ch : b) ch = alphabet[rng.below(9)];
        const double fast = metrics::sequence_score(a, b), slow = oracle::sequence_score(a, b);
        c.expect(std::abs(fast - slow) <= 1e-12, "ss " + a + "/" + b);

        std::vector<int> ba(a.size()), bb(b.size());
        for (std::size_t k = 0; k < a.size(); ++k) ba[k] = int(alphabet.find(a[k]));
        for (std::size_t k = 0; k < b.size(); ++k) bb[k] = int(alphabet.find(b[k]));
        const double sm = metrics::scanmatch_sequences(ba, bb, sub, 0.0, max_sub);
        const double enumerated =
            oracle::best_alignment_score(int(ba.size()), int(bb.size()),
                                         [&](int x, int y) { return oracle::scanmatch_sub(ba[x], bb[y], 3, 3, max_sub); },
                                         0.0) /
            (max_sub * double(std::max(ba.size(), bb.size())));
        c.expect(std::abs(sm - enumerated) <= 1e-12, "scanmatch " + a + "/" + b);
    }

    for (int i = 0; i < 2000; ++i) {
        auto a = oracle::random_scanpath(rng, 1 + int(rng.below(5)), 500, 500);
        auto b = oracle::random_scanpath(rng, 1 + int(rng.below(5)), 500, 500);
        std::vector<Eigen::Vector2d> pa, pb;
        for (const auto& f : a.fixations) pa.emplace_back(f.x, f.y);
        for (const auto& f : b.fixations) pb.emplace_back(f.x, f.y);
        const double fast = metrics::dtw2d(a, b), slow = oracle::dtw(pa, pb);
        c.expect(std::abs(fast - slow) <= 1e-9 * std::max(1.0, slow), "dtw pair " + std::to_string(i));
    }

    for (int i = 0; i < 500; ++i) {
        const Eigen::Index n = 1 + Eigen::Index(rng.below(6));
        Eigen::MatrixXd cost(n, n);
        for (Eigen::Index k = 0; k < cost.size(); ++k)
            cost(k) = i % 2 ? double(rng.below(5)) : 100.0 * rng.uniform();  // half with heavy ties
        const double fast = metrics::hungarian(cost).cost, slow = oracle::assignment_cost(cost);
        c.expect(std::abs(fast - slow) <= 1e-9 * std::max(1.0, std::abs(slow)), "hungarian " + std::to_string(i));
    }

    const double secs = seconds_since(t0);
    c.expect(secs < 120.0, "runtime " + fmt(secs) + " s");
    return c.outcome("5000 string pairs, 2000 dtw pairs, 500 assignments in " + fmt(secs, 3) + " s");
}

// 3 ----------------------------------------------------------------------------------------------

Outcome exgaussian_recovery() {
    Checker c;
    const ExGaussianParams truth{124.06, 17.49, 89.37};
    Rng rng(31337);
    std::vector<double> xs(50000);
    for (auto& x : xs) x = sampler::sample_duration(truth, rng);
    const auto fit = sampler::fit_exgaussian(xs);
    const auto rel = [](double a, double b) { return std::abs(a - b) / std::abs(b); };
    c.expect(rel(fit.params.mu, truth.mu) <= 0.03, "mu " + fmt(fit.params.mu));
    c.expect(rel(fit.params.sigma, truth.sigma) <= 0.03, "sigma " + fmt(fit.params.sigma));
    c.expect(rel(fit.params.tau, truth.tau) <= 0.03, "tau " + fmt(fit.params.tau));
    const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / double(xs.size());
    c.expect(rel(mean, 213.43) <= 0.02, "mean " + fmt(mean));
    return c.outcome("fit mu " + fmt(fit.params.mu) + ", sigma " + fmt(fit.params.sigma) + ", tau " +
                     fmt(fit.params.tau) + ", sample mean " + fmt(mean));
}

// 4 ----------------------------------------------------------------------------------------------

Outcome mde_map_correctness() {
    Checker c;
    // Title band 400x50 (area 20000), data block 400x200 (area 80000): five title and four
    // data fixations per window give a title EFD exactly five times the data EFD.
    Stimulus s = oracle::blank_stimulus(400, 300, "fixture");
    s.annotations = {{"fixture", ElementClass::T, Box{0, 0, 400, 50}, 0},
                     {"fixture", ElementClass::D, Box{0, 100, 400, 200}, 0}};
    const Grid g{40, 30};
    std::vector<Fixation> f;
    for (double t0 : {0.0, 500.0, 2000.0}) {
        for (int k = 0; k < 5; ++k) f.push_back({20.0 + 70 * k, 25, t0 + 20 * k, 20});
        for (int k = 0; k < 4; ++k) f.push_back({50.0 + 90 * k, 200, t0 + 100 + 20 * k, 20});
    }

    const std::vector<std::pair<double, double>> windows{{0, 500}, {500, 2000}, {2000, 5000}};
    for (auto [t0, t1] : windows) {
        const auto raw = attnmap::element_efd_map(s, f, t0, t1, g);
        const double title = raw.values(0, 0), data = raw.values(29, 0);
        c.expect(title > 0 && std::abs(title / data - 5.0) <= 1e-14, "pre-floor ratio " + fmt(title / data, 17));
        for (int y = 0; y < g.height; ++y)
            for (int x = 0; x < g.width; ++x) {
                const Point p = to_pixel(x + 0.5, y + 0.5, s, g);
                const ElementClass cls = label_point(p.x(), p.y(), s);
                const double expected = cls == ElementClass::T ? title : cls == ElementClass::D ? data : 0.0;
                c.expect(raw.values(y, x) == expected, "cell " + std::to_string(x) + "," + std::to_string(y));
            }
    }

    attnmap::VolumeOptions opts;
    for (auto first : {attnmap::FirstSlice::Center, attnmap::FirstSlice::Mde}) {
        opts.first_slice = first;
        const auto vol = attnmap::build_volume(s, f, g, opts);
        for (std::size_t k = 0; k < vol.slices.size(); ++k) {
            c.expect(std::abs(vol.slices[k].sum() - 1.0) <= 1e-9, "slice sum " + fmt(vol.slices[k].sum(), 17));
            if (k == 0 && first == attnmap::FirstSlice::Center) continue;
            const double ratio = vol.slices[k].values(0, 0) / vol.slices[k].values(29, 0);
            c.expect(std::abs(ratio - 5.0) <= 1e-12, "normalised ratio " + fmt(ratio, 17));
        }
    }
    return c.outcome("title:data ratio 5 on every window, slices sum to 1");
}

// 5 ----------------------------------------------------------------------------------------------

AttentionVolume sparse_volume(Rng& rng, Grid g) {
    AttentionVolume v;
    v.boundaries_ms = {500, 2000, 5000};
    for (int i = 0; i < 3; ++i) {
        Raster<double> r = Raster<double>::Zero(g.height, g.width);
        // a few rectangular blobs, most of the grid at zero
        for (int b = 0; b < 3; ++b) {
            int x0 = int(rng.below(std::uint64_t(g.width - 4))), y0 = int(rng.below(std::uint64_t(g.height - 4)));
            r.block(y0, x0, 1 + Eigen::Index(rng.below(4)), 1 + Eigen::Index(rng.below(4))).array() += rng.uniform() + 0.1;
        }
        v.slices.emplace_back(r / r.sum(), true);
    }
    return v;
}

std::string paths_json(const std::vector<Scanpath>& paths) { return json(paths).dump(); }

Outcome sampler_soundness() {
    Checker c;
    const Grid g{32, 24};
    sampler::SamplerConfig cfg;
    cfg.lengths = sampler::LengthHistogram::from_lengths(std::vector<int>{8, 12, 16, 20, 25, 30});
    Rng vr(77);
    std::size_t fixations = 0, masked = 0, fallbacks = 0;
    int volume_index = 0;
    while (fixations < 10000) {
        const auto vol = sparse_volume(vr, g);
        Rng rng(derive_seed(5, "acceptance", std::uint64_t(volume_index++)));
        for (int n = 0; n < 10; ++n) {
            sampler::GenerationTrace trace;
            const auto p = sampler::generate_scanpath(vol, cfg, {"s", 640, 480}, rng, &trace);
            fallbacks += trace.mask_fallbacks;
            for (std::size_t k = 0; k < p.size(); ++k) {
                const auto& slice = vol.slices[std::size_t(trace.slice[k])];
                const Cell cell = trace.cells[k];
                double weight = slice.values(cell.cy, cell.cx);
                if (trace.masked[k]) {
                    ++masked;
                    weight *= sampler::foveal_mask(trace.mask_centers[k], g, cfg.fovea_sigma_frac).values(cell.cy, cell.cx);
                }
                c.expect(weight > 0, "zero-probability cell");
                c.expect(*vol.slice_at(p.fixations[k].onset_ms) == std::size_t(trace.slice[k]), "slice mismatch");
                if (k > 0) c.expect(p.fixations[k].onset_ms > p.fixations[k - 1].onset_ms, "onsets not increasing");
                ++fixations;
            }
        }
    }

    Rng vr2(78);
    const auto vol = sparse_volume(vr2, g);
    cfg.seed = 99;
    const std::string first = paths_json(sampler::generate_scanpaths(vol, cfg, {"s", 640, 480}, 40));
    const std::string second = paths_json(sampler::generate_scanpaths(vol, cfg, {"s", 640, 480}, 40));
    c.expect(first == second, "seeded output differs between runs");

    return c.outcome(std::to_string(fixations) + " fixations (" + std::to_string(masked) + " masked, " +
                     std::to_string(fallbacks) + " mask fallbacks), reproducible");
}

// 6 ----------------------------------------------------------------------------------------------

Outcome slice_allocation() {
    Checker c;
    const std::vector<double> b{500, 2000, 5000};
    auto a = sampler::allocate_slices(std::vector<double>{200, 200, 200}, b);
    c.expect(a.slice == std::vector<int>{0, 0, 0}, "[200,200,200]");
    a = sampler::allocate_slices(std::vector<double>{600, 1500, 3000}, b);
    c.expect(a.slice == std::vector<int>{0, 1, 2}, "[600,1500,3000]");
    c.expect(a.onsets_ms == std::vector<double>{0, 600, 2100}, "onsets");
    a = sampler::allocate_slices(std::vector<double>{5100, 100}, b);
    c.expect(a.realised_length == 1 && a.slice == std::vector<int>{0}, "onset 5100 dropped");
    return c.outcome("three hand cases");
}

// 7 ----------------------------------------------------------------------------------------------

Outcome analysis_recovery() {
    Checker c;

    // Transition rows from a known Markov table.
    const json table = json::parse(R"({"T": {"T": 0.3, "D": 0.5, "L": 0.2}, "D": {"D": 0.6, "X": 0.2, "L": 0.2},
                                        "L": {"L": 0.7, "D": 0.3}, "X": {"X": 0.5, "D": 0.3, "T": 0.2}})");
    json spec_json = json::parse(R"({
        "stimuli": [{"stimulus_id": "m", "width": 400, "height": 300, "elements": [
            {"class": "T", "box": [0, 0, 400, 50]}, {"class": "D", "box": [0, 60, 250, 200]},
            {"class": "L", "box": [260, 60, 140, 100]}, {"class": "X", "box": [0, 270, 400, 30]}]}],
        "replicate": 100, "viewers": 10, "window_ms": 3000, "durations": {"fixed": 150},
        "slices": [{"end_ms": 3000, "attractiveness": {"T": 1, "D": 1, "L": 1, "X": 1}}]})");
    spec_json["transitions"] = table;
    const Dataset markov = fixtures::gen_fixtures(fixtures::parse_fixture_spec(spec_json), 2024);
    std::vector<analysis::LabelSequence> seqs;
    for (const auto& p : markov.scanpaths) seqs.push_back(analysis::label_sequence(p, markov.stimulus(p.stimulus_id)));
    c.expect(seqs.size() == 1000, "path count " + std::to_string(seqs.size()));
    const auto m = analysis::transition_matrix(seqs);
    double worst = 0.0;
    for (auto& [from, row] : table.items())
        for (char to : m.labels) {
            const double expected = row.value(std::string(1, to), 0.0);
            const double err = std::abs(m.at(from[0], to) - expected);
            worst = std::max(worst, err);
            c.expect(err <= 0.05, std::string("row ") + from + " -> " + to + " off by " + fmt(err));
        }

    // EFD dynamics: eight classes following three attention templates over ten 1 s slices.
    const std::vector<std::vector<double>> templates = {{8, 6, 4, 2, 1, 1, 1, 1, 1, 1},
                                                        {1, 2, 4, 8, 8, 4, 2, 1, 1, 1},
                                                        {1, 1, 1, 1, 1, 2, 4, 6, 8, 8}};
    const std::string classes = "TAXDLGOS";
    const std::vector<int> truth = {0, 0, 1, 1, 1, 2, 2, 2};
    json dyn = json::parse(R"({"stimuli": [{"stimulus_id": "dyn", "width": 800, "height": 600, "elements": []}],
                               "replicate": 30, "viewers": 10, "window_ms": 10000, "durations": {"fixed": 125},
                               "slices": []})");
    for (std::size_t i = 0; i < classes.size(); ++i)
        dyn["stimuli"][0]["elements"].push_back(
            {{"class", std::string(1, classes[i])}, {"box", {200 * int(i % 4), 300 * int(i / 4), 200, 300}}});
    for (int slice = 0; slice < 10; ++slice) {
        json attract = json::object();
        for (std::size_t i = 0; i < classes.size(); ++i)
            attract[std::string(1, classes[i])] = templates[std::size_t(truth[i])][std::size_t(slice)];
        dyn["slices"].push_back({{"end_ms", 1000.0 * (slice + 1)}, {"attractiveness", attract}});
    }
    const Dataset curves = fixtures::gen_fixtures(fixtures::parse_fixture_spec(dyn), 7);
    std::vector<analysis::EfdSeries> series;
    for (char cls : classes) series.push_back(analysis::efd_time_series(curves, class_from_char(cls), 500, 10000));
    const auto clusters = analysis::cluster_dynamics(series, 3);
    for (std::size_t i = 0; i < truth.size(); ++i)
        for (std::size_t j = i + 1; j < truth.size(); ++j)
            c.expect((truth[i] == truth[j]) == (clusters.labels[i] == clusters.labels[j]),
                     std::string("classes ") + classes[i] + "," + classes[j] + " grouped wrongly");

    // Direct noisy template curves.
    Rng rng(12);
    std::vector<analysis::EfdSeries> noisy;
    std::vector<int> noisy_truth;
    for (int i = 0; i < 30; ++i) {
        const int t = i % 3;
        analysis::EfdSeries s{ElementClass::T, 1000, {}};
        for (double v : templates[std::size_t(t)]) s.values.push_back(v * (1 + 0.1 * rng.normal()));
        noisy.push_back(s);
        noisy_truth.push_back(t);
    }
    const auto nc = analysis::cluster_dynamics(noisy, 3);
    for (std::size_t i = 0; i < noisy.size(); ++i)
        for (std::size_t j = i + 1; j < noisy.size(); ++j)
            c.expect((noisy_truth[i] == noisy_truth[j]) == (nc.labels[i] == nc.labels[j]), "noisy curves grouped wrongly");

    return c.outcome("1000 paths, worst transition error " + fmt(worst, 3) + "; templates recovered");
}

// 8 ----------------------------------------------------------------------------------------------

Dataset load_external(const fs::path& dir) {
    if (fs::exists(dir / "dataset.json")) return load_dataset((dir / "dataset.json").string());
    for (const char* f : {"gaze.csv", "annotations.json", "stimuli.json"})
        if (!fs::exists(dir / f)) throw Error("expected dataset.json or gaze.csv + annotations.json + stimuli.json in " + dir.string());
    ingest::IngestOptions opts;
    if (fs::exists(dir / "columns.json")) opts.columns = ingest::load_column_mapping((dir / "columns.json").string());
    return ingest::ingest((dir / "gaze.csv").string(), (dir / "annotations.json").string(),
                          (dir / "stimuli.json").string(), opts)
        .dataset;
}

Outcome dataset_reproduction(const char* dir_env) {
    if (!dir_env || !*dir_env) return {Outcome::Skipped, "SCANVIZ_MASSVIS_DIR not set"};
    const auto t0 = std::chrono::steady_clock::now();
    Checker c;
    Dataset ds = load_external(dir_env);
    if (ds.split.empty()) ds = ingest::split_alphabetic(std::move(ds));
    const auto eval_ids = pipeline::stimuli_with_role(ds, SplitRole::Eval);
    std::ostringstream summary;

    // (a) element density maps over the first 3 s, scored as saliency.
    pipeline::MapOptions maps;
    maps.source = pipeline::MapSource::Self;
    maps.volume.boundaries_ms = {3000};
    maps.volume.first_slice = attnmap::FirstSlice::Mde;
    std::map<std::string, AttentionMap> predicted;
    for (auto& b : pipeline::build_maps(ds, eval_ids, maps)) predicted.emplace(b.stimulus_id, b.volume.slices[0]);
    const auto sal = metrics::evaluate_saliency(predicted, ds, 3000);
    c.expect(std::abs(sal.nss - 1.208) <= 0.05, "NSS " + fmt(sal.nss));
    c.expect(std::abs(sal.cc - 0.502) <= 0.03, "CC " + fmt(sal.cc));
    summary << "NSS " << fmt(sal.nss) << ", CC " << fmt(sal.cc);

    // (b) full sampler, 5 s.
    pipeline::PipelineOptions popts;
    popts.eval.metrics = {metrics::Metric::SequenceScore, metrics::Metric::Scanmatch};
    const auto result = pipeline::run_pipeline(ds, popts);
    const double ss = result.report.scores.at("ss").aggregates.at(metrics::AggMode::Mean);
    const double sm = result.report.scores.at("scanmatch").aggregates.at(metrics::AggMode::Mean);
    c.expect(ss >= 0.40 && ss <= 0.48, "sampler SS " + fmt(ss));
    c.expect(sm >= 0.34 && sm <= 0.42, "sampler Scanmatch " + fmt(sm));
    summary << "; sampler SS " << fmt(ss) << ", Scanmatch " << fmt(sm);

    // (c) human baseline.
    metrics::EvalOptions human;
    human.metrics = {metrics::Metric::SequenceScore};
    human.human_baseline = true;
    human.include_pairs = false;
    const double hss = metrics::evaluate({}, ds, human).scores.at("ss").aggregates.at(metrics::AggMode::Mean);
    c.expect(std::abs(hss - 0.584) <= 0.02, "human SS " + fmt(hss));
    summary << "; human SS " << fmt(hss);

    const double secs = seconds_since(t0);
    c.expect(secs < 600.0, "runtime " + fmt(secs) + " s");
    summary << "; " << eval_ids.size() << " eval stimuli in " << fmt(secs, 3) << " s";
    return c.outcome(summary.str());
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"metric identity", metric_identity},
        {"oracle equivalence", oracle_equivalence},
        {"ex-Gaussian recovery", exgaussian_recovery},
        {"element density map correctness", mde_map_correctness},
        {"sampler soundness", sampler_soundness},
        {"slice allocation", slice_allocation},
        {"analysis recovery on fixtures", analysis_recovery},
        {"dataset reproduction", [] { return dataset_reproduction(std::getenv("SCANVIZ_MASSVIS_DIR")); }},
    };
    bool all_ok = true;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {Outcome::Fail, std::string("exception: ") + e.what()};
        }
        const char* status = o.status == Outcome::Pass ? "PASS" : o.status == Outcome::Fail ? "FAIL" : "SKIPPED";
        all_ok = all_ok && o.status != Outcome::Fail;
        std::cout << "criterion " << i + 1 << " " << status << "  " << criteria[i].first << ": " << o.detail << " ("
                  << fmt(seconds_since(t0), 3) << " s)" << std::endl;
    }
    return all_ok ? 0 : 1;
}
