#include "scanviz/metrics/evaluate.hpp"

#include "scanviz/analysis.hpp"
#include "scanviz/attnmap.hpp"
#include "scanviz/core.hpp"
#include "scanviz/metrics/hungarian.hpp"
#include "scanviz/metrics/saliency.hpp"
#include "scanviz/parallel.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>

namespace scanviz::metrics {

std::string to_string(Metric m) {
    switch (m) {
        case Metric::SequenceScore: return "ss";
        case Metric::Scanmatch: return "scanmatch";
        case Metric::Dtw: return "dtw";
        case Metric::Stde: return "stde";
        case Metric::Multimatch: return "multimatch";
    }
    return "?";
}

std::string to_string(AggMode m) {
    switch (m) {
        case AggMode::Mean: return "mean";
        case AggMode::Best: return "best";
        case AggMode::Hungarian: return "hungarian";
    }
    return "?";
}

Metric parse_metric(const std::string& name) {
    for (Metric m : {Metric::SequenceScore, Metric::Scanmatch, Metric::Dtw, Metric::Stde, Metric::Multimatch})
        if (to_string(m) == name) return m;
    throw Error("unknown metric '" + name + "'");
}

AggMode parse_agg_mode(const std::string& name) {
    for (AggMode m : {AggMode::Mean, AggMode::Best, AggMode::Hungarian})
        if (to_string(m) == name) return m;
    throw Error("unknown aggregation '" + name + "'");
}

std::vector<std::string> score_names(Metric m) {
    if (m == Metric::Multimatch) return {"mm_shape", "mm_direction", "mm_length", "mm_position", "mm_duration"};
    return {to_string(m)};
}

Orientation orientation(const std::string& score_name) {
    return score_name == "dtw" ? Orientation::Distance : Orientation::Similarity;
}

namespace {

std::vector<double> collect(const Eigen::MatrixXd& t, Orientation o, AggMode mode, bool exclude_diagonal) {
    std::vector<double> out;
    auto defined = [&](Eigen::Index i, Eigen::Index j) { return !(exclude_diagonal && i == j) && std::isfinite(t(i, j)); };
    switch (mode) {
        case AggMode::Mean:
            for (Eigen::Index i = 0; i < t.rows(); ++i)
                for (Eigen::Index j = 0; j < t.cols(); ++j)
                    if (defined(i, j)) out.push_back(t(i, j));
            break;
        case AggMode::Best:
            for (Eigen::Index i = 0; i < t.rows(); ++i) {
                std::optional<double> best;
                for (Eigen::Index j = 0; j < t.cols(); ++j) {
                    if (!defined(i, j)) continue;
                    double v = t(i, j);
                    if (!best || (o == Orientation::Similarity ? v > *best : v < *best)) best = v;
                }
                if (best) out.push_back(*best);
            }
            break;
        case AggMode::Hungarian: {
            if (t.size() == 0) break;
            Eigen::MatrixXd cost(t.rows(), t.cols());
            double worst = 0.0;
            for (Eigen::Index i = 0; i < t.rows(); ++i)
                for (Eigen::Index j = 0; j < t.cols(); ++j)
                    if (defined(i, j)) {
                        cost(i, j) = o == Orientation::Similarity ? 1.0 - t(i, j) : t(i, j);
                        worst = std::max(worst, std::abs(cost(i, j)));
                    }
            const double blocked = 1.0 + 2.0 * worst * double(std::max(t.rows(), t.cols()));
            for (Eigen::Index i = 0; i < t.rows(); ++i)
                for (Eigen::Index j = 0; j < t.cols(); ++j)
                    if (!defined(i, j)) cost(i, j) = blocked;
            for (auto [i, j] : hungarian(cost).pairs)
                if (defined(i, j)) out.push_back(t(i, j));
            break;
        }
    }
    return out;
}

double mean_of(const std::vector<double>& v) {
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    return std::accumulate(v.begin(), v.end(), 0.0) / double(v.size());
}

}  // namespace

double aggregate(const Eigen::MatrixXd& table, Orientation o, AggMode mode, bool exclude_diagonal) {
    return mean_of(collect(table, o, mode, exclude_diagonal));
}

std::map<std::string, Eigen::MatrixXd> score_tables(const std::vector<Scanpath>& preds,
                                                    const std::vector<Scanpath>& truths, const Stimulus& s,
                                                    const std::vector<Metric>& metrics, const MetricParams& params) {
    const auto n = Eigen::Index(preds.size()), m = Eigen::Index(truths.size());
    const double nan = std::numeric_limits<double>::quiet_NaN();
    std::map<std::string, Eigen::MatrixXd> tables;
    for (Metric metric : metrics)
        for (const auto& name : score_names(metric)) tables[name] = Eigen::MatrixXd::Constant(n, m, nan);

    std::vector<std::string> pred_str, truth_str;
    for (const auto& p : preds) pred_str.push_back(analysis::scanpath_to_string(p, s));
    for (const auto& t : truths) truth_str.push_back(analysis::scanpath_to_string(t, s));

    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < m; ++j) {
            const Scanpath& a = preds[std::size_t(i)];
            const Scanpath& b = truths[std::size_t(j)];
            if (a.fixations.empty() || b.fixations.empty()) continue;
            for (Metric metric : metrics) {
                switch (metric) {
                    case Metric::SequenceScore:
                        tables["ss"](i, j) = sequence_score(pred_str[i], truth_str[j], params.sequence);
                        break;
                    case Metric::Scanmatch: tables["scanmatch"](i, j) = scanmatch(a, b, s, params.scanmatch); break;
                    case Metric::Dtw: tables["dtw"](i, j) = dtw2d(a, b); break;
                    case Metric::Stde:
                        if (int(a.size()) >= params.stde.k && int(b.size()) >= params.stde.k)
                            tables["stde"](i, j) = stde(a, b, s, params.stde);
                        break;
                    case Metric::Multimatch:
                        if (a.size() >= 2 && b.size() >= 2) {
                            auto mm = multimatch(a, b, s, params.multimatch);
                            tables["mm_shape"](i, j) = mm.shape;
                            tables["mm_direction"](i, j) = mm.direction;
                            tables["mm_length"](i, j) = mm.length;
                            tables["mm_position"](i, j) = mm.position;
                            tables["mm_duration"](i, j) = mm.duration;
                        }
                        break;
                }
            }
        }
    return tables;
}

namespace {

json config_json(const EvalOptions& o) {
    json metrics = json::array(), modes = json::array();
    for (auto m : o.metrics) metrics.push_back(to_string(m));
    for (auto m : o.modes) modes.push_back(to_string(m));
    const auto& p = o.params;
    return json{
        {"metrics", metrics},
        {"aggregation", modes},
        {"window_ms", o.window_ms},
        {"human_baseline", o.human_baseline},
        {"split", o.split ? (*o.split == SplitRole::Eval ? "eval" : "train") : "all"},
        {"sequence_score", {{"match", p.sequence.match}, {"mismatch", p.sequence.mismatch}, {"gap", p.sequence.gap},
                            {"normalisation", "matches / max(len)"}}},
        {"scanmatch", {{"grid_x", p.scanmatch.grid_x}, {"grid_y", p.scanmatch.grid_y},
                       {"max_sub", p.scanmatch.max_sub}, {"gap", p.scanmatch.gap}, {"time_bin", nullptr},
                       {"substitution", "max_sub * (1 - d / d_max)"}}},
        {"stde", {{"k", p.stde.k}, {"scale", p.stde.scale > 0 ? json(p.stde.scale) : json("stimulus diagonal")}}},
        {"multimatch", {{"amplitude_frac", p.multimatch.amplitude_frac}, {"direction_deg", p.multimatch.direction_deg},
                        {"duration_ms", p.multimatch.duration_ms}, {"simplify", p.multimatch.simplify}}},
    };
}

std::vector<Scanpath> truncated(const std::vector<const Scanpath*>& paths, double window_ms) {
    std::vector<Scanpath> out;
    for (const auto* p : paths) {
        Scanpath t = truncate_scanpath(*p, window_ms);
        if (!t.fixations.empty()) out.push_back(std::move(t));
    }
    return out;
}

struct StimulusResult {
    std::vector<Scanpath> preds, truths;
    std::map<std::string, Eigen::MatrixXd> tables;
};

}  // namespace

EvalReport evaluate(const std::vector<Scanpath>& predictions, const Dataset& truth, const EvalOptions& opts) {
    EvalReport report;
    report.config = config_json(opts);
    for (Metric m : opts.metrics)
        for (const auto& name : score_names(m)) report.score_order.push_back(name);

    auto in_split = [&](const std::string& id) {
        if (!opts.split || truth.split.empty()) return true;
        auto it = truth.split.find(id);
        return it != truth.split.end() && it->second == *opts.split;
    };

    std::map<std::string, std::vector<const Scanpath*>> preds_by_stimulus;
    if (opts.human_baseline) {
        for (const auto& s : truth.stimuli)
            if (in_split(s.stimulus_id)) report.stimuli.push_back(s.stimulus_id);
    } else {
        for (const auto& p : predictions) {
            if (!truth.find_stimulus(p.stimulus_id)) throw Error("prediction for unknown stimulus '" + p.stimulus_id + "'");
            preds_by_stimulus[p.stimulus_id].push_back(&p);
        }
        for (const auto& [id, paths] : preds_by_stimulus)
            if (in_split(id)) report.stimuli.push_back(id);
    }

    std::vector<StimulusResult> results(report.stimuli.size());
    parallel_for(report.stimuli.size(), [&](std::size_t k) {
        const std::string& id = report.stimuli[k];
        const Stimulus& s = truth.stimulus(id);
        StimulusResult& r = results[k];
        r.truths = truncated(truth.scanpaths_for(id), opts.window_ms);
        r.preds = opts.human_baseline ? r.truths : truncated(preds_by_stimulus[id], opts.window_ms);
        r.tables = score_tables(r.preds, r.truths, s, opts.metrics, opts.params);
    });

    for (const auto& name : report.score_order) {
        ScoreSummary summary;
        std::map<AggMode, std::vector<double>> pooled;
        for (std::size_t k = 0; k < results.size(); ++k) {
            const Eigen::MatrixXd& t = results[k].tables.at(name);
            for (AggMode mode : opts.modes) {
                auto v = collect(t, orientation(name), mode, opts.human_baseline);
                pooled[mode].insert(pooled[mode].end(), v.begin(), v.end());
            }
            for (Eigen::Index i = 0; i < t.rows(); ++i)
                for (Eigen::Index j = 0; j < t.cols(); ++j) {
                    if (opts.human_baseline && i == j) continue;
                    ++summary.pairs;
                    if (!std::isfinite(t(i, j))) ++summary.undefined;
                    if (opts.include_pairs)
                        report.pairs.push_back({report.stimuli[k], results[k].preds[std::size_t(i)].viewer_id,
                                                results[k].truths[std::size_t(j)].viewer_id, name, t(i, j)});
                }
        }
        for (AggMode mode : opts.modes) summary.aggregates[mode] = mean_of(pooled[mode]);
        report.scores[name] = summary;
    }
    return report;
}

json report_to_json(const EvalReport& r) {
    json scores = json::object();
    for (const auto& name : r.score_order) {
        const auto& s = r.scores.at(name);
        json js{{"pairs", s.pairs}, {"undefined_pairs", s.undefined},
                {"orientation", orientation(name) == Orientation::Similarity ? "higher-better" : "lower-better"}};
        for (auto [mode, v] : s.aggregates) js[to_string(mode)] = std::isfinite(v) ? json(v) : json(nullptr);
        scores[name] = js;
    }
    json pairs = json::array();
    for (const auto& p : r.pairs)
        pairs.push_back({{"stimulus_id", p.stimulus_id},
                         {"predicted_id", p.predicted_id},
                         {"truth_id", p.truth_id},
                         {"metric", p.metric},
                         {"value", std::isfinite(p.value) ? json(p.value) : json(nullptr)}});
    return json{{"config", r.config}, {"stimuli", r.stimuli}, {"scores", scores}, {"pairs", pairs}};
}

std::string report_to_csv(const EvalReport& r, const std::string& method) {
    const std::vector<std::pair<std::string, AggMode>> columns = {
        {"ss", AggMode::Mean},        {"ss", AggMode::Best},           {"scanmatch", AggMode::Mean},
        {"scanmatch", AggMode::Best}, {"stde", AggMode::Mean},         {"stde", AggMode::Best},
        {"dtw", AggMode::Mean},       {"dtw", AggMode::Best},          {"mm_shape", AggMode::Mean},
        {"mm_direction", AggMode::Mean}, {"mm_length", AggMode::Mean}, {"mm_position", AggMode::Mean},
        {"mm_duration", AggMode::Mean},
    };
    std::ostringstream head, row;
    head << "method";
    row << method;
    for (const auto& [name, mode] : columns) {
        head << ',' << (name.rfind("mm_", 0) == 0 ? name : name + "_" + to_string(mode));
        row << ',';
        auto it = r.scores.find(name);
        if (it == r.scores.end()) continue;
        auto a = it->second.aggregates.find(mode);
        if (a != it->second.aggregates.end() && std::isfinite(a->second)) row << std::setprecision(6) << a->second;
    }
    return head.str() + "\n" + row.str() + "\n";
}

SaliencyScores evaluate_saliency(const std::map<std::string, AttentionMap>& predictions, const Dataset& truth,
                                 double window_ms, double sigma_px) {
    SaliencyScores out;
    for (const auto& [id, pred] : predictions) {
        const Stimulus& s = truth.stimulus(id);
        std::vector<Fixation> fixations;
        for (const auto* p : truth.scanpaths_for(id))
            for (const auto& f : p->fixations)
                if (f.onset_ms < window_ms) fixations.push_back(f);
        const Grid g = pred.grid();
        FixationMap fm = attnmap::fixation_map(fixations, s, g);
        if (fm.count() == 0) continue;
        AttentionMap gt = attnmap::blur_to_saliency(fm, attnmap::sigma_in_cells(sigma_px, s, g));
        AttentionMap p(pred.values / pred.values.sum(), true);
        out.nss += nss(p, fm);
        out.cc += cc(p, gt);
        out.kl += kl_div(p, gt);
        out.sim += sim(p, gt);
        ++out.stimuli;
    }
    if (out.stimuli == 0) throw Error("evaluate_saliency: no stimulus has fixations in the window");
    const double n = double(out.stimuli);
    out.nss /= n, out.cc /= n, out.kl /= n, out.sim /= n;
    return out;
}

}  // namespace scanviz::metrics
