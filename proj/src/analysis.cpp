#include "scanviz/analysis.hpp"

#include "scanviz/attnmap.hpp"
#include "scanviz/core.hpp"
#include "scanviz/metrics/alignment.hpp"
#include "scanviz/metrics/saliency.hpp"
#include "scanviz/rng.hpp"

#include <cmath>
#include <limits>
#include <set>

namespace scanviz::analysis {

double compute_efd(const std::vector<Fixation>& fixations, const Stimulus& s, ElementClass c, double t0_ms,
                   double t1_ms) {
    if (!(t0_ms < t1_ms)) throw Error("compute_efd: t0 must precede t1");
    const double a = class_area(s, c);
    if (!(a > 0))
        throw Error(std::string("compute_efd: class ") + to_char(c) + " has no area on stimulus " + s.stimulus_id);
    std::size_t count = 0;
    for (const auto& f : fixations)
        if (f.onset_ms >= t0_ms && f.onset_ms < t1_ms && label_fixation(f, s) == c) ++count;
    return double(count) / a;
}

double compute_efd(const Dataset& ds, const Stimulus& s, ElementClass c, double t0_ms, double t1_ms) {
    return compute_efd(attnmap::all_fixations(ds, s.stimulus_id), s, c, t0_ms, t1_ms);
}

EfdSeries efd_time_series(const Dataset& ds, ElementClass c, double bin_ms, double window_ms) {
    if (!(bin_ms > 0) || !(window_ms > 0)) throw Error("efd_time_series: bin and window must be positive");
    const double bins_f = window_ms / bin_ms;
    const auto bins = std::size_t(std::llround(bins_f));
    if (std::abs(bins_f - double(bins)) > 1e-9) throw Error("efd_time_series: bin width must divide the window");

    EfdSeries series{c, bin_ms, std::vector<std::optional<double>>(bins)};
    std::vector<double> sums(bins, 0.0);
    std::size_t stimuli = 0;
    for (const auto& s : ds.stimuli) {
        if (!(class_area(s, c) > 0)) continue;
        ++stimuli;
        auto fixations = attnmap::all_fixations(ds, s.stimulus_id);
        for (std::size_t b = 0; b < bins; ++b)
            sums[b] += compute_efd(fixations, s, c, double(b) * bin_ms, double(b + 1) * bin_ms);
    }
    if (stimuli > 0)
        for (std::size_t b = 0; b < bins; ++b) series.values[b] = sums[b] / double(stimuli);
    return series;
}

namespace {

struct KMeansRun {
    std::vector<int> labels;
    double inertia = std::numeric_limits<double>::infinity();
};

KMeansRun lloyd(const Eigen::MatrixXd& x, int k, Rng& rng, int max_iter) {
    const Eigen::Index n = x.rows();
    Eigen::MatrixXd centers(k, x.cols());

    // k-means++ seeding
    centers.row(0) = x.row(Eigen::Index(rng.below(std::uint64_t(n))));
    Eigen::VectorXd d2(n);
    for (int c = 1; c < k; ++c) {
        for (Eigen::Index i = 0; i < n; ++i)
            d2(i) = (centers.topRows(c).rowwise() - x.row(i)).rowwise().squaredNorm().minCoeff();
        double total = d2.sum();
        Eigen::Index pick = 0;
        if (total > 0) {
            double r = rng.uniform() * total, acc = 0.0;
            for (pick = 0; pick < n - 1; ++pick) {
                acc += d2(pick);
                if (r < acc) break;
            }
        }
        centers.row(c) = x.row(pick);
    }

    KMeansRun run;
    run.labels.assign(std::size_t(n), -1);
    for (int iter = 0; iter < max_iter; ++iter) {
        bool changed = false;
        for (Eigen::Index i = 0; i < n; ++i) {
            Eigen::Index best;
            (centers.rowwise() - x.row(i)).rowwise().squaredNorm().minCoeff(&best);
            if (run.labels[i] != int(best)) run.labels[i] = int(best), changed = true;
        }
        if (!changed && iter > 0) break;
        Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, x.cols());
        Eigen::VectorXi counts = Eigen::VectorXi::Zero(k);
        for (Eigen::Index i = 0; i < n; ++i) {
            sums.row(run.labels[i]) += x.row(i);
            counts(run.labels[i]) += 1;
        }
        for (int c = 0; c < k; ++c) {
            if (counts(c) > 0) {
                centers.row(c) = sums.row(c) / double(counts(c));
                continue;
            }
            // empty cluster: move it to the point farthest from its centre
            Eigen::Index far = 0;
            double worst = -1.0;
            for (Eigen::Index i = 0; i < n; ++i) {
                double d = (x.row(i) - centers.row(run.labels[i])).squaredNorm();
                if (d > worst) worst = d, far = i;
            }
            centers.row(c) = x.row(far);
            run.labels[far] = c;
        }
    }
    run.inertia = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) run.inertia += (x.row(i) - centers.row(run.labels[i])).squaredNorm();
    return run;
}

std::vector<int> relabel_by_appearance(const std::vector<int>& labels) {
    std::map<int, int> remap;
    std::vector<int> out;
    for (int l : labels) {
        auto [it, inserted] = remap.try_emplace(l, int(remap.size()));
        out.push_back(it->second);
    }
    return out;
}

}  // namespace

Clustering kmeans(const Eigen::MatrixXd& data, int k, const KMeansOptions& opts) {
    if (k < 1) throw Error("kmeans: k must be ≥ 1");
    if (k > data.rows()) throw Error("kmeans: k exceeds the number of series");
    std::set<std::vector<double>> distinct;
    for (Eigen::Index i = 0; i < data.rows(); ++i) {
        Eigen::VectorXd row = data.row(i);
        distinct.insert(std::vector<double>(row.data(), row.data() + row.size()));
    }
    if (int(distinct.size()) < k) throw Error("kmeans: fewer distinct series than clusters");

    KMeansRun best;
    for (int r = 0; r < std::max(1, opts.restarts); ++r) {
        Rng rng(derive_seed(opts.seed, "kmeans", std::uint64_t(r)));
        KMeansRun run = lloyd(data, k, rng, opts.max_iterations);
        if (run.inertia < best.inertia) best = std::move(run);
    }
    return {relabel_by_appearance(best.labels), best.inertia};
}

Clustering cluster_dynamics(const std::vector<EfdSeries>& series, int k, const KMeansOptions& opts) {
    if (series.empty()) throw Error("cluster_dynamics: no series");
    const std::size_t len = series.front().values.size();
    Eigen::MatrixXd x(Eigen::Index(series.size()), Eigen::Index(len));
    for (std::size_t i = 0; i < series.size(); ++i) {
        if (series[i].values.size() != len) throw Error("cluster_dynamics: series lengths differ");
        for (std::size_t b = 0; b < len; ++b) x(Eigen::Index(i), Eigen::Index(b)) = series[i].values[b].value_or(0.0);
        auto row = x.row(Eigen::Index(i)).array();
        double mean = row.mean();
        double sd = std::sqrt((row - mean).square().mean());
        if (sd > 0) x.row(Eigen::Index(i)) = ((row - mean) / sd).matrix();
        else x.row(Eigen::Index(i)).setZero();
    }
    return kmeans(x, k, opts);
}

std::string scanpath_to_string(const Scanpath& p, const Stimulus& s) {
    std::string out;
    out.reserve(p.size());
    for (const auto& f : p.fixations) out += to_char(label_fixation(f, s));
    return out;
}

LabelSequence label_sequence(const Scanpath& p, const Stimulus& s) {
    LabelSequence seq{scanpath_to_string(p, s), {}};
    for (const auto& f : p.fixations) seq.onsets_ms.push_back(f.onset_ms);
    return seq;
}

double TransitionMatrix::at(char from, char to) const {
    auto i = labels.find(from), j = labels.find(to);
    if (i == std::string::npos || j == std::string::npos) throw Error("transition matrix has no such state");
    return probs(Eigen::Index(i), Eigen::Index(j));
}

TransitionMatrix transition_matrix(const std::vector<LabelSequence>& sequences, const TransitionOptions& opts) {
    if (sequences.empty()) throw Error("transition_matrix: no sequences");
    TransitionMatrix tm;
    tm.labels = std::string(kClassLetters.substr(0, kNumElementClasses));
    if (opts.include_background) tm.labels += '_';
    const auto n = Eigen::Index(tm.labels.size());
    tm.probs = Eigen::MatrixXd::Zero(n, n);

    for (const auto& seq : sequences) {
        if (opts.window_ms && seq.onsets_ms.size() != seq.letters.size())
            throw Error("transition_matrix: time window requires onsets for every letter");
        for (std::size_t k = 0; k + 1 < seq.letters.size(); ++k) {
            if (opts.window_ms) {
                double t = seq.onsets_ms[k];
                if (t < opts.window_ms->first || t >= opts.window_ms->second) continue;
            }
            auto i = tm.labels.find(seq.letters[k]), j = tm.labels.find(seq.letters[k + 1]);
            if (i == std::string::npos || j == std::string::npos) continue;
            tm.probs(Eigen::Index(i), Eigen::Index(j)) += 1.0;
        }
    }
    for (Eigen::Index r = 0; r < n; ++r) {
        double total = tm.probs.row(r).sum();
        if (total > 0) tm.probs.row(r) /= total;
    }
    return tm;
}

TransitionMatrix transition_matrix(const std::vector<std::string>& strings, const TransitionOptions& opts) {
    std::vector<LabelSequence> seqs;
    for (const auto& s : strings) seqs.push_back({s, {}});
    return transition_matrix(seqs, opts);
}

ConsistencyReport viewer_consistency(const Dataset& ds, const std::vector<std::string>& viewers,
                                     const TransitionOptions& opts) {
    if (viewers.size() < 2) throw Error("viewer_consistency: need at least two viewers");
    const auto n = Eigen::Index(viewers.size());
    const double nan = std::numeric_limits<double>::quiet_NaN();

    // viewer → stimulus → label sequence
    std::vector<std::map<std::string, LabelSequence>> strings(viewers.size());
    for (const auto& p : ds.scanpaths) {
        auto it = std::find(viewers.begin(), viewers.end(), p.viewer_id);
        if (it == viewers.end()) continue;
        strings[std::size_t(it - viewers.begin())][p.stimulus_id] = label_sequence(p, ds.stimulus(p.stimulus_id));
    }

    std::vector<std::optional<TransitionMatrix>> matrices(viewers.size());
    for (std::size_t v = 0; v < viewers.size(); ++v) {
        if (strings[v].empty()) continue;
        std::vector<LabelSequence> seqs;
        for (auto& [id, seq] : strings[v]) seqs.push_back(seq);
        matrices[v] = transition_matrix(seqs, opts);
    }

    ConsistencyReport rep{viewers, Eigen::MatrixXd::Constant(n, n, nan), Eigen::MatrixXd::Constant(n, n, nan),
                          Eigen::MatrixXi::Zero(n, n)};
    for (Eigen::Index a = 0; a < n; ++a)
        for (Eigen::Index b = a; b < n; ++b) {
            double ss = 0.0;
            int shared = 0;
            for (auto& [id, seq] : strings[std::size_t(a)]) {
                auto it = strings[std::size_t(b)].find(id);
                if (it == strings[std::size_t(b)].end() || seq.letters.empty() || it->second.letters.empty()) continue;
                ss += metrics::sequence_score(seq.letters, it->second.letters);
                ++shared;
            }
            rep.shared_stimuli(a, b) = rep.shared_stimuli(b, a) = shared;
            if (shared == 0) continue;
            rep.sequence_score(a, b) = rep.sequence_score(b, a) = ss / shared;
            try {
                double c = metrics::cc(matrices[std::size_t(a)]->probs.array(), matrices[std::size_t(b)]->probs.array());
                rep.transition_cc(a, b) = rep.transition_cc(b, a) = c;
            } catch (const Error&) {
                // constant transition matrix: correlation undefined
            }
        }
    return rep;
}

}  // namespace scanviz::analysis
