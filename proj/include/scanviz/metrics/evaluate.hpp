#pragma once

#include "scanviz/json_io.hpp"
#include "scanviz/metrics/alignment.hpp"
#include "scanviz/metrics/trajectory.hpp"
#include "scanviz/types.hpp"

#include <Eigen/Dense>

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace scanviz::metrics {

enum class Metric { SequenceScore, Scanmatch, Dtw, Stde, Multimatch };
enum class Orientation { Similarity, Distance };
enum class AggMode { Mean, Best, Hungarian };

std::string to_string(Metric m);
std::string to_string(AggMode m);
Metric parse_metric(const std::string& name);  // ss, scanmatch, dtw, stde, multimatch
AggMode parse_agg_mode(const std::string& name);  // mean, best, hungarian

/// Reported score columns; multimatch expands into five dimensions.
std::vector<std::string> score_names(Metric m);
Orientation orientation(const std::string& score_name);

/// Aggregates a predictions × truths score table. NaN entries are excluded.
///   Mean       mean over every defined pair
///   Best       per prediction (row) max for similarities, min for distances, then mean
///   Hungarian  optimal one-to-one pairing (cost = 1 − similarity or raw distance), then mean
/// With exclude_diagonal, pair (i, i) is skipped (truths compared against themselves).
double aggregate(const Eigen::MatrixXd& table, Orientation o, AggMode mode, bool exclude_diagonal = false);

struct MetricParams {
    SequenceScoreParams sequence;
    ScanmatchParams scanmatch;
    StdeParams stde;
    MultimatchParams multimatch;
};

/// Score tables for one stimulus, keyed by score name. Undefined pairs (e.g. a path
/// shorter than the sTDE embedding) hold NaN.
std::map<std::string, Eigen::MatrixXd> score_tables(const std::vector<Scanpath>& preds,
                                                    const std::vector<Scanpath>& truths, const Stimulus& s,
                                                    const std::vector<Metric>& metrics, const MetricParams& params);

struct EvalOptions {
    std::vector<Metric> metrics{Metric::SequenceScore, Metric::Scanmatch, Metric::Dtw, Metric::Stde,
                                Metric::Multimatch};
    std::vector<AggMode> modes{AggMode::Mean, AggMode::Best};
    MetricParams params;
    double window_ms = 5000.0;    // truths and predictions are truncated to this window
    bool human_baseline = false;  // truths vs truths, self-pairs excluded
    bool include_pairs = true;
    std::optional<SplitRole> split = SplitRole::Eval;  // restrict to stimuli of this role when a split exists
};

struct PairScore {
    std::string stimulus_id;
    std::string predicted_id;
    std::string truth_id;
    std::string metric;
    double value = 0.0;
};

struct ScoreSummary {
    std::map<AggMode, double> aggregates;
    std::size_t pairs = 0;
    std::size_t undefined = 0;
};

struct EvalReport {
    std::vector<std::string> score_order;
    std::map<std::string, ScoreSummary> scores;
    std::vector<PairScore> pairs;
    std::vector<std::string> stimuli;
    json config;
};

/// Pools every prediction/truth pair across stimuli: predictions are matched to the
/// truths of their stimulus; Best is taken per prediction, Hungarian per stimulus.
EvalReport evaluate(const std::vector<Scanpath>& predictions, const Dataset& truth, const EvalOptions& opts = {});

json report_to_json(const EvalReport& r);
/// One header row plus one row: mean/best per score, then the five Multimatch dimensions.
std::string report_to_csv(const EvalReport& r, const std::string& method = "prediction");

struct SaliencyScores {
    double nss = 0.0;
    double cc = 0.0;
    double kl = 0.0;
    double sim = 0.0;
    std::size_t stimuli = 0;
};

/// Predicted maps vs. fixations of `truth` with onset < window_ms: NSS on the fixation map,
/// CC/KL/SIM against its Gaussian blur (sigma_px in stimulus pixels). Means over stimuli.
SaliencyScores evaluate_saliency(const std::map<std::string, AttentionMap>& predictions, const Dataset& truth,
                                 double window_ms, double sigma_px = 35.0);

}  // namespace scanviz::metrics
