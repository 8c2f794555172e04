#pragma once

#include "scanviz/types.hpp"

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

namespace scanviz::analysis {

/// Element fixation density: fixations labelled `c` with onset in [t0, t1), per pixel of
/// the class's total region area. Throws when the class has no area on the stimulus.
double compute_efd(const std::vector<Fixation>& fixations, const Stimulus& s, ElementClass c, double t0_ms,
                   double t1_ms);

/// Pools the fixations of every scanpath on the stimulus.
double compute_efd(const Dataset& ds, const Stimulus& s, ElementClass c, double t0_ms, double t1_ms);

struct EfdSeries {
    ElementClass element_class = ElementClass::Background;
    double bin_ms = 0.0;
    std::vector<std::optional<double>> values;  // nullopt: no stimulus contains the class
};

/// Per-bin EFD averaged over the stimuli that contain the class.
EfdSeries efd_time_series(const Dataset& ds, ElementClass c, double bin_ms, double window_ms);

struct Clustering {
    std::vector<int> labels;  // cluster per series, numbered in order of first appearance
    double inertia = 0.0;
};

struct KMeansOptions {
    int restarts = 50;
    int max_iterations = 300;
    std::uint64_t seed = 0x5ca11ab1e;
};

/// Rows of `data` are observations. k-means++ seeding, best of `restarts` Lloyd runs.
Clustering kmeans(const Eigen::MatrixXd& data, int k, const KMeansOptions& opts = {});

/// Z-normalises each series (absent bins count as 0) and clusters the curves.
Clustering cluster_dynamics(const std::vector<EfdSeries>& series, int k, const KMeansOptions& opts = {});

std::string scanpath_to_string(const Scanpath& p, const Stimulus& s);

/// A labelled scanpath: one letter per fixation plus optional onsets for time filtering.
struct LabelSequence {
    std::string letters;
    std::vector<double> onsets_ms;
};

struct TransitionOptions {
    bool include_background = false;
    /// Only pairs whose source fixation onset lies in [t0, t1) are counted; requires onsets.
    std::optional<std::pair<double, double>> window_ms;
};

struct TransitionMatrix {
    std::string labels;  // row/column letters
    Eigen::MatrixXd probs;

    double at(char from, char to) const;
};

TransitionMatrix transition_matrix(const std::vector<LabelSequence>& sequences, const TransitionOptions& opts = {});
TransitionMatrix transition_matrix(const std::vector<std::string>& strings, const TransitionOptions& opts = {});

LabelSequence label_sequence(const Scanpath& p, const Stimulus& s);

struct ConsistencyReport {
    std::vector<std::string> viewers;
    Eigen::MatrixXd sequence_score;  // NaN where the pair shares no stimulus
    Eigen::MatrixXd transition_cc;   // NaN where absent or undefined (constant matrix)
    Eigen::MatrixXi shared_stimuli;
};

/// Pairwise mean Sequence Score over shared stimuli and Pearson CC of per-viewer transition matrices.
ConsistencyReport viewer_consistency(const Dataset& ds, const std::vector<std::string>& viewers,
                                     const TransitionOptions& opts = {});

}  // namespace scanviz::analysis
