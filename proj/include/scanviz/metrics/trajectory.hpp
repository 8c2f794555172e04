#pragma once

#include "scanviz/types.hpp"

#include <Eigen/Dense>

#include <array>
#include <vector>

namespace scanviz::metrics {

/// Fixation positions as an n × 2 matrix.
Eigen::MatrixX2d positions(const Scanpath& p);

/// Classical DTW with Euclidean point cost and no window; total cumulative cost.
double dtw2d(const Eigen::MatrixX2d& a, const Eigen::MatrixX2d& b);
double dtw2d(const Scanpath& a, const Scanpath& b);

struct StdeParams {
    int k = 3;              // embedding length (fixations per sub-trajectory)
    double scale = 0.0;     // exponential scale; 0 selects the stimulus diagonal
};

/// Mean distance from each length-k sub-trajectory of `a` to its nearest one in `b`
/// (Euclidean over the concatenated coordinates).
double tde_directed(const Eigen::MatrixX2d& a, const Eigen::MatrixX2d& b, int k);

/// Scaled time-delay-embedding similarity in [0, 1]: exp(−mean(directed a→b, b→a) / scale).
double stde(const Scanpath& a, const Scanpath& b, const Stimulus& s, const StdeParams& p = {});

struct MultimatchParams {
    double amplitude_frac = 0.1;  // TAmp as a fraction of the stimulus diagonal
    double direction_deg = 45.0;  // TDir
    double duration_ms = 300.0;   // TDur
    bool simplify = true;
};

struct MultimatchScores {
    double shape = 0.0;
    double direction = 0.0;
    double length = 0.0;
    double position = 0.0;
    double duration = 0.0;

    std::array<double, 5> as_array() const { return {shape, direction, length, position, duration}; }
};

/// Saccade-vector representation of a scanpath: fixation i is the start of saccade i;
/// the final fixation closes the last saccade.
struct VectorPath {
    Eigen::MatrixX2d fixations;
    Eigen::VectorXd durations;
    Eigen::MatrixX2d saccades;  // fixations(i + 1) − fixations(i)

    Eigen::Index num_saccades() const { return saccades.rows(); }
};

VectorPath to_vector_path(const Scanpath& p);

/// Iteratively merges consecutive saccades that are both short (< amplitude) or nearly
/// collinear (< direction), provided the fixation between them is shorter than TDur.
/// The dropped fixation's duration is added to the preceding fixation.
VectorPath simplify(const VectorPath& v, double amplitude_px, double direction_deg, double duration_ms);

/// Saccade index pairs of the minimal-cost monotone path through the shape-difference matrix.
std::vector<std::pair<Eigen::Index, Eigen::Index>> align_saccades(const VectorPath& a, const VectorPath& b);

MultimatchScores multimatch(const Scanpath& a, const Scanpath& b, const Stimulus& s, const MultimatchParams& p = {});

}  // namespace scanviz::metrics
