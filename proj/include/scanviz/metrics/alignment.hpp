#pragma once

#include "scanviz/types.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <span>
#include <string_view>
#include <vector>

namespace scanviz::metrics {

/// Needleman-Wunsch global alignment score with a linear gap penalty.
/// `sub(i, j)` scores aligning a[i] with b[j]; `gap` is added per gap (negative = penalty).
template <typename Substitution>
double needleman_wunsch(Eigen::Index n, Eigen::Index m, Substitution&& sub, double gap) {
    Eigen::MatrixXd f(n + 1, m + 1);
    for (Eigen::Index i = 0; i <= n; ++i) f(i, 0) = double(i) * gap;
    for (Eigen::Index j = 0; j <= m; ++j) f(0, j) = double(j) * gap;
    for (Eigen::Index i = 1; i <= n; ++i)
        for (Eigen::Index j = 1; j <= m; ++j)
            f(i, j) = std::max({f(i - 1, j - 1) + sub(i - 1, j - 1), f(i - 1, j) + gap, f(i, j - 1) + gap});
    return f(n, m);
}

struct SequenceScoreParams {
    double match = 1.0;
    double mismatch = -1.0;
    double gap = -1.0;
};

struct StringAlignment {
    double score = 0.0;  // optimal Needleman-Wunsch score
    int matches = 0;     // identical aligned pairs, maximised among optimal alignments
};

StringAlignment align_strings(std::string_view a, std::string_view b, const SequenceScoreParams& p = {});

/// Matching aligned pairs of the optimal global alignment divided by max(|a|, |b|).
double sequence_score(std::string_view a, std::string_view b, const SequenceScoreParams& p = {});

struct ScanmatchParams {
    int grid_x = 12;
    int grid_y = 8;
    double max_sub = 10.0;
    double gap = 0.0;
};

/// sub(i, j) = max_sub · (1 − d(i, j) / d_max) over bin-centre distances, bins numbered row-major.
Eigen::MatrixXd scanmatch_substitution(int grid_x, int grid_y, double max_sub);

/// Normalised Scanmatch score of two bin sequences: NW score / (max_sub · max(len)).
double scanmatch_sequences(std::span<const int> a, std::span<const int> b, const Eigen::MatrixXd& sub, double gap,
                           double max_sub);

/// Row-major bin index of each fixation on a grid_x × grid_y partition of the stimulus.
std::vector<int> scanmatch_bins(const Scanpath& p, const Stimulus& s, int grid_x, int grid_y);

/// Spatial Scanmatch without temporal binning, in [0, 1].
double scanmatch(const Scanpath& a, const Scanpath& b, const Stimulus& s, const ScanmatchParams& p = {});

}  // namespace scanviz::metrics
