#include "scanviz/metrics/alignment.hpp"

#include <cmath>

namespace scanviz::metrics {

StringAlignment align_strings(std::string_view a, std::string_view b, const SequenceScoreParams& p) {
    const std::size_t n = a.size(), m = b.size();
    // Lexicographic DP over (score, matches): ties in score resolve toward more matches.
    std::vector<StringAlignment> f((n + 1) * (m + 1));
    auto at = [&](std::size_t i, std::size_t j) -> StringAlignment& { return f[i * (m + 1) + j]; };
    auto better = [](const StringAlignment& x, const StringAlignment& y) {
        return x.score > y.score || (x.score == y.score && x.matches > y.matches);
    };
    for (std::size_t i = 0; i <= n; ++i) at(i, 0) = {double(i) * p.gap, 0};
    for (std::size_t j = 0; j <= m; ++j) at(0, j) = {double(j) * p.gap, 0};
    for (std::size_t i = 1; i <= n; ++i)
        for (std::size_t j = 1; j <= m; ++j) {
            bool same = a[i - 1] == b[j - 1];
            StringAlignment diag = at(i - 1, j - 1);
            diag.score += same ? p.match : p.mismatch;
            diag.matches += same ? 1 : 0;
            StringAlignment up = at(i - 1, j), left = at(i, j - 1);
            up.score += p.gap;
            left.score += p.gap;
            StringAlignment best = diag;
            if (better(up, best)) best = up;
            if (better(left, best)) best = left;
            at(i, j) = best;
        }
    return at(n, m);
}

double sequence_score(std::string_view a, std::string_view b, const SequenceScoreParams& p) {
    if (a.empty() || b.empty()) throw Error("sequence_score: empty string");
    return double(align_strings(a, b, p).matches) / double(std::max(a.size(), b.size()));
}

Eigen::MatrixXd scanmatch_substitution(int grid_x, int grid_y, double max_sub) {
    if (grid_x <= 0 || grid_y <= 0) throw Error("scanmatch grid must be positive");
    const int n = grid_x * grid_y;
    const double d_max = std::hypot(double(grid_x - 1), double(grid_y - 1));
    Eigen::MatrixXd sub(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double d = std::hypot(double(i % grid_x - j % grid_x), double(i / grid_x - j / grid_x));
            sub(i, j) = d_max > 0 ? max_sub * (1.0 - d / d_max) : max_sub;
        }
    return sub;
}

double scanmatch_sequences(std::span<const int> a, std::span<const int> b, const Eigen::MatrixXd& sub, double gap,
                           double max_sub) {
    if (a.empty() || b.empty()) throw Error("scanmatch: empty scanpath");
    double score = needleman_wunsch(
        Eigen::Index(a.size()), Eigen::Index(b.size()), [&](Eigen::Index i, Eigen::Index j) { return sub(a[i], b[j]); },
        gap);
    return score / (max_sub * double(std::max(a.size(), b.size())));
}

std::vector<int> scanmatch_bins(const Scanpath& p, const Stimulus& s, int grid_x, int grid_y) {
    std::vector<int> bins;
    bins.reserve(p.size());
    for (const auto& f : p.fixations) {
        int bx = std::clamp(int(std::floor(f.x * grid_x / s.width)), 0, grid_x - 1);
        int by = std::clamp(int(std::floor(f.y * grid_y / s.height)), 0, grid_y - 1);
        bins.push_back(by * grid_x + bx);
    }
    return bins;
}

double scanmatch(const Scanpath& a, const Scanpath& b, const Stimulus& s, const ScanmatchParams& p) {
    auto sub = scanmatch_substitution(p.grid_x, p.grid_y, p.max_sub);
    auto ba = scanmatch_bins(a, s, p.grid_x, p.grid_y);
    auto bb = scanmatch_bins(b, s, p.grid_x, p.grid_y);
    return scanmatch_sequences(ba, bb, sub, p.gap, p.max_sub);
}

}  // namespace scanviz::metrics
