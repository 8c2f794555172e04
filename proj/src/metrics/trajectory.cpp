#include "scanviz/metrics/trajectory.hpp"

#include <cmath>
#include <limits>

namespace scanviz::metrics {

Eigen::MatrixX2d positions(const Scanpath& p) {
    Eigen::MatrixX2d m(Eigen::Index(p.size()), 2);
    for (Eigen::Index i = 0; i < m.rows(); ++i) m.row(i) << p.fixations[i].x, p.fixations[i].y;
    return m;
}

double dtw2d(const Eigen::MatrixX2d& a, const Eigen::MatrixX2d& b) {
    const Eigen::Index n = a.rows(), m = b.rows();
    if (n == 0 || m == 0) throw Error("dtw2d: empty scanpath");
    const double inf = std::numeric_limits<double>::infinity();
    Eigen::MatrixXd d = Eigen::MatrixXd::Constant(n + 1, m + 1, inf);
    d(0, 0) = 0.0;
    for (Eigen::Index i = 1; i <= n; ++i)
        for (Eigen::Index j = 1; j <= m; ++j) {
            double cost = (a.row(i - 1) - b.row(j - 1)).norm();
            d(i, j) = cost + std::min({d(i - 1, j - 1), d(i - 1, j), d(i, j - 1)});
        }
    return d(n, m);
}

double dtw2d(const Scanpath& a, const Scanpath& b) { return dtw2d(positions(a), positions(b)); }

double tde_directed(const Eigen::MatrixX2d& a, const Eigen::MatrixX2d& b, int k) {
    if (k < 1) throw Error("stde: embedding length must be ≥ 1");
    if (a.rows() < k || b.rows() < k)
        throw Error("stde: scanpath shorter than embedding length " + std::to_string(k) + "; use a smaller k");
    const Eigen::Index na = a.rows() - k + 1, nb = b.rows() - k + 1;
    double total = 0.0;
    for (Eigen::Index i = 0; i < na; ++i) {
        double best = std::numeric_limits<double>::infinity();
        for (Eigen::Index j = 0; j < nb; ++j)
            best = std::min(best, (a.middleRows(i, k) - b.middleRows(j, k)).norm());
        total += best;
    }
    return total / double(na);
}

double stde(const Scanpath& a, const Scanpath& b, const Stimulus& s, const StdeParams& p) {
    const double scale = p.scale > 0 ? p.scale : s.diagonal();
    if (!(scale > 0)) throw Error("stde: scale must be positive");
    auto pa = positions(a), pb = positions(b);
    double d = 0.5 * (tde_directed(pa, pb, p.k) + tde_directed(pb, pa, p.k));
    return std::exp(-d / scale);
}

// Multimatch ---------------------------------------------------------------------------

namespace {

double angle_between(const Eigen::Vector2d& u, const Eigen::Vector2d& v) {
    double a = std::abs(std::atan2(u.y(), u.x()) - std::atan2(v.y(), v.x()));
    return a > M_PI ? 2.0 * M_PI - a : a;
}

// Merge saccades i and i + 1, dropping fixation i + 1.
void merge_at(VectorPath& v, Eigen::Index i) {
    const Eigen::Index nf = v.fixations.rows();
    v.durations(i) += v.durations(i + 1);
    Eigen::MatrixX2d fix(nf - 1, 2);
    Eigen::VectorXd dur(nf - 1);
    for (Eigen::Index r = 0, o = 0; r < nf; ++r) {
        if (r == i + 1) continue;
        fix.row(o) = v.fixations.row(r);
        dur(o) = v.durations(r);
        ++o;
    }
    v.fixations = std::move(fix);
    v.durations = std::move(dur);
    v.saccades = v.fixations.bottomRows(v.fixations.rows() - 1) - v.fixations.topRows(v.fixations.rows() - 1);
}

}  // namespace

VectorPath to_vector_path(const Scanpath& p) {
    if (p.size() < 2) throw Error("multimatch: scanpath needs at least 2 fixations");
    VectorPath v;
    v.fixations = positions(p);
    v.durations.resize(Eigen::Index(p.size()));
    for (Eigen::Index i = 0; i < v.durations.size(); ++i) v.durations(i) = p.fixations[i].duration_ms;
    v.saccades = v.fixations.bottomRows(v.fixations.rows() - 1) - v.fixations.topRows(v.fixations.rows() - 1);
    return v;
}

VectorPath simplify(const VectorPath& in, double amplitude_px, double direction_deg, double duration_ms) {
    VectorPath v = in;
    const double dir_rad = direction_deg * M_PI / 180.0;
    bool changed = true;
    while (changed) {
        changed = false;
        for (Eigen::Index i = 0; i + 1 < v.num_saccades();) {
            Eigen::Vector2d s0 = v.saccades.row(i), s1 = v.saccades.row(i + 1);
            bool short_pair = s0.norm() < amplitude_px && s1.norm() < amplitude_px;
            if (short_pair && v.durations(i + 1) < duration_ms) {
                merge_at(v, i);
                changed = true;
            } else {
                ++i;
            }
        }
        for (Eigen::Index i = 0; i + 1 < v.num_saccades();) {
            Eigen::Vector2d s0 = v.saccades.row(i), s1 = v.saccades.row(i + 1);
            if (angle_between(s0, s1) < dir_rad && v.durations(i + 1) < duration_ms) {
                merge_at(v, i);
                changed = true;
            } else {
                ++i;
            }
        }
    }
    return v;
}

std::vector<std::pair<Eigen::Index, Eigen::Index>> align_saccades(const VectorPath& a, const VectorPath& b) {
    const Eigen::Index n = a.num_saccades(), m = b.num_saccades();
    Eigen::MatrixXd w(n, m);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < m; ++j) w(i, j) = (a.saccades.row(i) - b.saccades.row(j)).norm();

    const double inf = std::numeric_limits<double>::infinity();
    Eigen::MatrixXd c = Eigen::MatrixXd::Constant(n, m, inf);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < m; ++j) {
            double prev = (i == 0 && j == 0) ? 0.0 : inf;
            if (i > 0 && j > 0) prev = std::min(prev, c(i - 1, j - 1));
            if (i > 0) prev = std::min(prev, c(i - 1, j));
            if (j > 0) prev = std::min(prev, c(i, j - 1));
            c(i, j) = prev + w(i, j);
        }

    std::vector<std::pair<Eigen::Index, Eigen::Index>> path;
    Eigen::Index i = n - 1, j = m - 1;
    path.emplace_back(i, j);
    while (i > 0 || j > 0) {
        if (i > 0 && j > 0 && c(i - 1, j - 1) <= c(i - 1, j) && c(i - 1, j - 1) <= c(i, j - 1)) {
            --i, --j;
        } else if (i > 0 && (j == 0 || c(i - 1, j) <= c(i, j - 1))) {
            --i;
        } else {
            --j;
        }
        path.emplace_back(i, j);
    }
    std::reverse(path.begin(), path.end());
    return path;
}

MultimatchScores multimatch(const Scanpath& a, const Scanpath& b, const Stimulus& s, const MultimatchParams& p) {
    const double diag = s.diagonal();
    if (!(diag > 0)) throw Error("multimatch: stimulus has no size");
    VectorPath va = to_vector_path(a), vb = to_vector_path(b);
    if (p.simplify) {
        va = simplify(va, p.amplitude_frac * diag, p.direction_deg, p.duration_ms);
        vb = simplify(vb, p.amplitude_frac * diag, p.direction_deg, p.duration_ms);
    }
    const auto path = align_saccades(va, vb);

    double shape = 0, direction = 0, length = 0, position = 0, duration = 0;
    for (auto [i, j] : path) {
        Eigen::Vector2d u = va.saccades.row(i), v = vb.saccades.row(j);
        shape += (u - v).norm() / (2.0 * diag);
        direction += angle_between(u, v) / M_PI;
        length += std::abs(u.norm() - v.norm()) / diag;
        position += (va.fixations.row(i) - vb.fixations.row(j)).norm() / diag;
        double da = va.durations(i), db = vb.durations(j);
        duration += std::abs(da - db) / std::max(da, db);
    }
    const double n = double(path.size());
    return {1.0 - shape / n, 1.0 - direction / n, 1.0 - length / n, 1.0 - position / n, 1.0 - duration / n};
}

}  // namespace scanviz::metrics
