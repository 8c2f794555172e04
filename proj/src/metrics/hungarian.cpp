#include "scanviz/metrics/hungarian.hpp"

#include "scanviz/types.hpp"

#include <algorithm>
#include <limits>

namespace scanviz::metrics {

Assignment hungarian(const Eigen::MatrixXd& cost) {
    Assignment result;
    if (cost.size() == 0) return result;
    if (!cost.allFinite()) throw Error("hungarian: costs must be finite");

    // Solve with rows ≤ cols; transpose otherwise.
    const bool transposed = cost.rows() > cost.cols();
    const Eigen::MatrixXd a = transposed ? Eigen::MatrixXd(cost.transpose()) : cost;
    const Eigen::Index n = a.rows(), m = a.cols();
    const double inf = std::numeric_limits<double>::infinity();

    // 1-based potentials; p[j] is the row matched to column j (0 = none).
    std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
    std::vector<Eigen::Index> p(m + 1, 0), way(m + 1, 0);
    for (Eigen::Index i = 1; i <= n; ++i) {
        p[0] = i;
        Eigen::Index j0 = 0;
        std::vector<double> minv(m + 1, inf);
        std::vector<char> used(m + 1, false);
        do {
            used[j0] = true;
            Eigen::Index i0 = p[j0], j1 = 0;
            double delta = inf;
            for (Eigen::Index j = 1; j <= m; ++j) {
                if (used[j]) continue;
                double cur = a(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) minv[j] = cur, way[j] = j0;
                if (minv[j] < delta) delta = minv[j], j1 = j;
            }
            for (Eigen::Index j = 0; j <= m; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            Eigen::Index j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0);
    }

    for (Eigen::Index j = 1; j <= m; ++j) {
        if (!p[j]) continue;
        Eigen::Index r = p[j] - 1, c = j - 1;
        if (transposed) std::swap(r, c);
        result.pairs.emplace_back(r, c);
        result.cost += cost(r, c);
    }
    std::sort(result.pairs.begin(), result.pairs.end());
    return result;
}

}  // namespace scanviz::metrics
