#pragma once

#include <Eigen/Dense>

#include <utility>
#include <vector>

namespace scanviz::metrics {

struct Assignment {
    std::vector<std::pair<Eigen::Index, Eigen::Index>> pairs;  // (row, col), sorted by row
    double cost = 0.0;
};

/// Minimum-cost one-to-one assignment of min(rows, cols) pairs (Kuhn-Munkres with potentials).
Assignment hungarian(const Eigen::MatrixXd& cost);

}  // namespace scanviz::metrics
