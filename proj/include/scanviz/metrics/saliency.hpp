#pragma once

#include "scanviz/types.hpp"

#include <Eigen/Dense>

#include <cmath>

namespace scanviz::metrics {

// Saliency metrics over any Eigen array expression. Maps are compared cell-wise,
// so arguments must have equal shape.

namespace detail {
template <typename A, typename B>
void require_same_shape(const Eigen::DenseBase<A>& a, const Eigen::DenseBase<B>& b, const char* what) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw Error(std::string(what) + ": map dimensions differ");
}
}  // namespace detail

/// Normalised scanpath saliency: mean z-score (population std) of `sal` over fixated cells.
template <typename Sal, typename Fix>
double nss(const Eigen::DenseBase<Sal>& sal, const Eigen::DenseBase<Fix>& fixated) {
    detail::require_same_shape(sal, fixated, "nss");
    auto s = sal.derived().array().template cast<double>();
    const double mean = s.mean();
    const double sd = std::sqrt((s - mean).square().mean());
    if (!(sd > 0)) throw Error("nss: saliency map is constant");
    auto mask = (fixated.derived().array() != 0);
    const auto count = mask.count();
    if (count == 0) throw Error("nss: fixation map is empty");
    return (mask.select((s - mean) / sd, 0.0)).sum() / double(count);
}

/// Pearson correlation over flattened cells.
template <typename P, typename Q>
double cc(const Eigen::DenseBase<P>& p, const Eigen::DenseBase<Q>& q) {
    detail::require_same_shape(p, q, "cc");
    auto a = p.derived().array().template cast<double>();
    auto b = q.derived().array().template cast<double>();
    const double ma = a.mean(), mb = b.mean();
    const double saa = (a - ma).square().sum(), sbb = (b - mb).square().sum();
    if (!(saa > 0) || !(sbb > 0)) throw Error("cc: map is constant");
    return ((a - ma) * (b - mb)).sum() / std::sqrt(saa * sbb);
}

/// KL divergence of the prediction from the ground truth: Σ q · log(eps + q / (p + eps)).
template <typename Pred, typename Truth>
double kl_div(const Eigen::DenseBase<Pred>& prediction, const Eigen::DenseBase<Truth>& truth, double eps = 1e-7) {
    detail::require_same_shape(prediction, truth, "kl_div");
    auto p = prediction.derived().array().template cast<double>();
    auto q = truth.derived().array().template cast<double>();
    return (q * (eps + q / (p + eps)).log()).sum();
}

/// Histogram intersection Σ min(p, q).
template <typename P, typename Q>
double sim(const Eigen::DenseBase<P>& p, const Eigen::DenseBase<Q>& q) {
    detail::require_same_shape(p, q, "sim");
    return p.derived().array().template cast<double>().min(q.derived().array().template cast<double>()).sum();
}

inline double nss(const AttentionMap& sal, const FixationMap& fm) { return nss(sal.values, fm.cells); }
inline double cc(const AttentionMap& p, const AttentionMap& q) { return cc(p.values, q.values); }
inline double kl_div(const AttentionMap& prediction, const AttentionMap& truth, double eps = 1e-7) {
    return kl_div(prediction.values, truth.values, eps);
}
inline double sim(const AttentionMap& p, const AttentionMap& q) { return sim(p.values, q.values); }

}  // namespace scanviz::metrics
