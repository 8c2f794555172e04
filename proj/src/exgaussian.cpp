#include "scanviz/sampler.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>

namespace scanviz::sampler {

namespace {

constexpr double kLogSqrt2Pi = 0.91893853320467274178;

// log(0.5 · erfcx(u)) for large u, via the asymptotic series of erfcx.
double log_half_erfcx_large(double u) {
    const double inv = 1.0 / (2.0 * u * u);
    double term = 1.0, sum = 1.0;
    for (int k = 1; k <= 8; ++k) {
        term *= -double(2 * k - 1) * inv;
        sum += term;
    }
    return std::log(sum / (u * std::sqrt(M_PI))) - std::log(2.0);
}

}  // namespace

double exgaussian_logpdf(double x, const ExGaussianParams& p) {
    const double z = (x - p.mu) / p.sigma;
    const double w = z - p.sigma / p.tau;
    if (w < -10.0) {
        // The exponential and normal-CDF factors cancel; evaluate the combined form.
        const double u = -w / std::sqrt(2.0);
        return -std::log(p.tau) - 0.5 * z * z + log_half_erfcx_large(u);
    }
    const double log_cdf = std::log(0.5 * std::erfc(-w / std::sqrt(2.0)));
    return -std::log(p.tau) + (p.mu - x) / p.tau + 0.5 * (p.sigma * p.sigma) / (p.tau * p.tau) + log_cdf;
}

double exgaussian_log_likelihood(std::span<const double> xs, const ExGaussianParams& p) {
    double ll = 0.0;
    for (double x : xs) ll += exgaussian_logpdf(x, p);
    return ll;
}

namespace {

using Vec3 = std::array<double, 3>;

// Nelder-Mead minimisation in three dimensions.
template <typename F>
Vec3 nelder_mead(F&& f, Vec3 start, Vec3 step, int max_evals, double ftol) {
    std::array<Vec3, 4> pts;
    std::array<double, 4> vals;
    pts[0] = start;
    for (int i = 0; i < 3; ++i) {
        pts[i + 1] = start;
        pts[i + 1][i] += step[i];
    }
    for (int i = 0; i < 4; ++i) vals[i] = f(pts[i]);
    int evals = 4;

    auto combine = [](const Vec3& a, const Vec3& b, double t) {
        Vec3 r;
        for (int i = 0; i < 3; ++i) r[i] = a[i] + t * (b[i] - a[i]);
        return r;
    };

    while (evals < max_evals) {
        std::array<int, 4> order{0, 1, 2, 3};
        std::sort(order.begin(), order.end(), [&](int a, int b) { return vals[a] < vals[b]; });
        std::array<Vec3, 4> sp;
        std::array<double, 4> sv;
        for (int i = 0; i < 4; ++i) sp[i] = pts[order[i]], sv[i] = vals[order[i]];
        pts = sp;
        vals = sv;
        if (std::abs(vals[3] - vals[0]) <= ftol * (std::abs(vals[0]) + 1e-300)) break;

        Vec3 centroid{0, 0, 0};
        for (int i = 0; i < 3; ++i)
            for (int d = 0; d < 3; ++d) centroid[d] += pts[i][d] / 3.0;

        Vec3 refl = combine(centroid, pts[3], -1.0);
        double fr = f(refl);
        ++evals;
        if (fr < vals[0]) {
            Vec3 exp = combine(centroid, pts[3], -2.0);
            double fe = f(exp);
            ++evals;
            if (fe < fr) pts[3] = exp, vals[3] = fe;
            else pts[3] = refl, vals[3] = fr;
        } else if (fr < vals[2]) {
            pts[3] = refl, vals[3] = fr;
        } else {
            bool outside = fr < vals[3];
            Vec3 con = combine(centroid, outside ? refl : pts[3], 0.5);
            double fc = f(con);
            ++evals;
            if (fc < (outside ? fr : vals[3])) {
                pts[3] = con, vals[3] = fc;
            } else {
                for (int i = 1; i < 4; ++i) {
                    pts[i] = combine(pts[0], pts[i], 0.5);
                    vals[i] = f(pts[i]);
                    ++evals;
                }
            }
        }
    }
    int best = int(std::min_element(vals.begin(), vals.end()) - vals.begin());
    return pts[best];
}

}  // namespace

ExGaussianFit fit_exgaussian(std::span<const double> xs) {
    if (xs.size() < 3) throw Error("fit_exgaussian: need at least 3 durations");
    for (double x : xs)
        if (!(x > 0) || !std::isfinite(x)) throw Error("fit_exgaussian: durations must be positive and finite");

    ExGaussianFit fit;
    const double n = double(xs.size());
    if (xs.size() < 100) fit.warnings.push_back("fewer than 100 durations; fit may be unstable");

    const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    double m2 = 0.0, m3 = 0.0;
    for (double x : xs) {
        double d = x - mean;
        m2 += d * d;
        m3 += d * d * d;
    }
    m2 /= n;
    m3 /= n;
    const double sd = std::sqrt(m2);
    if (!(sd > 0)) throw Error("fit_exgaussian: durations have zero variance");
    const double skew = m3 / (sd * sd * sd);

    // Numerically non-positive skew: no exponential component to fit.
    if (skew <= 1e-9) {
        fit.tau_fallback = true;
        fit.warnings.push_back("non-positive skewness; tau set to epsilon");
        fit.params = {mean, sd, kTauEpsilon};
        fit.log_likelihood = 0.0;
        for (double x : xs) {
            double z = (x - mean) / sd;
            fit.log_likelihood += -0.5 * z * z - std::log(sd) - kLogSqrt2Pi;
        }
        return fit;
    }

    const double g = std::min(skew, 1.9);  // ex-Gaussian skewness is bounded by 2
    const double tau0 = sd * std::cbrt(g / 2.0);
    const double sigma0 = std::sqrt(std::max(m2 - tau0 * tau0, 0.01 * m2));
    const double mu0 = mean - tau0;

    auto negll = [&](const Vec3& t) {
        ExGaussianParams p{t[0], std::exp(t[1]), std::exp(t[2])};
        double ll = exgaussian_log_likelihood(xs, p);
        return std::isfinite(ll) ? -ll : std::numeric_limits<double>::infinity();
    };
    Vec3 theta{mu0, std::log(sigma0), std::log(tau0)};
    Vec3 step{0.1 * sd, 0.2, 0.2};
    for (int round = 0; round < 3; ++round) {
        theta = nelder_mead(negll, theta, step, 4000, 1e-13);
        step = {0.02 * sd, 0.05, 0.05};
    }
    fit.params = {theta[0], std::exp(theta[1]), std::exp(theta[2])};
    fit.log_likelihood = exgaussian_log_likelihood(xs, fit.params);
    return fit;
}

double sample_duration(const ExGaussianParams& p, Rng& rng) {
    for (int attempt = 0; attempt < 10000; ++attempt) {
        double d = rng.normal(p.mu, p.sigma) + rng.exponential(p.tau);
        if (d > 0) return d;
    }
    throw Error("sample_duration: parameters yield no positive durations");
}

}  // namespace scanviz::sampler
