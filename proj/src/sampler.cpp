#include "scanviz/sampler.hpp"

#include "scanviz/parallel.hpp"

#include <cmath>
#include <limits>

namespace scanviz::sampler {

LengthHistogram LengthHistogram::from_lengths(std::span<const int> lengths) {
    LengthHistogram h;
    for (int l : lengths)
        if (l > 0) h.weights[l] += 1.0;
    if (h.weights.empty()) throw Error("length histogram: no positive lengths");
    for (auto& [l, w] : h.weights) w /= double(lengths.size());
    return h;
}

int LengthHistogram::max_length() const {
    if (weights.empty()) throw Error("length histogram is empty");
    return weights.rbegin()->first;
}

int sample_length(const LengthHistogram& h, Rng& rng) {
    if (h.weights.empty()) throw Error("sample_length: empty histogram");
    double total = 0.0;
    for (auto& [l, w] : h.weights) total += std::max(0.0, w);
    if (!(total > 0)) throw Error("sample_length: histogram has no mass");
    const double r = rng.uniform() * total;
    double acc = 0.0;
    int chosen = h.weights.rbegin()->first;
    for (auto& [l, w] : h.weights) {
        acc += std::max(0.0, w);
        if (r < acc) {
            chosen = l;
            break;
        }
    }
    return std::clamp(chosen, 1, h.max_length());
}

SliceAllocation allocate_slices(std::span<const double> durations, std::span<const double> boundaries) {
    for (std::size_t i = 1; i < boundaries.size(); ++i)
        if (!(boundaries[i] > boundaries[i - 1])) throw Error("allocate_slices: boundaries not increasing");
    SliceAllocation out;
    double onset = 0.0;
    for (double d : durations) {
        auto it = std::upper_bound(boundaries.begin(), boundaries.end(), onset);
        if (it == boundaries.end()) break;
        out.slice.push_back(int(it - boundaries.begin()));
        out.onsets_ms.push_back(onset);
        onset += d;
    }
    out.realised_length = out.slice.size();
    return out;
}

AttentionMap foveal_mask(Cell center, Grid g, double sigma_frac) {
    if (center.cx < 0 || center.cy < 0 || center.cx >= g.width || center.cy >= g.height)
        throw Error("foveal_mask: centre outside the grid");
    if (!(sigma_frac > 0)) throw Error("foveal_mask: sigma_frac must be positive");
    const double sigma = sigma_frac * std::min(g.width, g.height);
    Eigen::ArrayXd mx(g.width), my(g.height);
    for (int x = 0; x < g.width; ++x) mx(x) = std::isinf(sigma) ? 1.0 : std::exp(-0.5 * std::pow((x - center.cx) / sigma, 2));
    for (int y = 0; y < g.height; ++y) my(y) = std::isinf(sigma) ? 1.0 : std::exp(-0.5 * std::pow((y - center.cy) / sigma, 2));
    AttentionMap m;
    m.values = my.matrix() * mx.matrix().transpose();
    return m;
}

namespace {

// Index of the multinomial draw over the flattened weights, or -1 when there is no mass.
Eigen::Index draw_index(const Raster<double>& weights, Rng& rng) {
    const double total = weights.sum();
    if (!(total > 0) || !std::isfinite(total)) return -1;
    const double r = rng.uniform() * total;
    double acc = 0.0;
    const double* w = weights.data();
    Eigen::Index last_positive = -1;
    for (Eigen::Index k = 0; k < weights.size(); ++k) {
        if (w[k] <= 0) continue;
        last_positive = k;
        acc += w[k];
        if (r < acc) return k;
    }
    return last_positive;  // rounding at the top end
}

CellDraw make_draw(Eigen::Index k, Grid g, Rng& rng) {
    CellDraw d;
    d.cell = {int(k % g.width), int(k / g.width)};
    d.gx = d.cell.cx + rng.uniform();
    d.gy = d.cell.cy + rng.uniform();
    return d;
}

}  // namespace

CellDraw sample_fixation(const AttentionMap& slice, const AttentionMap* mask, Rng& rng) {
    const Grid g = slice.grid();
    if (mask) {
        if (!(mask->grid() == g)) throw Error("sample_fixation: mask and slice differ in size");
        Raster<double> product = slice.values * mask->values;
        Eigen::Index k = draw_index(product, rng);
        if (k >= 0) return make_draw(k, g, rng);
    }
    Eigen::Index k = draw_index(slice.values, rng);
    if (k < 0) throw Error("sample_fixation: attention slice has no mass");
    CellDraw d = make_draw(k, g, rng);
    d.mask_fallback = mask != nullptr;
    return d;
}

// Config ---------------------------------------------------------------------------------

void to_json(json& j, const SamplerConfig& c) {
    json hist = json::object();
    for (auto& [l, w] : c.lengths.weights) hist[std::to_string(l)] = w;
    j = json{{"exg", c.exg}, {"length_hist", hist}, {"fovea_sigma_frac", c.fovea_sigma_frac}, {"seed", c.seed}};
}

void from_json(const json& j, SamplerConfig& c) {
    if (j.contains("exg")) j.at("exg").get_to(c.exg);
    c.lengths.weights.clear();
    for (auto& [k, v] : j.at("length_hist").items()) {
        int l = 0;
        try {
            l = std::stoi(k);
        } catch (const std::exception&) {
            throw Error("length_hist key '" + k + "' is not an integer");
        }
        c.lengths.weights[l] = v.get<double>();
    }
    c.fovea_sigma_frac = j.value("fovea_sigma_frac", 0.15);
    c.seed = j.value("seed", std::uint64_t(0));
    if (c.lengths.weights.empty()) throw Error("sampler config: empty length histogram");
    if (!(c.fovea_sigma_frac > 0)) throw Error("sampler config: fovea_sigma_frac must be positive");
    if (!(c.exg.sigma > 0) || !(c.exg.tau > 0)) throw Error("sampler config: sigma and tau must be positive");
}

SamplerConfig load_config(const std::string& path) {
    try {
        return read_json_file(path).get<SamplerConfig>();
    } catch (const json::exception& e) {
        throw Error(path + ": " + e.what());
    }
}

SamplerConfig fit_sampler_config(const Dataset& ds, double window_ms) {
    std::vector<double> durations;
    std::vector<int> lengths;
    for (const auto& p : ds.scanpaths) {
        auto role = ds.split.find(p.stimulus_id);
        if (!ds.split.empty() && (role == ds.split.end() || role->second != SplitRole::Train)) continue;
        Scanpath t = truncate_scanpath(p, window_ms);
        if (t.fixations.empty()) continue;
        lengths.push_back(int(t.size()));
        // durations of the untruncated fixations, so window clipping does not bias the fit
        for (std::size_t i = 0; i < t.size(); ++i) durations.push_back(p.fixations[i].duration_ms);
    }
    if (lengths.empty()) throw Error("fit_sampler_config: no training scanpaths");
    SamplerConfig cfg;
    cfg.exg = fit_exgaussian(durations).params;
    cfg.lengths = LengthHistogram::from_lengths(lengths);
    return cfg;
}

// Generation ------------------------------------------------------------------------------

Scanpath generate_scanpath(const AttentionVolume& vol, const SamplerConfig& cfg, const PixelFrame& frame, Rng& rng,
                           GenerationTrace* trace) {
    vol.check();
    const Grid g = vol.grid();
    const double px_w = frame.width > 0 ? frame.width : g.width;
    const double px_h = frame.height > 0 ? frame.height : g.height;

    const int length = sample_length(cfg.lengths, rng);
    std::vector<double> durations(static_cast<std::size_t>(length));
    for (auto& d : durations) d = sample_duration(cfg.exg, rng);
    const SliceAllocation alloc = allocate_slices(durations, vol.boundaries_ms);

    Scanpath path{frame.stimulus_id, "", {}};
    Cell previous{};
    for (std::size_t k = 0; k < alloc.realised_length; ++k) {
        const int s = alloc.slice[k];
        const bool first_in_slice = k == 0 || alloc.slice[k - 1] != s;
        CellDraw draw;
        if (first_in_slice) {
            draw = sample_fixation(vol.slices[std::size_t(s)], nullptr, rng);
        } else {
            AttentionMap mask = foveal_mask(previous, g, cfg.fovea_sigma_frac);
            draw = sample_fixation(vol.slices[std::size_t(s)], &mask, rng);
        }
        if (trace) {
            trace->slice.push_back(s);
            trace->cells.push_back(draw.cell);
            trace->masked.push_back(!first_in_slice && !draw.mask_fallback);
            trace->mask_centers.push_back(previous);
            trace->mask_fallbacks += draw.mask_fallback ? 1 : 0;
        }
        previous = draw.cell;

        Fixation f;
        f.x = draw.gx * px_w / g.width;
        f.y = draw.gy * px_h / g.height;
        f.onset_ms = alloc.onsets_ms[k];
        f.duration_ms = std::min(durations[k], vol.boundaries_ms.back() - f.onset_ms);
        path.fixations.push_back(f);
    }
    return path;
}

std::vector<Scanpath> generate_scanpaths(const AttentionVolume& vol, const SamplerConfig& cfg,
                                         const PixelFrame& frame, std::size_t n) {
    std::vector<Scanpath> out(n);
    parallel_for(n, [&](std::size_t i) {
        Rng rng(derive_seed(cfg.seed, "scanpath", i));
        out[i] = generate_scanpath(vol, cfg, frame, rng);
        out[i].viewer_id = "umss_" + std::to_string(i);
    });
    return out;
}

}  // namespace scanviz::sampler
