#include "scanviz/attnmap.hpp"

#include "scanviz/analysis.hpp"
#include "scanviz/core.hpp"

#include <cmath>

namespace scanviz::attnmap {

FixationMap fixation_map(const std::vector<Fixation>& fixations, const Stimulus& s, Grid g) {
    if (g.width <= 0 || g.height <= 0) throw Error("fixation_map: grid must be non-empty");
    FixationMap fm{Raster<std::uint8_t>::Zero(g.height, g.width)};
    for (const auto& f : fixations) {
        if (!(f.x >= 0 && f.y >= 0 && f.x < s.width && f.y < s.height)) continue;
        Cell c = to_cell(f.x, f.y, s, g);
        fm.cells(c.cy, c.cx) = 1;
    }
    return fm;
}

namespace {

Eigen::VectorXd gaussian_kernel(double sigma) {
    const int radius = int(std::ceil(4.0 * sigma));
    Eigen::VectorXd k(2 * radius + 1);
    for (int i = -radius; i <= radius; ++i) k(i + radius) = std::exp(-0.5 * (i * i) / (sigma * sigma));
    return k / k.sum();
}

}  // namespace

Raster<double> gaussian_blur(const Raster<double>& in, double sigma) {
    if (!(sigma > 0)) throw Error("gaussian_blur: sigma must be positive");
    const Eigen::VectorXd k = gaussian_kernel(sigma);
    const Eigen::Index r = (k.size() - 1) / 2, rows = in.rows(), cols = in.cols();

    Raster<double> tmp = Raster<double>::Zero(rows, cols);
    for (Eigen::Index y = 0; y < rows; ++y)
        for (Eigen::Index x = 0; x < cols; ++x) {
            double v = in(y, x);
            if (v == 0.0) continue;
            for (Eigen::Index t = std::max<Eigen::Index>(0, x - r); t <= std::min(cols - 1, x + r); ++t)
                tmp(y, t) += v * k(t - x + r);
        }
    Raster<double> out = Raster<double>::Zero(rows, cols);
    for (Eigen::Index y = 0; y < rows; ++y)
        for (Eigen::Index x = 0; x < cols; ++x) {
            double v = tmp(y, x);
            if (v == 0.0) continue;
            for (Eigen::Index t = std::max<Eigen::Index>(0, y - r); t <= std::min(rows - 1, y + r); ++t)
                out(t, x) += v * k(t - y + r);
        }
    return out;
}

AttentionMap blur_to_saliency(const FixationMap& fm, double sigma_cells) {
    if (fm.count() == 0) throw Error("blur_to_saliency: fixation map is empty");
    Raster<double> blurred = gaussian_blur(fm.cells.cast<double>(), sigma_cells);
    return AttentionMap(blurred / blurred.sum(), true);
}

double sigma_in_cells(double sigma_px, const Stimulus& s, Grid g) { return sigma_px * double(g.width) / s.width; }

AttentionMap element_value_map(const Stimulus& s, const std::map<ElementClass, double>& class_values, Grid g) {
    AttentionMap m(g);
    for (int cy = 0; cy < g.height; ++cy)
        for (int cx = 0; cx < g.width; ++cx) {
            Point p = to_pixel(cx + 0.5, cy + 0.5, s, g);
            ElementClass c = label_point(p.x(), p.y(), s);
            if (c == ElementClass::Background) continue;
            auto it = class_values.find(c);
            if (it != class_values.end()) m.values(cy, cx) = it->second;
        }
    return m;
}

namespace {

std::map<ElementClass, double> class_efd(const Stimulus& s, const std::vector<Fixation>& fixations, double t0,
                                         double t1) {
    std::map<ElementClass, double> out;
    for (int c = 0; c < kNumElementClasses; ++c) {
        auto ec = ElementClass(c);
        if (class_area(s, ec) > 0) out[ec] = analysis::compute_efd(fixations, s, ec, t0, t1);
    }
    return out;
}

}  // namespace

AttentionMap element_efd_map(const Stimulus& s, const std::vector<Fixation>& fixations, double t0_ms, double t1_ms,
                             Grid g, std::vector<std::string>* warnings) {
    if (!(t1_ms > t0_ms)) throw Error("element_efd_map: empty time window");
    if (s.annotations.empty() && warnings) warnings->push_back("stimulus " + s.stimulus_id + " has no annotations");
    return element_value_map(s, class_efd(s, fixations, t0_ms, t1_ms), g);
}

AttentionMap center_bias_map(Grid g, double sigma_frac) {
    if (!(sigma_frac > 0)) throw Error("center_bias_map: sigma_frac must be positive");
    const double sigma = sigma_frac * std::min(g.width, g.height);
    const double cx = 0.5 * (g.width - 1), cy = 0.5 * (g.height - 1);
    AttentionMap m(g);
    for (int y = 0; y < g.height; ++y)
        for (int x = 0; x < g.width; ++x) {
            double d2 = (x - cx) * (x - cx) + (y - cy) * (y - cy);
            m.values(y, x) = std::exp(-0.5 * d2 / (sigma * sigma));
        }
    m.values /= m.values.sum();
    m.normalized = true;
    return m;
}

SliceClassValues stimulus_class_efd(const Stimulus& s, const std::vector<Fixation>& fixations,
                                    const std::vector<double>& boundaries_ms) {
    SliceClassValues out;
    double t0 = 0.0;
    for (double t1 : boundaries_ms) {
        out.push_back(class_efd(s, fixations, t0, t1));
        t0 = t1;
    }
    return out;
}

SliceClassValues prior_class_efd(const Dataset& ds, const std::vector<std::string>& stimulus_ids,
                                 const std::vector<double>& boundaries_ms) {
    SliceClassValues sums(boundaries_ms.size());
    std::vector<std::map<ElementClass, int>> counts(boundaries_ms.size());
    for (const auto& id : stimulus_ids) {
        const Stimulus& s = ds.stimulus(id);
        auto per_slice = stimulus_class_efd(s, all_fixations(ds, id), boundaries_ms);
        for (std::size_t i = 0; i < per_slice.size(); ++i)
            for (auto [c, v] : per_slice[i]) {
                sums[i][c] += v;
                counts[i][c] += 1;
            }
    }
    for (std::size_t i = 0; i < sums.size(); ++i)
        for (auto& [c, v] : sums[i]) v /= counts[i][c];
    return sums;
}

AttentionMap finalize_slice(AttentionMap m, double floor_eps, std::vector<std::string>* warnings) {
    const double total = m.values.sum();
    if (!(total > 0)) {
        if (warnings) warnings->push_back("attention slice has no mass; using a uniform slice");
        m.values.setConstant(1.0 / double(m.values.size()));
    } else {
        m.values = (m.values == 0.0).select(floor_eps * total, m.values);
        m.values /= m.values.sum();
    }
    m.normalized = true;
    return m;
}

AttentionVolume build_volume_from_values(const Stimulus& s, const SliceClassValues& values, Grid g,
                                         const VolumeOptions& opts, std::vector<std::string>* warnings) {
    if (values.size() != opts.boundaries_ms.size()) throw Error("build_volume: one value table per slice required");
    AttentionVolume vol;
    vol.boundaries_ms = opts.boundaries_ms;
    for (std::size_t i = 0; i < values.size(); ++i)
        vol.slices.push_back(finalize_slice(element_value_map(s, values[i], g), opts.floor_eps, warnings));

    if (opts.first_slice == FirstSlice::Center) {
        const double w = std::clamp(opts.center_blend, 0.0, 1.0);
        AttentionMap center = center_bias_map(g, opts.center_sigma_frac);
        if (w >= 1.0) {
            vol.slices[0] = std::move(center);
        } else if (w > 0.0) {
            AttentionMap& first = vol.slices[0];
            first.values = w * center.values + (1.0 - w) * first.values;
            first.values /= first.values.sum();
        }
    }
    vol.check();
    return vol;
}

AttentionVolume build_volume(const Stimulus& s, const std::vector<Fixation>& fixations, Grid g,
                             const VolumeOptions& opts, std::vector<std::string>* warnings) {
    for (std::size_t i = 1; i < opts.boundaries_ms.size(); ++i)
        if (!(opts.boundaries_ms[i] > opts.boundaries_ms[i - 1])) throw Error("build_volume: boundaries not increasing");
    if (opts.boundaries_ms.empty() || !(opts.boundaries_ms[0] > 0)) throw Error("build_volume: bad boundaries");
    if (s.annotations.empty() && warnings) warnings->push_back("stimulus " + s.stimulus_id + " has no annotations");
    return build_volume_from_values(s, stimulus_class_efd(s, fixations, opts.boundaries_ms), g, opts, warnings);
}

std::vector<std::size_t> slice_fixation_counts(const std::vector<Fixation>& fixations,
                                               const std::vector<double>& boundaries_ms) {
    std::vector<std::size_t> counts(boundaries_ms.size(), 0);
    for (const auto& f : fixations) {
        double t0 = 0.0;
        for (std::size_t i = 0; i < boundaries_ms.size(); ++i) {
            if (f.onset_ms >= t0 && f.onset_ms < boundaries_ms[i]) {
                ++counts[i];
                break;
            }
            t0 = boundaries_ms[i];
        }
    }
    return counts;
}

std::vector<Fixation> all_fixations(const Dataset& ds, const std::string& stimulus_id) {
    std::vector<Fixation> out;
    for (const auto* p : ds.scanpaths_for(stimulus_id)) out.insert(out.end(), p->fixations.begin(), p->fixations.end());
    return out;
}

}  // namespace scanviz::attnmap
