#include "scanviz/fixtures.hpp"

#include "scanviz/core.hpp"
#include "scanviz/ingest.hpp"
#include "scanviz/rng.hpp"
#include "scanviz/sampler.hpp"

#include <cstdio>

namespace scanviz::fixtures {

namespace {

ElementClass class_key(const std::string& k) {
    if (k.size() != 1) throw Error("fixture spec: class key '" + k + "' must be a single letter");
    ElementClass c = class_from_char(k[0]);
    if (c == ElementClass::Background) throw Error("fixture spec: background is not a drawable class");
    return c;
}

std::map<ElementClass, double> class_weights(const json& j) {
    std::map<ElementClass, double> out;
    for (auto& [k, v] : j.items()) {
        double w = v.get<double>();
        if (w < 0) throw Error("fixture spec: negative weight for class " + k);
        out[class_key(k)] = w;
    }
    return out;
}

bool boxes_overlap(const Box& a, const Box& b) {
    return std::min(a.x + a.w, b.x + b.w) > std::max(a.x, b.x) && std::min(a.y + a.h, b.y + b.h) > std::max(a.y, b.y);
}

template <typename Map>
ElementClass draw_class(const Map& weights, Rng& rng) {
    double total = 0.0;
    for (auto& [c, w] : weights) total += w;
    if (!(total > 0)) throw Error("fixture: no class with positive probability");
    double r = rng.uniform() * total, acc = 0.0;
    ElementClass last = weights.rbegin()->first;
    for (auto& [c, w] : weights) {
        if (w <= 0) continue;
        acc += w;
        last = c;
        if (r < acc) return c;
    }
    return last;
}

Point draw_point_in_class(const Stimulus& s, ElementClass c, Rng& rng) {
    std::vector<const Box*> boxes;
    std::vector<double> areas;
    for (const auto& a : s.annotations)
        if (a.element_class == c) {
            boxes.push_back(&std::get<Box>(a.region));
            areas.push_back(area(a.region));
        }
    double total = 0.0;
    for (double a : areas) total += a;
    for (int attempt = 0; attempt < 10000; ++attempt) {
        double r = rng.uniform() * total, acc = 0.0;
        std::size_t k = 0;
        for (; k + 1 < areas.size(); ++k) {
            acc += areas[k];
            if (r < acc) break;
        }
        const Box& b = *boxes[k];
        double x = b.x + rng.uniform() * b.w, y = b.y + rng.uniform() * b.h;
        if (label_point(x, y, s) == c) return {x, y};
    }
    throw Error(std::string("fixture: class ") + to_char(c) + " is fully occluded on " + s.stimulus_id);
}

}  // namespace

FixtureSpec parse_fixture_spec(const json& j) {
    FixtureSpec spec;
    try {
        for (const auto& js : j.at("stimuli")) {
            FixtureStimulus fs;
            js.at("stimulus_id").get_to(fs.stimulus_id);
            js.at("width").get_to(fs.width);
            js.at("height").get_to(fs.height);
            for (const auto& je : js.at("elements")) {
                FixtureElement e;
                e.element_class = class_key(je.at("class").get<std::string>());
                const auto& b = je.at("box");
                e.box = {b.at(0).get<double>(), b.at(1).get<double>(), b.at(2).get<double>(), b.at(3).get<double>()};
                if (je.contains("z_order")) e.z_order = je.at("z_order").get<int>();
                fs.elements.push_back(e);
            }
            spec.stimuli.push_back(std::move(fs));
        }
        spec.replicate = j.value("replicate", 1);
        spec.viewers = j.value("viewers", 17);
        spec.window_ms = j.value("window_ms", 5000.0);
        if (j.contains("durations")) {
            const auto& d = j.at("durations");
            if (d.contains("fixed")) spec.fixed_duration_ms = d.at("fixed").get<double>();
            else d.get_to(spec.durations);
        }
        for (const auto& jsl : j.at("slices"))
            spec.slices.push_back({jsl.at("end_ms").get<double>(), class_weights(jsl.at("attractiveness"))});
        if (j.contains("transitions"))
            for (auto& [from, row] : j.at("transitions").items()) spec.transitions[class_key(from)] = class_weights(row);
    } catch (const json::exception& e) {
        throw Error(std::string("fixture spec: ") + e.what());
    }
    if (spec.stimuli.empty()) throw Error("fixture spec: no stimuli");
    if (spec.slices.empty()) throw Error("fixture spec: no slices");
    if (spec.viewers < 1 || spec.replicate < 1) throw Error("fixture spec: viewers and replicate must be ≥ 1");
    if (spec.fixed_duration_ms && !(*spec.fixed_duration_ms > 0)) throw Error("fixture spec: fixed duration must be > 0");
    return spec;
}

FixtureSpec load_fixture_spec(const std::string& path) { return parse_fixture_spec(read_json_file(path)); }

std::vector<Stimulus> fixture_stimuli(const FixtureSpec& spec) {
    std::vector<Stimulus> out;
    for (int rep = 0; rep < spec.replicate; ++rep)
        for (const auto& fs : spec.stimuli) {
            for (std::size_t a = 0; a < fs.elements.size(); ++a)
                for (std::size_t b = a + 1; b < fs.elements.size(); ++b)
                    if (boxes_overlap(fs.elements[a].box, fs.elements[b].box) &&
                        (!fs.elements[a].z_order || !fs.elements[b].z_order))
                        throw Error("fixture spec: overlapping elements on " + fs.stimulus_id + " need a z_order");
            Stimulus s;
            s.stimulus_id = spec.replicate > 1 ? fs.stimulus_id + "_" + std::to_string(rep) : fs.stimulus_id;
            s.width = fs.width;
            s.height = fs.height;
            for (const auto& e : fs.elements) {
                Region r = clip(e.box, fs.width, fs.height);
                if (!(area(r) > 0)) throw Error("fixture spec: element outside stimulus " + fs.stimulus_id);
                s.annotations.push_back({s.stimulus_id, e.element_class, r, e.z_order.value_or(0)});
            }
            out.push_back(std::move(s));
        }
    return out;
}

Dataset gen_fixtures(const FixtureSpec& spec, std::uint64_t seed) {
    Dataset ds;
    ds.stimuli = fixture_stimuli(spec);

    for (std::size_t si = 0; si < ds.stimuli.size(); ++si) {
        const Stimulus& s = ds.stimuli[si];
        std::map<ElementClass, double> areas;
        for (int c = 0; c < kNumElementClasses; ++c)
            if (double a = class_area(s, ElementClass(c)); a > 0) areas[ElementClass(c)] = a;

        for (int v = 0; v < spec.viewers; ++v) {
            Rng rng(derive_seed(seed, "fixture/" + s.stimulus_id, std::uint64_t(v)));
            char viewer[16];
            std::snprintf(viewer, sizeof viewer, "v%03d", v);
            Scanpath path{s.stimulus_id, viewer, {}};
            std::optional<ElementClass> prev;
            double t = 0.0;
            while (t < spec.window_ms) {
                std::size_t slice = 0;
                while (slice + 1 < spec.slices.size() && t >= spec.slices[slice].end_ms) ++slice;

                std::map<ElementClass, double> weights;
                double row_mass = 0.0;
                auto row = prev ? spec.transitions.find(*prev) : spec.transitions.end();
                if (row != spec.transitions.end())
                    for (auto [c, w] : row->second)
                        if (areas.count(c)) weights[c] = w, row_mass += w;
                if (!(row_mass > 0)) {
                    weights.clear();
                    for (auto [c, w] : spec.slices[slice].attractiveness)
                        if (areas.count(c)) weights[c] = w * areas[c];
                }
                ElementClass c = draw_class(weights, rng);
                Point p = draw_point_in_class(s, c, rng);
                double d = spec.fixed_duration_ms ? *spec.fixed_duration_ms : sampler::sample_duration(spec.durations, rng);
                path.fixations.push_back({p.x(), p.y(), t, d});
                t += d;
                prev = c;
            }
            ds.scanpaths.push_back(std::move(path));
        }
    }
    ds = ingest::split_alphabetic(std::move(ds));
    ds.check();
    return ds;
}

}  // namespace scanviz::fixtures
