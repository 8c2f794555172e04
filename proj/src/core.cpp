#include "scanviz/core.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>

namespace scanviz {

char to_char(ElementClass c) { return kClassLetters[std::size_t(c)]; }

ElementClass class_from_char(char c) {
    auto pos = kClassLetters.find(c);
    if (pos == std::string_view::npos) throw Error(std::string("unknown element class letter '") + c + "'");
    return ElementClass(pos);
}

double Stimulus::diagonal() const { return std::hypot(double(width), double(height)); }

Grid default_grid(const Stimulus& s, int cells_wide) {
    if (s.width <= 0 || s.height <= 0) throw Error("stimulus " + s.stimulus_id + " has no dimensions");
    int h = std::max(1, int(std::lround(double(cells_wide) * s.height / s.width)));
    return {cells_wide, h};
}

std::optional<std::size_t> AttentionVolume::slice_at(double t_ms) const {
    for (std::size_t i = 0; i < boundaries_ms.size(); ++i)
        if (t_ms < boundaries_ms[i]) return i;
    return std::nullopt;
}

void AttentionVolume::check() const {
    if (slices.empty()) throw Error("attention volume has no slices");
    if (slices.size() != boundaries_ms.size()) throw Error("attention volume: slice/boundary count mismatch");
    for (std::size_t i = 1; i < boundaries_ms.size(); ++i)
        if (!(boundaries_ms[i] > boundaries_ms[i - 1])) throw Error("attention volume: boundaries not increasing");
    const Grid g = slices.front().grid();
    for (const auto& s : slices) {
        if (!(s.grid() == g)) throw Error("attention volume: slices differ in dimensions");
        if (!s.values.allFinite() || (s.values < 0).any()) throw Error("attention volume: negative or non-finite value");
    }
}

const Stimulus* Dataset::find_stimulus(const std::string& id) const {
    auto it = std::find_if(stimuli.begin(), stimuli.end(), [&](const Stimulus& s) { return s.stimulus_id == id; });
    return it == stimuli.end() ? nullptr : &*it;
}

const Stimulus& Dataset::stimulus(const std::string& id) const {
    if (auto* s = find_stimulus(id)) return *s;
    throw Error("unknown stimulus '" + id + "'");
}

std::vector<const Scanpath*> Dataset::scanpaths_for(const std::string& stimulus_id) const {
    std::vector<const Scanpath*> out;
    for (const auto& p : scanpaths)
        if (p.stimulus_id == stimulus_id) out.push_back(&p);
    return out;
}

void Dataset::check() const {
    std::map<std::string, int> seen;
    for (const auto& s : stimuli) {
        if (s.width <= 0 || s.height <= 0) throw Error("stimulus " + s.stimulus_id + " has non-positive size");
        if (seen[s.stimulus_id]++) throw Error("duplicate stimulus id '" + s.stimulus_id + "'");
    }
    for (const auto& p : scanpaths)
        if (!seen.count(p.stimulus_id)) throw Error("scanpath references unknown stimulus '" + p.stimulus_id + "'");
    if (!split.empty())
        for (const auto& s : stimuli)
            if (!split.count(s.stimulus_id)) throw Error("split does not cover stimulus '" + s.stimulus_id + "'");
}

// Geometry ---------------------------------------------------------------------

namespace {

double polygon_area(const Polygon& p) {
    double a = 0.0;
    for (std::size_t i = 0, n = p.size(); i < n; ++i) {
        const Point& u = p[i];
        const Point& v = p[(i + 1) % n];
        a += u.x() * v.y() - v.x() * u.y();
    }
    return std::abs(a) * 0.5;
}

bool polygon_contains(const Polygon& p, double x, double y) {
    bool inside = false;
    for (std::size_t i = 0, j = p.size() - 1; i < p.size(); j = i++) {
        const Point& a = p[i];
        const Point& b = p[j];
        if ((a.y() > y) != (b.y() > y)) {
            double xi = (b.x() - a.x()) * (y - a.y()) / (b.y() - a.y()) + a.x();
            if (x < xi) inside = !inside;
        }
    }
    return inside;
}

// One Sutherland-Hodgman pass against the half-plane keep(p) == true.
template <typename Keep, typename Cross>
Polygon clip_pass(const Polygon& in, Keep keep, Cross cross) {
    Polygon out;
    if (in.empty()) return out;
    Point prev = in.back();
    for (const Point& cur : in) {
        bool kc = keep(cur), kp = keep(prev);
        if (kc) {
            if (!kp) out.push_back(cross(prev, cur));
            out.push_back(cur);
        } else if (kp) {
            out.push_back(cross(prev, cur));
        }
        prev = cur;
    }
    return out;
}

Point cross_x(const Point& a, const Point& b, double x) {
    double t = (x - a.x()) / (b.x() - a.x());
    return {x, a.y() + t * (b.y() - a.y())};
}

Point cross_y(const Point& a, const Point& b, double y) {
    double t = (y - a.y()) / (b.y() - a.y());
    return {a.x() + t * (b.x() - a.x()), y};
}

}  // namespace

double area(const Region& r) {
    if (auto* b = std::get_if<Box>(&r)) return std::max(0.0, b->w) * std::max(0.0, b->h);
    return polygon_area(std::get<Polygon>(r));
}

bool contains(const Region& r, double x, double y) {
    if (auto* b = std::get_if<Box>(&r)) return x >= b->x && x < b->x + b->w && y >= b->y && y < b->y + b->h;
    const auto& p = std::get<Polygon>(r);
    return p.size() >= 3 && polygon_contains(p, x, y);
}

Region clip(const Region& r, double width, double height) {
    if (auto* b = std::get_if<Box>(&r)) {
        double x0 = std::clamp(b->x, 0.0, width), x1 = std::clamp(b->x + b->w, 0.0, width);
        double y0 = std::clamp(b->y, 0.0, height), y1 = std::clamp(b->y + b->h, 0.0, height);
        return Box{x0, y0, std::max(0.0, x1 - x0), std::max(0.0, y1 - y0)};
    }
    Polygon p = std::get<Polygon>(r);
    p = clip_pass(p, [](const Point& q) { return q.x() >= 0.0; }, [](auto& a, auto& b) { return cross_x(a, b, 0.0); });
    p = clip_pass(p, [&](const Point& q) { return q.x() <= width; }, [&](auto& a, auto& b) { return cross_x(a, b, width); });
    p = clip_pass(p, [](const Point& q) { return q.y() >= 0.0; }, [](auto& a, auto& b) { return cross_y(a, b, 0.0); });
    p = clip_pass(p, [&](const Point& q) { return q.y() <= height; }, [&](auto& a, auto& b) { return cross_y(a, b, height); });
    return p;
}

// Merge table --------------------------------------------------------------------

namespace {
std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return char(std::tolower(c)); });
    return out;
}
}  // namespace

MergeTable::MergeTable()
    : MergeTable({
          {"title", ElementClass::T},
          {"header", ElementClass::T},
          {"paragraph", ElementClass::S},
          {"label", ElementClass::A},
          {"source text", ElementClass::S},
          {"annotation", ElementClass::A},
          {"axis", ElementClass::X},
          {"graphical element", ElementClass::G},
          {"legend", ElementClass::L},
          {"object", ElementClass::O},
          {"data", ElementClass::D},
      }) {}

MergeTable::MergeTable(std::map<std::string, ElementClass> table) {
    for (auto& [k, v] : table) {
        if (v == ElementClass::Background) throw Error("merge table cannot map '" + k + "' to background");
        table_[lower(k)] = v;
    }
}

MergeTable MergeTable::from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open merge table " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw Error("merge table " + path + ": " + e.what());
    }
    std::map<std::string, ElementClass> table;
    for (auto& [k, v] : j.items()) {
        auto letter = v.get<std::string>();
        if (letter.size() != 1) throw Error("merge table entry '" + k + "' must be a single class letter");
        table[k] = class_from_char(letter[0]);
    }
    return MergeTable(std::move(table));
}

ElementClass MergeTable::map(std::string_view raw_class) const {
    auto it = table_.find(lower(raw_class));
    if (it == table_.end()) throw Error("unknown element class '" + std::string(raw_class) + "'");
    return it->second;
}

// Labelling ------------------------------------------------------------------------

ElementClass label_point(double x, double y, const Stimulus& s) {
    if (!(x >= 0 && y >= 0 && x < s.width && y < s.height)) return ElementClass::Background;
    const ElementAnnotation* best = nullptr;
    double best_area = 0.0;
    for (const auto& a : s.annotations) {
        if (!contains(a.region, x, y)) continue;
        double ar = area(a.region);
        if (!best || a.z_order < best->z_order || (a.z_order == best->z_order && ar < best_area)) {
            best = &a;
            best_area = ar;
        }
    }
    return best ? best->element_class : ElementClass::Background;
}

ElementClass label_fixation(const Fixation& f, const Stimulus& s) { return label_point(f.x, f.y, s); }

double class_area(const Stimulus& s, ElementClass c) {
    double total = 0.0;
    for (const auto& a : s.annotations)
        if (a.element_class == c) total += area(a.region);
    return total;
}

// Validation -------------------------------------------------------------------------

std::string_view to_string(ViolationKind k) {
    switch (k) {
        case ViolationKind::Empty: return "empty";
        case ViolationKind::NonIncreasingOnset: return "non-increasing-onset";
        case ViolationKind::NonPositiveDuration: return "non-positive-duration";
        case ViolationKind::NonFiniteValue: return "non-finite-value";
        case ViolationKind::NegativeOnset: return "negative-onset";
        case ViolationKind::ExceedsWindow: return "exceeds-window";
    }
    return "unknown";
}

std::vector<Violation> validate_scanpath(const Scanpath& p, double window_ms) {
    std::vector<Violation> out;
    auto add = [&](ViolationKind k, std::size_t i) {
        out.push_back({k, i, std::string(to_string(k)) + " at fixation " + std::to_string(i)});
    };
    if (p.fixations.empty()) {
        add(ViolationKind::Empty, 0);
        return out;
    }
    for (std::size_t i = 0; i < p.fixations.size(); ++i) {
        const auto& f = p.fixations[i];
        if (!std::isfinite(f.x) || !std::isfinite(f.y) || !std::isfinite(f.onset_ms) || !std::isfinite(f.duration_ms))
            add(ViolationKind::NonFiniteValue, i);
        if (f.onset_ms < 0) add(ViolationKind::NegativeOnset, i);
        if (!(f.duration_ms > 0)) add(ViolationKind::NonPositiveDuration, i);
        if (i > 0 && !(f.onset_ms > p.fixations[i - 1].onset_ms)) add(ViolationKind::NonIncreasingOnset, i);
        if (f.onset_ms + f.duration_ms > window_ms) add(ViolationKind::ExceedsWindow, i);
    }
    return out;
}

Scanpath truncate_scanpath(const Scanpath& p, double window_ms) {
    Scanpath out{p.stimulus_id, p.viewer_id, {}};
    for (const auto& f : p.fixations) {
        if (f.onset_ms >= window_ms) break;
        Fixation g = f;
        g.duration_ms = std::min(g.duration_ms, window_ms - g.onset_ms);
        out.fixations.push_back(g);
    }
    return out;
}

// Grid mapping ------------------------------------------------------------------------

Cell to_cell(double x, double y, const Stimulus& s, Grid g) {
    int cx = int(std::floor(x * g.width / s.width));
    int cy = int(std::floor(y * g.height / s.height));
    return {std::clamp(cx, 0, g.width - 1), std::clamp(cy, 0, g.height - 1)};
}

Point to_pixel(double gx, double gy, const Stimulus& s, Grid g) {
    return {gx * s.width / g.width, gy * s.height / g.height};
}

}  // namespace scanviz
