#include "scanviz/json_io.hpp"

#include <filesystem>
#include <fstream>

namespace scanviz {

void to_json(json& j, const Fixation& f) {
    j = json{{"x", f.x}, {"y", f.y}, {"onset_ms", f.onset_ms}, {"duration_ms", f.duration_ms}};
}

void from_json(const json& j, Fixation& f) {
    j.at("x").get_to(f.x);
    j.at("y").get_to(f.y);
    j.at("onset_ms").get_to(f.onset_ms);
    j.at("duration_ms").get_to(f.duration_ms);
}

void to_json(json& j, const Scanpath& p) {
    j = json{{"stimulus_id", p.stimulus_id}, {"viewer_id", p.viewer_id}, {"fixations", p.fixations}};
}

void from_json(const json& j, Scanpath& p) {
    j.at("stimulus_id").get_to(p.stimulus_id);
    j.at("viewer_id").get_to(p.viewer_id);
    j.at("fixations").get_to(p.fixations);
}

void to_json(json& j, const Region& r) {
    if (auto* b = std::get_if<Box>(&r)) {
        j = json{{"box", {b->x, b->y, b->w, b->h}}};
        return;
    }
    json pts = json::array();
    for (const auto& p : std::get<Polygon>(r)) pts.push_back({p.x(), p.y()});
    j = json{{"polygon", pts}};
}

void from_json(const json& j, Region& r) {
    if (j.contains("box")) {
        const auto& b = j.at("box");
        if (!b.is_array() || b.size() != 4) throw Error("box must be [x, y, w, h]");
        r = Box{b[0].get<double>(), b[1].get<double>(), b[2].get<double>(), b[3].get<double>()};
    } else if (j.contains("polygon")) {
        Polygon p;
        for (const auto& v : j.at("polygon")) {
            if (!v.is_array() || v.size() != 2) throw Error("polygon vertices must be [x, y]");
            p.emplace_back(v[0].get<double>(), v[1].get<double>());
        }
        r = std::move(p);
    } else {
        throw Error("region needs a \"box\" or \"polygon\"");
    }
}

void to_json(json& j, const Stimulus& s) {
    json anns = json::array();
    for (const auto& a : s.annotations) {
        json ja;
        to_json(ja, a.region);
        ja["class"] = std::string(1, to_char(a.element_class));
        ja["z_order"] = a.z_order;
        anns.push_back(std::move(ja));
    }
    j = json{{"stimulus_id", s.stimulus_id}, {"width", s.width}, {"height", s.height}, {"annotations", anns}};
    if (!s.image.empty()) j["image"] = s.image;
}

void from_json(const json& j, Stimulus& s) {
    j.at("stimulus_id").get_to(s.stimulus_id);
    j.at("width").get_to(s.width);
    j.at("height").get_to(s.height);
    s.image = j.value("image", std::string{});
    s.annotations.clear();
    if (!j.contains("annotations")) return;
    for (const auto& ja : j.at("annotations")) {
        ElementAnnotation a;
        a.stimulus_id = s.stimulus_id;
        auto letter = ja.at("class").get<std::string>();
        if (letter.size() != 1) throw Error("annotation class must be a single letter, got '" + letter + "'");
        a.element_class = class_from_char(letter[0]);
        from_json(ja, a.region);
        a.z_order = ja.value("z_order", 0);
        s.annotations.push_back(std::move(a));
    }
}

void to_json(json& j, const Dataset& d) {
    json split = json::object();
    for (const auto& [id, role] : d.split) split[id] = role == SplitRole::Train ? "train" : "eval";
    j = json{{"stimuli", d.stimuli}, {"scanpaths", d.scanpaths}, {"split", split}};
}

void from_json(const json& j, Dataset& d) {
    j.at("stimuli").get_to(d.stimuli);
    d.scanpaths = j.value("scanpaths", std::vector<Scanpath>{});
    d.split.clear();
    if (j.contains("split"))
        for (auto& [id, v] : j.at("split").items()) {
            auto role = v.get<std::string>();
            if (role != "train" && role != "eval") throw Error("split role must be train or eval, got '" + role + "'");
            d.split[id] = role == "train" ? SplitRole::Train : SplitRole::Eval;
        }
}

void to_json(json& j, const ExGaussianParams& p) { j = json{{"mu", p.mu}, {"sigma", p.sigma}, {"tau", p.tau}}; }

void from_json(const json& j, ExGaussianParams& p) {
    j.at("mu").get_to(p.mu);
    j.at("sigma").get_to(p.sigma);
    j.at("tau").get_to(p.tau);
}

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw Error(path + ": " + e.what());
    }
}

void write_text_file(const std::string& path, const std::string& text) {
    namespace fs = std::filesystem;
    fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw Error("cannot write " + tmp.string());
        out << text;
        if (!out) throw Error("write failed for " + tmp.string());
    }
    fs::rename(tmp, target);
}

void write_json_file(const std::string& path, const json& j) { write_text_file(path, j.dump(2) + "\n"); }

Dataset load_dataset(const std::string& path) {
    try {
        auto d = read_json_file(path).get<Dataset>();
        d.check();
        return d;
    } catch (const json::exception& e) {
        throw Error(path + ": " + e.what());
    }
}

void save_dataset(const std::string& path, const Dataset& d) { write_json_file(path, json(d)); }

std::vector<Scanpath> load_scanpaths(const std::string& path) {
    try {
        auto j = read_json_file(path);
        if (j.is_object()) return j.at("scanpaths").get<std::vector<Scanpath>>();
        return j.get<std::vector<Scanpath>>();
    } catch (const json::exception& e) {
        throw Error(path + ": " + e.what());
    }
}

void save_scanpaths(const std::string& path, const std::vector<Scanpath>& paths) {
    write_json_file(path, json{{"scanpaths", paths}});
}

}  // namespace scanviz
