#include "scanviz/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <set>
#include <sstream>

namespace scanviz::ingest {

namespace {

std::string trim(std::string_view s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (char c : line) {
        if (c == '"') {
            quoted = !quoted;
        } else if (c == ',' && !quoted) {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(trim(cur));
    return out;
}

bool parse_double(const std::string& s, double& out) {
    if (s.empty()) return false;
    const char* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, out);
    return ec == std::errc() && ptr == end && std::isfinite(out);
}

bool parse_bool(const std::string& s, bool& out) {
    std::string l = s;
    std::transform(l.begin(), l.end(), l.begin(), [](unsigned char c) { return char(std::tolower(c)); });
    if (l == "1" || l == "true" || l == "t" || l == "yes") return out = true, true;
    if (l == "0" || l == "false" || l == "f" || l == "no") return out = false, true;
    return false;
}

const char* const kColumns[] = {"t_ms", "x", "y", "viewer_id", "stimulus_id", "valid"};

}  // namespace

ColumnMapping load_column_mapping(const std::string& path) {
    ColumnMapping m;
    for (auto& [k, v] : read_json_file(path).items()) m[k] = v.get<std::string>();
    return m;
}

GazeTable parse_gaze_csv(std::istream& in, const ColumnMapping& columns) {
    GazeTable table;
    std::string line;
    std::size_t lineno = 0;
    std::map<std::string, std::size_t> index;

    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        auto header = split_csv_line(line);
        for (const char* canon : kColumns) {
            auto it = columns.find(canon);
            std::string name = it == columns.end() ? canon : it->second;
            auto pos = std::find(header.begin(), header.end(), name);
            if (pos == header.end()) {
                // validity is optional; everything else is required
                if (std::string(canon) == "valid") continue;
                throw Error("line " + std::to_string(lineno) + ": missing column " + name);
            }
            index[canon] = std::size_t(pos - header.begin());
        }
        break;
    }
    if (index.empty()) return table;

    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        auto fields = split_csv_line(line);
        auto field = [&](const char* name) -> const std::string& {
            std::size_t i = index.at(name);
            if (i >= fields.size()) throw Error("line " + std::to_string(lineno) + ": missing field " + name);
            return fields[i];
        };
        auto bad = [&](const char* name) { return Error("line " + std::to_string(lineno) + ": bad field " + name); };

        GazeSample s;
        if (index.count("valid") && !parse_bool(field("valid"), s.valid)) throw bad("valid");
        if (!parse_double(field("t_ms"), s.t_ms) || s.t_ms < 0) throw bad("t_ms");
        // tracker dropouts may carry empty or NaN coordinates
        if (!parse_double(field("x"), s.x)) {
            if (s.valid) throw bad("x");
            s.x = std::numeric_limits<double>::quiet_NaN();
        }
        if (!parse_double(field("y"), s.y)) {
            if (s.valid) throw bad("y");
            s.y = std::numeric_limits<double>::quiet_NaN();
        }
        s.viewer_id = field("viewer_id");
        if (s.viewer_id.empty()) throw bad("viewer_id");
        std::string stimulus = field("stimulus_id");
        if (stimulus.empty()) throw bad("stimulus_id");

        ++table.rows;
        if (!s.valid) ++table.invalid_rows;
        table.groups[{s.viewer_id, stimulus}].push_back(std::move(s));
    }
    for (auto& [key, samples] : table.groups)
        std::stable_sort(samples.begin(), samples.end(),
                         [](const GazeSample& a, const GazeSample& b) { return a.t_ms < b.t_ms; });
    return table;
}

GazeTable parse_gaze_samples(const std::string& path, const ColumnMapping& columns) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path);
    return parse_gaze_csv(in, columns);
}

std::vector<Fixation> detect_fixations_idt(const std::vector<GazeSample>& samples, const IdtParams& params) {
    if (!(params.dispersion_px > 0) || !(params.min_duration_ms > 0))
        throw Error("IDT parameters must be positive");
    std::vector<Fixation> out;
    const std::size_t n = samples.size();
    if (n < 2) return out;

    std::size_t i = 0;
    while (i < n) {
        if (!samples[i].valid) {
            ++i;
            continue;
        }
        double min_x = samples[i].x, max_x = min_x, min_y = samples[i].y, max_y = min_y;
        std::size_t j = i;
        while (j + 1 < n && samples[j + 1].valid) {
            const auto& s = samples[j + 1];
            double nx0 = std::min(min_x, s.x), nx1 = std::max(max_x, s.x);
            double ny0 = std::min(min_y, s.y), ny1 = std::max(max_y, s.y);
            if ((nx1 - nx0) + (ny1 - ny0) > params.dispersion_px) break;
            min_x = nx0, max_x = nx1, min_y = ny0, max_y = ny1;
            ++j;
        }
        double span = samples[j].t_ms - samples[i].t_ms;
        if (span >= params.min_duration_ms) {
            double sx = 0.0, sy = 0.0;
            for (std::size_t k = i; k <= j; ++k) sx += samples[k].x, sy += samples[k].y;
            double m = double(j - i + 1);
            out.push_back({sx / m, sy / m, samples[i].t_ms, span});
            i = j + 1;
        } else {
            ++i;
        }
    }
    return out;
}

AnnotationImport parse_annotations_json(const nlohmann::json& j, const StimulusBounds& bounds, const MergeTable& table) {
    if (!j.is_array()) throw Error("annotation file must hold a JSON array");
    AnnotationImport result;
    std::size_t idx = 0;
    for (const auto& ja : j) {
        ++idx;
        try {
            ElementAnnotation a;
            a.stimulus_id = ja.at("stimulus_id").get<std::string>();
            a.element_class = table.map(ja.at("raw_class").get<std::string>());
            from_json(ja, a.region);
            a.z_order = ja.value("z_order", 0);
            auto b = bounds.find(a.stimulus_id);
            if (b == bounds.end()) throw Error("annotation for unknown stimulus '" + a.stimulus_id + "'");
            a.region = clip(a.region, b->second.first, b->second.second);
            if (!(area(a.region) > 0)) {
                result.warnings.push_back("annotation " + std::to_string(idx) + " (" + a.stimulus_id +
                                          "): degenerate region skipped");
                continue;
            }
            result.annotations.push_back(std::move(a));
        } catch (const nlohmann::json::exception& e) {
            throw Error("annotation " + std::to_string(idx) + ": " + e.what());
        }
    }
    return result;
}

AnnotationImport parse_annotations(const std::string& path, const StimulusBounds& bounds, const MergeTable& table) {
    return parse_annotations_json(read_json_file(path), bounds, table);
}

std::vector<Stimulus> load_stimulus_list(const std::string& path) {
    auto j = read_json_file(path);
    if (!j.is_array()) throw Error(path + ": expected a JSON array of stimuli");
    std::vector<Stimulus> out;
    for (const auto& js : j) {
        Stimulus s;
        try {
            js.at("stimulus_id").get_to(s.stimulus_id);
            js.at("width").get_to(s.width);
            js.at("height").get_to(s.height);
            s.image = js.value("image", std::string{});
        } catch (const nlohmann::json::exception& e) {
            throw Error(path + ": " + e.what());
        }
        if (s.width <= 0 || s.height <= 0) throw Error(path + ": stimulus " + s.stimulus_id + " has non-positive size");
        out.push_back(std::move(s));
    }
    return out;
}

Dataset split_alphabetic(Dataset ds, int train, int eval) {
    if (train <= 0 || eval <= 0) throw Error("split ratio must be positive integers");
    std::vector<std::string> ids;
    for (const auto& s : ds.stimuli) ids.push_back(s.stimulus_id);
    std::sort(ids.begin(), ids.end());
    const int cycle = train + eval;
    ds.split.clear();
    for (std::size_t i = 0; i < ids.size(); ++i)
        ds.split[ids[i]] = int(i % cycle) < train ? SplitRole::Train : SplitRole::Eval;
    return ds;
}

IngestResult ingest(const std::string& gaze_csv, const std::string& annotations_json, const std::string& stimuli_json,
                    const IngestOptions& opts) {
    IngestResult result;
    Dataset& ds = result.dataset;
    ds.stimuli = load_stimulus_list(stimuli_json);

    StimulusBounds bounds;
    for (const auto& s : ds.stimuli) bounds[s.stimulus_id] = {s.width, s.height};
    auto anns = parse_annotations(annotations_json, bounds, opts.merge);
    result.warnings = std::move(anns.warnings);
    for (auto& a : anns.annotations)
        for (auto& s : ds.stimuli)
            if (s.stimulus_id == a.stimulus_id) s.annotations.push_back(a);

    auto gaze = parse_gaze_samples(gaze_csv, opts.columns);
    result.invalid_rows = gaze.invalid_rows;
    for (const auto& [key, samples] : gaze.groups) {
        if (!bounds.count(key.stimulus_id)) {
            result.warnings.push_back("gaze for unknown stimulus '" + key.stimulus_id + "' ignored");
            continue;
        }
        auto fixations = detect_fixations_idt(samples, opts.idt);
        if (fixations.empty()) {
            result.warnings.push_back("no fixations for viewer " + key.viewer_id + " on " + key.stimulus_id);
            continue;
        }
        ds.scanpaths.push_back({key.stimulus_id, key.viewer_id, std::move(fixations)});
    }
    ds = split_alphabetic(std::move(ds), opts.split_train, opts.split_eval);
    ds.check();
    return result;
}

}  // namespace scanviz::ingest
