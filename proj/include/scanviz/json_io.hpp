#pragma once

#include "scanviz/types.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace scanviz {

using json = nlohmann::json;

// JSON layout (coordinates in stimulus pixels, origin top-left, y down):
//   Fixation        {"x", "y", "onset_ms", "duration_ms"}
//   Scanpath        {"stimulus_id", "viewer_id", "fixations": [Fixation]}
//   Annotation      {"class": "T", "box": [x, y, w, h] | "polygon": [[x, y], ...], "z_order"}
//   Stimulus        {"stimulus_id", "width", "height", "image"?, "annotations": [Annotation]}
//   Dataset         {"stimuli": [...], "scanpaths": [...], "split": {"id": "train" | "eval"}}
//   ExGaussian      {"mu", "sigma", "tau"}

void to_json(json& j, const Fixation& f);
void from_json(const json& j, Fixation& f);
void to_json(json& j, const Scanpath& p);
void from_json(const json& j, Scanpath& p);
void to_json(json& j, const Region& r);
void from_json(const json& j, Region& r);
void to_json(json& j, const Stimulus& s);
void from_json(const json& j, Stimulus& s);
void to_json(json& j, const Dataset& d);
void from_json(const json& j, Dataset& d);
void to_json(json& j, const ExGaussianParams& p);
void from_json(const json& j, ExGaussianParams& p);

json read_json_file(const std::string& path);
/// Writes pretty-printed JSON via a temporary file and rename.
void write_json_file(const std::string& path, const json& j);
void write_text_file(const std::string& path, const std::string& text);

Dataset load_dataset(const std::string& path);
void save_dataset(const std::string& path, const Dataset& d);

/// Accepts either {"scanpaths": [...]} or a bare array.
std::vector<Scanpath> load_scanpaths(const std::string& path);
void save_scanpaths(const std::string& path, const std::vector<Scanpath>& paths);

}  // namespace scanviz
