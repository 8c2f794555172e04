#pragma once

#include "scanviz/types.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace scanviz::render {

/// Pixel size read from a PNG or JPEG header (no decoding). nullopt for other formats.
std::optional<std::pair<int, int>> image_dimensions(const std::string& path);

/// Stable "#rrggbb" colour per viewer; distinct viewers in one call get distinct colours.
std::vector<std::string> viewer_colours(const std::vector<std::string>& viewer_ids);

struct OverlayOptions {
    double radius_per_sqrt_ms = 1.0;  // circle radius = k · sqrt(duration)
    bool labels = true;
};

/// SVG overlay: numbered fixation circles, saccade lines, one colour per viewer.
/// When image_path is non-empty its dimensions must match the stimulus.
std::string render_overlay_svg(const Stimulus& s, const std::vector<Scanpath>& paths,
                               const std::string& image_path = {}, const OverlayOptions& opts = {});

void render_overlay(const std::string& image_path, const Stimulus& s, const std::vector<Scanpath>& paths,
                    const std::string& out_svg, const OverlayOptions& opts = {});

}  // namespace scanviz::render
