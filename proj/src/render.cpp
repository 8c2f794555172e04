#include "scanviz/render.hpp"

#include "scanviz/json_io.hpp"
#include "scanviz/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <map>
#include <set>
#include <sstream>

namespace scanviz::render {

namespace {

std::uint32_t be32(const unsigned char* p) {
    return std::uint32_t(p[0]) << 24 | std::uint32_t(p[1]) << 16 | std::uint32_t(p[2]) << 8 | p[3];
}

std::optional<std::pair<int, int>> jpeg_dimensions(const std::string& bytes) {
    const auto* b = reinterpret_cast<const unsigned char*>(bytes.data());
    std::size_t i = 2;
    while (i + 9 < bytes.size()) {
        if (b[i] != 0xFF) return std::nullopt;
        unsigned char marker = b[i + 1];
        if (marker == 0xFF) {
            ++i;
            continue;
        }
        std::size_t len = std::size_t(b[i + 2]) << 8 | b[i + 3];
        bool sof = marker >= 0xC0 && marker <= 0xCF && marker != 0xC4 && marker != 0xC8 && marker != 0xCC;
        if (sof) return std::pair<int, int>{int(b[i + 7]) << 8 | b[i + 8], int(b[i + 5]) << 8 | b[i + 6]};
        i += 2 + len;
    }
    return std::nullopt;
}

std::string hsl_hex(double hue, double sat, double light) {
    auto f = [&](double n) {
        double k = std::fmod(n + hue / 30.0, 12.0);
        double a = sat * std::min(light, 1.0 - light);
        return light - a * std::max(-1.0, std::min({k - 3.0, 9.0 - k, 1.0}));
    };
    char buf[8];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", int(std::lround(255 * f(0))), int(std::lround(255 * f(8))),
                  int(std::lround(255 * f(4))));
    return buf;
}

std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

}  // namespace

std::optional<std::pair<int, int>> image_dimensions(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open image " + path);
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    const auto* b = reinterpret_cast<const unsigned char*>(bytes.data());
    static const unsigned char png_sig[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1A, '\n'};
    if (bytes.size() >= 24 && std::equal(png_sig, png_sig + 8, b))
        return std::pair<int, int>{int(be32(b + 16)), int(be32(b + 20))};
    if (bytes.size() >= 4 && b[0] == 0xFF && b[1] == 0xD8) return jpeg_dimensions(bytes);
    return std::nullopt;
}

std::vector<std::string> viewer_colours(const std::vector<std::string>& viewer_ids) {
    // Hue from the id hash; collisions inside one call are resolved in sorted-id order.
    std::set<std::string> sorted(viewer_ids.begin(), viewer_ids.end());
    std::map<std::string, int> hue;
    std::set<int> taken;
    for (const auto& id : sorted) {
        int h = int(fnv1a(id) % 360);
        while (taken.count(h)) h = (h + 137) % 360;
        taken.insert(h);
        hue[id] = h;
    }
    std::vector<std::string> out;
    for (const auto& id : viewer_ids) out.push_back(hsl_hex(hue[id], 0.75, 0.45));
    return out;
}

std::string render_overlay_svg(const Stimulus& s, const std::vector<Scanpath>& paths, const std::string& image_path,
                               const OverlayOptions& opts) {
    if (!image_path.empty()) {
        auto dims = image_dimensions(image_path);
        if (dims && (dims->first != s.width || dims->second != s.height))
            throw Error("image " + image_path + " is " + std::to_string(dims->first) + "x" +
                        std::to_string(dims->second) + ", stimulus " + s.stimulus_id + " is " +
                        std::to_string(s.width) + "x" + std::to_string(s.height));
    }
    std::vector<std::string> ids;
    for (const auto& p : paths) ids.push_back(p.viewer_id);
    const auto colours = viewer_colours(ids);

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" xmlns:xlink=\"http://www.w3.org/1999/xlink\" width=\"" << s.width
        << "\" height=\"" << s.height << "\" viewBox=\"0 0 " << s.width << ' ' << s.height << "\">\n";
    if (!image_path.empty())
        svg << "  <image xlink:href=\"" << xml_escape(image_path) << "\" x=\"0\" y=\"0\" width=\"" << s.width
            << "\" height=\"" << s.height << "\"/>\n";
    for (std::size_t k = 0; k < paths.size(); ++k) {
        const auto& p = paths[k];
        const std::string& colour = colours[k];
        svg << "  <g class=\"scanpath\" data-viewer=\"" << xml_escape(p.viewer_id) << "\" stroke=\"" << colour
            << "\">\n";
        for (std::size_t i = 0; i + 1 < p.size(); ++i) {
            const auto &a = p.fixations[i], &b = p.fixations[i + 1];
            svg << "    <line x1=\"" << num(a.x) << "\" y1=\"" << num(a.y) << "\" x2=\"" << num(b.x) << "\" y2=\""
                << num(b.y) << "\" stroke-width=\"2\"/>\n";
        }
        for (std::size_t i = 0; i < p.size(); ++i) {
            const auto& f = p.fixations[i];
            double r = opts.radius_per_sqrt_ms * std::sqrt(std::max(0.0, f.duration_ms));
            svg << "    <circle cx=\"" << num(f.x) << "\" cy=\"" << num(f.y) << "\" r=\"" << num(r) << "\" fill=\""
                << colour << "\" fill-opacity=\"0.5\" stroke-width=\"1.5\"/>\n";
            if (opts.labels)
                svg << "    <text x=\"" << num(f.x) << "\" y=\"" << num(f.y)
                    << "\" text-anchor=\"middle\" dominant-baseline=\"central\" font-size=\"12\" stroke=\"none\" "
                       "fill=\"#000\">"
                    << i + 1 << "</text>\n";
        }
        svg << "  </g>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

void render_overlay(const std::string& image_path, const Stimulus& s, const std::vector<Scanpath>& paths,
                    const std::string& out_svg, const OverlayOptions& opts) {
    write_text_file(out_svg, render_overlay_svg(s, paths, image_path, opts));
}

}  // namespace scanviz::render
