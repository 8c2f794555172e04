#include "scanviz/volume_io.hpp"

#include "scanviz/json_io.hpp"

#include <bit>
#include <cstring>
#include <filesystem>
#include <fstream>

namespace scanviz {

namespace fs = std::filesystem;

namespace {

void put_le32(char* out, float f) {
    auto u = std::bit_cast<std::uint32_t>(f);
    for (int b = 0; b < 4; ++b) out[b] = char((u >> (8 * b)) & 0xffu);
}

float get_le32(const char* in) {
    std::uint32_t u = 0;
    for (int b = 0; b < 4; ++b) u |= std::uint32_t(static_cast<unsigned char>(in[b])) << (8 * b);
    return std::bit_cast<float>(u);
}

}  // namespace

void write_volume(const std::string& dir, const AttentionVolume& v, const VolumeStimulusInfo& info) {
    v.check();
    fs::create_directories(dir);
    const Grid g = v.grid();
    json meta{{"format", "scanviz-volume"}, {"version", 1},       {"width", g.width},
              {"height", g.height},         {"byte_order", "little"}, {"dtype", "float32"},
              {"boundaries_ms", v.boundaries_ms}};
    json names = json::array();
    for (std::size_t i = 0; i < v.slices.size(); ++i) {
        std::string name = "slice_" + std::to_string(i) + ".f32";
        names.push_back(name);
        const auto& values = v.slices[i].values;
        std::string bytes(std::size_t(values.size()) * 4, '\0');
        for (Eigen::Index k = 0; k < values.size(); ++k)
            put_le32(bytes.data() + 4 * k, float(values.data()[k]));  // row-major storage
        write_text_file((fs::path(dir) / name).string(), bytes);
    }
    meta["slices"] = names;
    if (!info.stimulus_id.empty())
        meta["stimulus"] = {{"stimulus_id", info.stimulus_id}, {"width", info.width}, {"height", info.height}};
    write_json_file((fs::path(dir) / "volume.json").string(), meta);
}

StoredVolume read_volume(const std::string& dir) {
    StoredVolume out;
    json meta = read_json_file((fs::path(dir) / "volume.json").string());
    try {
        if (meta.value("byte_order", "little") != "little") throw Error(dir + ": only little-endian volumes supported");
        if (meta.value("dtype", "float32") != "float32") throw Error(dir + ": only float32 volumes supported");
        const int w = meta.at("width").get<int>(), h = meta.at("height").get<int>();
        if (w <= 0 || h <= 0) throw Error(dir + ": volume dimensions must be positive");
        out.volume.boundaries_ms = meta.at("boundaries_ms").get<std::vector<double>>();
        std::vector<std::string> names;
        if (meta.contains("slices")) {
            names = meta.at("slices").get<std::vector<std::string>>();
        } else {
            for (std::size_t i = 0; i < out.volume.boundaries_ms.size(); ++i)
                names.push_back("slice_" + std::to_string(i) + ".f32");
        }
        for (const auto& name : names) {
            fs::path p = fs::path(dir) / name;
            std::ifstream in(p, std::ios::binary);
            if (!in) throw Error("cannot open " + p.string());
            std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
            if (bytes.size() != std::size_t(w) * std::size_t(h) * 4)
                throw Error(p.string() + ": expected " + std::to_string(std::size_t(w) * h * 4) + " bytes");
            AttentionMap m(Grid{w, h});
            for (Eigen::Index k = 0; k < m.values.size(); ++k) m.values.data()[k] = get_le32(bytes.data() + 4 * k);
            out.volume.slices.push_back(std::move(m));
        }
        if (meta.contains("stimulus")) {
            const auto& s = meta.at("stimulus");
            out.stimulus = {s.at("stimulus_id").get<std::string>(), s.value("width", 0), s.value("height", 0)};
        }
    } catch (const json::exception& e) {
        throw Error(dir + "/volume.json: " + e.what());
    }
    out.volume.check();
    return out;
}

}  // namespace scanviz
