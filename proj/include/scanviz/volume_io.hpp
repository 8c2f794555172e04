#pragma once

#include "scanviz/types.hpp"

#include <string>

namespace scanviz {

// On-disk attention volume: a directory holding
//   volume.json   {"format": "scanviz-volume", "version": 1, "width", "height",
//                  "boundaries_ms": [...], "byte_order": "little", "dtype": "float32",
//                  "slices": ["slice_0.f32", ...], "stimulus": {"stimulus_id", "width", "height"}?}
//   slice_<i>.f32 width·height little-endian IEEE-754 binary32 values, row-major.

struct VolumeStimulusInfo {
    std::string stimulus_id;
    int width = 0;   // stimulus pixels; 0 when the producer did not record them
    int height = 0;
};

struct StoredVolume {
    AttentionVolume volume;
    VolumeStimulusInfo stimulus;
};

void write_volume(const std::string& dir, const AttentionVolume& v, const VolumeStimulusInfo& info = {});
StoredVolume read_volume(const std::string& dir);

}  // namespace scanviz
