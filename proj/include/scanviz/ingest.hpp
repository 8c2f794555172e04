#pragma once

#include "scanviz/core.hpp"
#include "scanviz/json_io.hpp"
#include "scanviz/types.hpp"

#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace scanviz::ingest {

struct GazeKey {
    std::string viewer_id;
    std::string stimulus_id;
    auto operator<=>(const GazeKey&) const = default;
};

struct GazeTable {
    std::map<GazeKey, std::vector<GazeSample>> groups;  // each group sorted by t_ms
    std::size_t rows = 0;
    std::size_t invalid_rows = 0;  // rows whose validity flag is false
};

/// Maps canonical column names (t_ms, x, y, viewer_id, stimulus_id, valid) to the
/// names used by a particular export. Missing entries use the canonical name.
using ColumnMapping = std::map<std::string, std::string>;

ColumnMapping load_column_mapping(const std::string& path);

/// Parses a gaze CSV. The header row is required; errors name the 1-based file line.
GazeTable parse_gaze_samples(const std::string& path, const ColumnMapping& columns = {});
GazeTable parse_gaze_csv(std::istream& in, const ColumnMapping& columns = {});

struct IdtParams {
    double dispersion_px = 35.0;
    double min_duration_ms = 100.0;
};

/// Dispersion-threshold fixation detection. Dispersion is (max x - min x) + (max y - min y);
/// invalid samples terminate the current window.
std::vector<Fixation> detect_fixations_idt(const std::vector<GazeSample>& samples, const IdtParams& params = {});

struct AnnotationImport {
    std::vector<ElementAnnotation> annotations;
    std::vector<std::string> warnings;
};

/// Stimulus sizes used for clipping, keyed by stimulus id.
using StimulusBounds = std::map<std::string, std::pair<int, int>>;

/// Reads a JSON array of {stimulus_id, raw_class, box: [x, y, w, h] | polygon, z_order}.
/// Raw classes go through the merge table; regions are clipped to the stimulus and
/// zero-area regions are dropped with a warning.
AnnotationImport parse_annotations(const std::string& path, const StimulusBounds& bounds,
                                   const MergeTable& table = MergeTable());
AnnotationImport parse_annotations_json(const nlohmann::json& j, const StimulusBounds& bounds,
                                        const MergeTable& table = MergeTable());

/// Reads a JSON array of {stimulus_id, width, height, image?}.
std::vector<Stimulus> load_stimulus_list(const std::string& path);

/// Assigns roles cyclically over the sorted stimulus ids: `train` train slots then `eval` eval slots.
Dataset split_alphabetic(Dataset ds, int train = 5, int eval = 1);

struct IngestOptions {
    IdtParams idt;
    ColumnMapping columns;
    MergeTable merge;
    int split_train = 5;
    int split_eval = 1;
};

struct IngestResult {
    Dataset dataset;
    std::size_t invalid_rows = 0;
    std::vector<std::string> warnings;
};

/// Full import: stimuli + annotations + gaze → fixations → split dataset.
IngestResult ingest(const std::string& gaze_csv, const std::string& annotations_json,
                    const std::string& stimuli_json, const IngestOptions& opts = {});

}  // namespace scanviz::ingest
