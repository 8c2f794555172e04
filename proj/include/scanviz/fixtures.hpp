#pragma once

#include "scanviz/json_io.hpp"
#include "scanviz/types.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace scanviz::fixtures {

// Synthetic datasets with a known generative process, for oracle tests.
//
// Spec JSON:
//   {"stimuli": [{"stimulus_id", "width", "height",
//                 "elements": [{"class": "T", "box": [x, y, w, h], "z_order"?}]}],
//    "replicate": 1,           copies of the stimulus list ("<id>_<k>")
//    "viewers": 17,
//    "window_ms": 5000,        each path runs until its next onset passes the window
//    "durations": {"mu", "sigma", "tau"} | {"fixed": ms},
//    "slices": [{"end_ms": 500, "attractiveness": {"T": 5, "D": 1}}, ...],
//    "transitions": {"L": {"L": 0.8, "D": 0.2}, ...}}   optional first-order Markov table
//
// Without a transition row, a fixation's class is drawn with probability ∝ attractiveness ·
// class area, so the expected EFD of a class is proportional to its attractiveness. With a
// row, the class follows the Markov table. Positions are uniform inside the class's regions
// (restricted to points the labelling rule assigns to that class).

struct FixtureElement {
    ElementClass element_class = ElementClass::Background;
    Box box;
    std::optional<int> z_order;
};

struct FixtureStimulus {
    std::string stimulus_id;
    int width = 0;
    int height = 0;
    std::vector<FixtureElement> elements;
};

struct FixtureSlice {
    double end_ms = 0.0;
    std::map<ElementClass, double> attractiveness;
};

struct FixtureSpec {
    std::vector<FixtureStimulus> stimuli;
    int replicate = 1;
    int viewers = 17;
    double window_ms = 5000.0;
    ExGaussianParams durations{124.06, 17.49, 89.37};
    std::optional<double> fixed_duration_ms;
    std::vector<FixtureSlice> slices;
    std::map<ElementClass, std::map<ElementClass, double>> transitions;
};

FixtureSpec parse_fixture_spec(const json& j);
FixtureSpec load_fixture_spec(const std::string& path);

/// Builds stimuli from the spec; overlapping elements without an explicit z_order are rejected.
std::vector<Stimulus> fixture_stimuli(const FixtureSpec& spec);

/// Deterministic in (spec, seed). The result carries an alphabetic 5:1 split.
Dataset gen_fixtures(const FixtureSpec& spec, std::uint64_t seed);

}  // namespace scanviz::fixtures
