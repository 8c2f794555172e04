#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace scanviz {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Row-major raster: rows = height (y), cols = width (x), matching the on-disk slice layout.
template <typename Scalar>
using Raster = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using Point = Eigen::Vector2d;

enum class ElementClass : std::uint8_t { A, X, G, L, O, T, S, D, Background };

inline constexpr std::string_view kClassLetters = "AXGLOTSD_";
inline constexpr int kNumElementClasses = 8;  // excluding background

char to_char(ElementClass c);
ElementClass class_from_char(char c);  // throws Error on an unknown letter

struct GazeSample {
    double t_ms = 0.0;
    double x = 0.0;
    double y = 0.0;
    std::string viewer_id;
    bool valid = true;
};

struct Fixation {
    double x = 0.0;
    double y = 0.0;
    double onset_ms = 0.0;
    double duration_ms = 0.0;

    Point position() const { return {x, y}; }
    bool operator==(const Fixation&) const = default;
};

struct Scanpath {
    std::string stimulus_id;
    std::string viewer_id;
    std::vector<Fixation> fixations;

    std::size_t size() const { return fixations.size(); }
    bool operator==(const Scanpath&) const = default;
};

/// Axis-aligned box, half-open: [x, x + w) × [y, y + h).
struct Box {
    double x = 0.0;
    double y = 0.0;
    double w = 0.0;
    double h = 0.0;
    bool operator==(const Box&) const = default;
};

using Polygon = std::vector<Point>;
using Region = std::variant<Box, Polygon>;

struct ElementAnnotation {
    std::string stimulus_id;
    ElementClass element_class = ElementClass::Background;
    Region region;
    int z_order = 0;  // smaller wins
};

struct Stimulus {
    std::string stimulus_id;
    int width = 0;
    int height = 0;
    std::string image;  // optional bitmap path, passed through to renderers
    std::vector<ElementAnnotation> annotations;

    double diagonal() const;
};

struct Grid {
    int width = 0;
    int height = 0;

    Eigen::Index cells() const { return Eigen::Index(width) * height; }
    bool operator==(const Grid&) const = default;
};

/// Default attention grid: 256 cells wide, height scaled by the stimulus aspect ratio.
Grid default_grid(const Stimulus& s, int cells_wide = 256);

struct AttentionMap {
    Raster<double> values;
    bool normalized = false;

    AttentionMap() = default;
    explicit AttentionMap(Grid g, double fill = 0.0)
        : values(Raster<double>::Constant(g.height, g.width, fill)) {}
    explicit AttentionMap(Raster<double> v, bool norm = false) : values(std::move(v)), normalized(norm) {}

    Grid grid() const { return {int(values.cols()), int(values.rows())}; }
    double sum() const { return values.sum(); }
};

struct FixationMap {
    Raster<std::uint8_t> cells;

    Grid grid() const { return {int(cells.cols()), int(cells.rows())}; }
    Eigen::Index count() const { return (cells != 0).count(); }
};

struct AttentionVolume {
    std::vector<AttentionMap> slices;
    std::vector<double> boundaries_ms;  // slice end times, strictly increasing

    Grid grid() const { return slices.empty() ? Grid{} : slices.front().grid(); }
    /// Index of the slice that contains time t, or nullopt when t is past the last boundary.
    std::optional<std::size_t> slice_at(double t_ms) const;
    void check() const;  // throws Error when the volume invariants are violated
};

struct ExGaussianParams {
    double mu = 0.0;
    double sigma = 1.0;
    double tau = 1.0;

    double mean() const { return mu + tau; }
};

enum class SplitRole { Train, Eval };

struct Dataset {
    std::vector<Stimulus> stimuli;
    std::vector<Scanpath> scanpaths;
    std::map<std::string, SplitRole> split;

    const Stimulus& stimulus(const std::string& id) const;
    const Stimulus* find_stimulus(const std::string& id) const;
    std::vector<const Scanpath*> scanpaths_for(const std::string& stimulus_id) const;
    void check() const;
};

}  // namespace scanviz
