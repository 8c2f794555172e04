#pragma once

#include "scanviz/types.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace scanviz {

// Region geometry ----------------------------------------------------------

double area(const Region& r);
bool contains(const Region& r, double x, double y);
/// Clip to [0, width) × [0, height). Polygons are clipped with Sutherland-Hodgman.
Region clip(const Region& r, double width, double height);

// Element classes ------------------------------------------------------------

/// Maps raw annotation class names onto the eight merged element classes.
class MergeTable {
public:
    MergeTable();  // default table
    explicit MergeTable(std::map<std::string, ElementClass> table);

    static MergeTable from_json_file(const std::string& path);

    /// Case-insensitive lookup; throws Error naming the class when unknown.
    ElementClass map(std::string_view raw_class) const;
    const std::map<std::string, ElementClass>& entries() const { return table_; }

private:
    std::map<std::string, ElementClass> table_;  // keys lower-cased
};

/// Class of the highest-priority annotation containing the point, '_' when none does.
/// Priority: lowest z_order first, ties broken by smallest area.
ElementClass label_point(double x, double y, const Stimulus& s);
ElementClass label_fixation(const Fixation& f, const Stimulus& s);

/// Total area of all regions labelled `c` on the stimulus.
double class_area(const Stimulus& s, ElementClass c);

// Scanpath validation ---------------------------------------------------------

enum class ViolationKind {
    Empty,
    NonIncreasingOnset,
    NonPositiveDuration,
    NonFiniteValue,
    NegativeOnset,
    ExceedsWindow,
};

struct Violation {
    ViolationKind kind;
    std::size_t index;  // offending fixation
    std::string message;
};

std::string_view to_string(ViolationKind k);

std::vector<Violation> validate_scanpath(const Scanpath& p, double window_ms);

/// Fixations with onset < window_ms; the last one is clipped to end at window_ms.
Scanpath truncate_scanpath(const Scanpath& p, double window_ms);

// Pixel ↔ grid mapping -------------------------------------------------------

struct Cell {
    int cx = 0;
    int cy = 0;
    bool operator==(const Cell&) const = default;
};

/// Proportional mapping of a stimulus pixel coordinate to a grid cell, clamped to the grid.
Cell to_cell(double x, double y, const Stimulus& s, Grid g);
/// Pixel coordinate of a continuous grid coordinate (cell units, cell c spans [c, c+1)).
Point to_pixel(double gx, double gy, const Stimulus& s, Grid g);

}  // namespace scanviz
