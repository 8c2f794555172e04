#pragma once

#include "scanviz/types.hpp"

#include <array>
#include <map>
#include <string>
#include <vector>

namespace scanviz::attnmap {

/// Cell = 1 iff at least one fixation maps into it.
FixationMap fixation_map(const std::vector<Fixation>& fixations, const Stimulus& s, Grid g);

/// Separable Gaussian blur truncated at 4σ (zero padding), normalised to sum 1.
/// Throws when the fixation map is empty.
AttentionMap blur_to_saliency(const FixationMap& fm, double sigma_cells);

/// Unnormalised blur of an arbitrary raster, same kernel as blur_to_saliency.
Raster<double> gaussian_blur(const Raster<double>& in, double sigma_cells);

/// Ground-truth saliency blur: σ = sigma_px stimulus pixels, expressed in grid cells.
double sigma_in_cells(double sigma_px, const Stimulus& s, Grid g);

/// Paints every cell with the value of the element class covering its centre pixel.
/// Background cells get 0.
AttentionMap element_value_map(const Stimulus& s, const std::map<ElementClass, double>& class_values, Grid g);

/// Element-EFD map over [t0, t1): each cell gets the EFD of the class covering it.
AttentionMap element_efd_map(const Stimulus& s, const std::vector<Fixation>& fixations, double t0_ms, double t1_ms,
                             Grid g, std::vector<std::string>* warnings = nullptr);

/// Isotropic Gaussian centred on the grid, σ = sigma_frac · min(w, h), normalised.
AttentionMap center_bias_map(Grid g, double sigma_frac);

enum class FirstSlice { Mde, Center };

struct VolumeOptions {
    std::vector<double> boundaries_ms = {500.0, 2000.0, 5000.0};
    FirstSlice first_slice = FirstSlice::Center;
    double center_blend = 0.5;         // weight of the centre-bias map in slice 0
    double center_sigma_frac = 0.25;
    double floor_eps = 1e-6;           // zero cells get eps · (slice mass) before normalisation
};

/// Class → EFD per slice window; the values painted into each volume slice.
using SliceClassValues = std::vector<std::map<ElementClass, double>>;

/// Per-slice class EFD measured on the stimulus's own fixations.
SliceClassValues stimulus_class_efd(const Stimulus& s, const std::vector<Fixation>& fixations,
                                    const std::vector<double>& boundaries_ms);

/// Per-slice class EFD averaged over the given stimuli (each pooling its own scanpaths).
SliceClassValues prior_class_efd(const Dataset& ds, const std::vector<std::string>& stimulus_ids,
                                 const std::vector<double>& boundaries_ms);

/// Normalises a painted slice: applies the ε floor to zero cells, falls back to uniform
/// when the slice carries no mass at all.
AttentionMap finalize_slice(AttentionMap m, double floor_eps, std::vector<std::string>* warnings = nullptr);

/// Multi-duration element attention volume from class values painted on the layout.
AttentionVolume build_volume_from_values(const Stimulus& s, const SliceClassValues& values, Grid g,
                                         const VolumeOptions& opts = {}, std::vector<std::string>* warnings = nullptr);

/// Multi-duration element attention volume from the stimulus's fixations.
AttentionVolume build_volume(const Stimulus& s, const std::vector<Fixation>& fixations, Grid g,
                             const VolumeOptions& opts = {}, std::vector<std::string>* warnings = nullptr);

/// Number of fixations whose onset falls into each slice window.
std::vector<std::size_t> slice_fixation_counts(const std::vector<Fixation>& fixations,
                                               const std::vector<double>& boundaries_ms);

std::vector<Fixation> all_fixations(const Dataset& ds, const std::string& stimulus_id);

}  // namespace scanviz::attnmap
