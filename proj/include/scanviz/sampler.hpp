#pragma once

#include "scanviz/core.hpp"
#include "scanviz/json_io.hpp"
#include "scanviz/rng.hpp"
#include "scanviz/types.hpp"

#include <map>
#include <span>
#include <string>
#include <vector>

namespace scanviz::sampler {

// Ex-Gaussian durations -------------------------------------------------------------

double exgaussian_logpdf(double x, const ExGaussianParams& p);
double exgaussian_log_likelihood(std::span<const double> xs, const ExGaussianParams& p);

struct ExGaussianFit {
    ExGaussianParams params;
    double log_likelihood = 0.0;
    bool tau_fallback = false;  // sample skewness was not positive; tau pinned to epsilon
    std::vector<std::string> warnings;
};

inline constexpr double kTauEpsilon = 1e-6;

/// Method-of-moments start (tau from skewness), refined by maximum likelihood.
ExGaussianFit fit_exgaussian(std::span<const double> durations_ms);

/// Normal(mu, sigma) + Exponential(mean tau); non-positive draws are redrawn.
double sample_duration(const ExGaussianParams& p, Rng& rng);

// Scanpath length -------------------------------------------------------------------------

struct LengthHistogram {
    std::map<int, double> weights;  // length → (unnormalised) probability

    static LengthHistogram from_lengths(std::span<const int> lengths);
    int max_length() const;
};

/// Inverse-CDF draw from the histogram, clamped to [1, max length].
int sample_length(const LengthHistogram& h, Rng& rng);

// Slice allocation ----------------------------------------------------------------------------

struct SliceAllocation {
    std::vector<int> slice;          // slice of each kept fixation
    std::vector<double> onsets_ms;   // cumulative onsets of kept fixations
    std::size_t realised_length = 0;
};

/// Onset k = sum of durations before k; slice = first boundary exceeding the onset.
/// Fixations starting at or after the last boundary are dropped.
SliceAllocation allocate_slices(std::span<const double> durations_ms, std::span<const double> boundaries_ms);

// Spatial sampling -------------------------------------------------------------------------------

struct CellDraw {
    Cell cell;
    double gx = 0.0;  // continuous grid coordinate, uniform within the cell
    double gy = 0.0;
    bool mask_fallback = false;  // masked product had no mass; drawn from the bare slice
};

/// Unnormalised Gaussian centred on `center`, σ = sigma_frac · min(w, h) cells.
/// An infinite sigma_frac yields an all-ones mask.
AttentionMap foveal_mask(Cell center, Grid g, double sigma_frac);

/// Multinomial draw over slice ⊙ mask (mask optional).
CellDraw sample_fixation(const AttentionMap& slice, const AttentionMap* mask, Rng& rng);

// Generation -----------------------------------------------------------------------------------------

struct SamplerConfig {
    ExGaussianParams exg{124.06, 17.49, 89.37};
    LengthHistogram lengths;
    double fovea_sigma_frac = 0.15;
    std::uint64_t seed = 0;
};

void to_json(json& j, const SamplerConfig& c);
void from_json(const json& j, SamplerConfig& c);
SamplerConfig load_config(const std::string& path);

/// Fits durations and the length histogram on the training split (or all scanpaths when
/// the dataset has no split), after truncating paths to `window_ms`.
SamplerConfig fit_sampler_config(const Dataset& ds, double window_ms);

struct GenerationTrace {
    std::vector<int> slice;    // allocated slice per fixation
    std::vector<Cell> cells;
    std::vector<bool> masked;  // drawn through a foveal mask
    std::vector<Cell> mask_centers;
    std::size_t mask_fallbacks = 0;
};

/// Pixel frame for generated fixations. Zero width/height selects the grid itself.
struct PixelFrame {
    std::string stimulus_id;
    int width = 0;
    int height = 0;
};

/// Foveal attention shift: per slice the first fixation is drawn from the bare slice and
/// every later one from slice ⊙ foveal_mask(previous fixation).
Scanpath generate_scanpath(const AttentionVolume& vol, const SamplerConfig& cfg, const PixelFrame& frame, Rng& rng,
                           GenerationTrace* trace = nullptr);

/// n scanpaths; path i uses the stream derive_seed(cfg.seed, "scanpath", i).
std::vector<Scanpath> generate_scanpaths(const AttentionVolume& vol, const SamplerConfig& cfg,
                                         const PixelFrame& frame, std::size_t n);

}  // namespace scanviz::sampler
