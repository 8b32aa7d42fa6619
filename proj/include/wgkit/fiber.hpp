#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "wgkit/mode_solver.hpp"

namespace wgkit {

struct FiberSpec {
    double mode_field_diameter = 4.0e-6;
    double lambda = 658e-9;
    void validate() const;
};

struct TaperProfile {
    double tip_width = 100e-9;
    double end_width = 700e-9;
    double length = 300e-6;
    double height = 100e-9;
    void validate() const;
};

// Linearly x-polarized Gaussian (waist = MFD/2) centered on the window, with
// Hy = n_substrate * Ex, power-normalized on the grid. The window must span at
// least twice the MFD in both directions.
GuidedMode gaussian_fiber_mode(const FiberSpec& fiber, std::shared_ptr<const CrossSectionGrid> grid);

// |<a, b>|^2 / (|a|^2 |b|^2). By default only the dominant transverse
// component of `a` is used; `vectorial` includes both Ex and Ey.
double overlap(const GuidedMode& a, const GuidedMode& b, bool vectorial = false);

struct TaperPoint {
    double tip_width = 0.0;
    std::optional<double> eta;  // empty: no quasi-TE mode guided at this width
    std::optional<double> n_eff;
};

struct TaperSweep {
    std::vector<TaperPoint> points;  // ascending width, whatever the input order
    std::optional<double> best_width;
    std::optional<double> best_eta;
};

TaperSweep taper_coupling_sweep(const WaveguideGeometry& geom, const std::vector<double>& tip_widths,
                                const FiberSpec& fiber, const ModeSetup& setup,
                                bool vectorial = false);

// (n_eff of the fundamental, nearest other index) at a given core width.
using IndexPairProvider = std::function<std::pair<double, double>(double width)>;

IndexPairProvider solver_index_pairs(const WaveguideGeometry& geom, double lambda,
                                     const ModeSetup& setup);

// min over stations of W (n1 - n2) / lambda / |dW/dz|. +inf for a taper with
// no slope.
double adiabaticity_margin(const TaperProfile& taper, double lambda, const IndexPairProvider& provider,
                           int stations = 10);

enum class NaNormalization {
    total_power,       // all spatial-frequency power
    propagating_disc,  // only |k_t| <= k0
};

struct NaOptions {
    int pad_factor = 4;
    NaNormalization normalization = NaNormalization::total_power;
};

struct NaResult {
    double fraction = 0.0;              // per the chosen normalization
    double fraction_of_total = 0.0;
    double fraction_of_propagating = 0.0;
    double evanescent_fraction = 0.0;   // share of power with |k_t| > k0
    double parseval_residual = 0.0;     // |k-space power / real-space power - 1|
};

NaResult na_collection(const GuidedMode& mode, double na, const NaOptions& options = {});

}  // namespace wgkit
