#pragma once

#include <Eigen/Core>
#include <array>
#include <complex>
#include <memory>
#include <optional>
#include <vector>

#include "wgkit/cross_section.hpp"
#include "wgkit/eigensolver.hpp"

namespace wgkit {

enum class Polarization { quasi_te, quasi_tm };

const char* to_string(Polarization p);

// A guided eigenmode of one cross-section. Field samples follow the staggered
// layout documented on CrossSectionGrid. H is stored as eta0 * H so that E and
// H share units; power is integrated over the k0-scaled area, which makes the
// normalized power dimensionless.
struct GuidedMode {
    std::shared_ptr<const CrossSectionGrid> grid;
    double lambda = 0.0;
    double n_eff = 0.0;
    Eigen::ArrayXXcd ex, ey, ez;
    Eigen::ArrayXXcd hx, hy, hz;
    bool power_normalized = false;
    Polarization polarization = Polarization::quasi_te;
    // Fraction of field energy in the outermost 10 % frame of the window.
    double boundary_energy_fraction = 0.0;

    double k0() const;
    // Fraction of transverse electric energy carried by Ex.
    double te_fraction() const;
    bool window_adequate() const { return boundary_energy_fraction < 0.01; }
};

struct SolverOptions {
    int krylov_dim = 0;
    int max_restarts = 200;
    double tolerance = 1e-9;
};

// Guidance classification margin for counting and cutoff searches.
inline constexpr double kGuidanceMargin = 1e-4;

// Returns up to `count` guided modes, largest n_eff first. Modes whose n_eff is
// not strictly between the cladding and core indices are discarded, so an
// empty result means nothing is guided. n_eff_target defaults to n_core.
std::vector<GuidedMode> solve_modes(std::shared_ptr<const CrossSectionGrid> grid, int count,
                                    std::optional<double> n_eff_target = std::nullopt,
                                    const SolverOptions& options = {});

// Everything needed to go from a geometry and wavelength to modes.
struct ModeSetup {
    GridWindow window;
    GridResolution resolution;
    CrossSectionOptions cross_section;
    SolverOptions solver;
    int threads = 0;  // 0 = WGKIT_THREADS or hardware concurrency

    std::shared_ptr<const CrossSectionGrid> grid(const WaveguideGeometry& geom,
                                                 double lambda) const;
};

int count_guided_modes(const WaveguideGeometry& geom, double lambda, const ModeSetup& setup);

// Power flux 1/2 Re(E x H*) . z over the k0-scaled cross-section.
double mode_power(const GuidedMode& mode);
GuidedMode normalize_power(GuidedMode mode);

// |<E_a, E_b>| / (|E_a| |E_b|) over the transverse components; both modes must
// share a grid layout.
double transverse_overlap(const GuidedMode& a, const GuidedMode& b);

// Bilinear interpolation of (Ex, Ey, Ez) at (x, y), each component from its
// own staggered lattice. Tangential components vanish on the window edge.
std::array<std::complex<double>, 3> field_at(const GuidedMode& mode, double x, double y);

struct DispersionCurve {
    std::vector<double> lambdas;
    // neff[branch][sample]; empty optional where the branch is cut off.
    std::vector<std::vector<std::optional<double>>> neff;
    WaveguideGeometry geometry;
};

DispersionCurve dispersion_sweep(const WaveguideGeometry& geom, const std::vector<double>& lambdas,
                                 int modes, const ModeSetup& setup);

struct WavelengthInterval {
    double from = 0.0;
    double to = 0.0;
};

// Intervals where exactly one mode is guided. Interior edges are bisected to
// 1 nm; step must not exceed 10 nm.
std::vector<WavelengthInterval> single_mode_window(const WaveguideGeometry& geom, double lambda_from,
                                                   double lambda_to, double step,
                                                   const ModeSetup& setup);

struct CutoffResult {
    double height = 0.0;
    // True when the fundamental is still guided at the lower bracket end; the
    // cutoff then lies below the searched range and `height` is that end.
    bool below_range = false;
    int solves = 0;
};

CutoffResult cutoff_height(const WaveguideGeometry& geom, double lambda, double h_lo, double h_hi,
                           const ModeSetup& setup, double resolution = 1e-9);

// n_g = n - lambda dn/dlambda from samples at lambda - delta, lambda, lambda + delta.
double group_index_from_samples(double lambda, double delta, double n_minus, double n_center,
                                double n_plus);

struct GroupIndexResult {
    double n_eff = 0.0;
    double n_group = 0.0;
    GuidedMode mode;
};

GroupIndexResult group_index(const WaveguideGeometry& geom, double lambda, int mode_index,
                             const ModeSetup& setup, double delta = 1e-9);

}  // namespace wgkit
