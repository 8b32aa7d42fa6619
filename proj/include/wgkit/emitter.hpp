#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "wgkit/mode_solver.hpp"

namespace wgkit {

// horizontal = across the width (x), vertical = surface normal (y),
// longitudinal = propagation axis (z).
enum class Orientation { horizontal, vertical, longitudinal };

const char* to_string(Orientation o);
Orientation orientation_from_string(const std::string& s);
Eigen::Vector3d unit_vector(Orientation o);

inline constexpr double kDefaultStandoff = 5e-9;

struct DipoleEmitter {
    // Relative to the center of the core's top face.
    double x = 0.0;
    double y = kDefaultStandoff;
    Eigen::Vector3d direction = Eigen::Vector3d::UnitX();
    std::string label = "horizontal";

    static DipoleEmitter on_surface(Orientation o, double standoff = kDefaultStandoff);
    // Throws unless |direction| = 1 within 1e-9.
    void validate() const;
};

struct BetaResult {
    double gamma_wg_ratio = 0.0;
    double rho = 1.0;
    double beta = 0.0;
    double lambda = 0.0;
    std::string orientation;
};

// Guided emission rate into both directions relative to the free-space rate,
// 3 pi n_g |e(r0).d|^2 / (k0^2 \iint eps |e|^2 dA). Independent of the mode's
// normalization.
double gamma_wg_ratio(const GuidedMode& mode, const DipoleEmitter& emitter, double n_group);

BetaResult beta(const GuidedMode& mode, const DipoleEmitter& emitter, double n_group,
                double rho = 1.0);

// One row per (wavelength, orientation), wavelength-major. The emitter's
// position is kept; each orientation replaces its direction.
std::vector<BetaResult> beta_spectrum(const WaveguideGeometry& geom, const DipoleEmitter& emitter,
                                      const std::vector<double>& lambdas,
                                      const std::vector<Orientation>& orientations,
                                      const ModeSetup& setup, double rho = 1.0);

// Largest relative change of beta over standoffs 0..10 nm against the
// emitter's own standoff.
double standoff_sensitivity(const GuidedMode& mode, const DipoleEmitter& emitter, double n_group,
                            double rho = 1.0);

double budget(double beta, double prop_loss_db_per_mm, double length_mm, double taper_eff,
              double detector_eff);

}  // namespace wgkit
