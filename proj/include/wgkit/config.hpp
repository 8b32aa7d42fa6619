#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "wgkit/emitter.hpp"
#include "wgkit/fiber.hpp"
#include "wgkit/loss.hpp"
#include "wgkit/mode_solver.hpp"

namespace wgkit {

// Malformed configuration; the message names the offending key path.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Range {
    double from = 0.0;
    double to = 0.0;
    double step = 0.0;
    std::vector<double> samples() const;  // from, from+step, ..., to (inclusive)
};

struct WorkbenchConfig {
    std::vector<MaterialModel> materials;
    WaveguideGeometry geometry;
    ModeSetup setup;
    int mode_count = 2;
    double wavelength = 658e-9;

    double emitter_x = 0.0;
    double standoff = kDefaultStandoff;
    double rho = 1.0;
    std::vector<Orientation> orientations{Orientation::horizontal, Orientation::vertical,
                                          Orientation::longitudinal};

    FiberSpec fiber;
    bool vectorial_overlap = false;
    // Facet cross-section used for fiber and taper work: its own superstrate
    // and a window large enough for the fiber field.
    std::string facet_superstrate = "SiO2";
    GridWindow facet_window{10e-6, 10e-6};
    GridResolution facet_resolution{25e-9, 25e-9};
    double taper_length = 300e-6;

    Range dispersion{550e-9, 850e-9, 10e-9};
    Range beta_range{620e-9, 800e-9, 20e-9};
    std::vector<double> tip_widths;
    std::vector<double> na_values{0.3, 0.4, 0.5, 0.6, 0.65, 0.7, 0.8, 0.9, 1.0};
    double cutoff_h_lo = 50e-9;
    double cutoff_h_hi = 150e-9;
    NaNormalization na_normalization = NaNormalization::total_power;

    std::optional<double> sigma;  // m; forward Payne-Lacey estimate when set
    double correlation_length = 50e-9;
    double target_alpha_db_per_mm = 1.8;
    PayneLaceyOptions payne_lacey;
    double collection_fraction = 0.623;
    bool weighted_fit = false;

    double budget_beta = 0.35;
    double budget_loss_db_per_mm = 1.8;
    double budget_length_mm = 1.0;
    double budget_taper_eff = 0.57;
    double budget_detector_eff = 1.0;

    std::uint64_t master_seed = 20240501;
    std::string output_dir = "out";

    // Canonical JSON text of the effective configuration (sorted keys).
    std::string canonical;
    std::uint64_t hash = 0;

    const MaterialModel& material(const std::string& name) const;
    // Geometry as seen at the chip facet (superstrate swapped) with its setup.
    WaveguideGeometry facet_geometry() const;
    ModeSetup facet_setup() const;
};

WorkbenchConfig default_config();
WorkbenchConfig parse_config(const std::string& json_text);
WorkbenchConfig load_config(const std::string& path);

std::uint64_t fnv1a64(const std::string& data);

}  // namespace wgkit
