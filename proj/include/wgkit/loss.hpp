#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "wgkit/cross_section.hpp"

namespace wgkit {

double to_total_loss_db(double transmission);

struct CutbackEntry {
    double length_mm = 0.0;
    double loss_db = 0.0;
    bool excluded = false;
    std::string reason;
    std::optional<double> sigma_db;  // only used by the weighted fit
};

struct CutbackDataset {
    std::vector<CutbackEntry> entries;

    void add_transmission(double length_mm, double transmission, bool excluded = false,
                          std::string reason = {});
    void add_loss_db(double length_mm, double loss_db, bool excluded = false, std::string reason = {});
};

struct LossFit {
    double slope = 0.0;          // dB/mm
    double slope_err = 0.0;
    double intercept = 0.0;      // dB
    double intercept_err = 0.0;
    double covariance = 0.0;     // slope-intercept, dB^2/mm
    int n_points = 0;
    bool degenerate = false;     // two points: exact interpolation, no error estimate
    std::vector<std::size_t> excluded;
};

LossFit fit_cutback(const CutbackDataset& data, bool weighted = false);

struct InsertionLoss {
    double value = 0.0;
    double error = 0.0;
    bool negative = false;
};

InsertionLoss insertion_loss(const LossFit& fit, double l_out_db);

struct CoverageResult {
    int trials = 0;
    double slope_coverage = 0.0;          // |slope - truth| <= k * fitted SE
    double intercept_coverage = 0.0;
    double slope_coverage_known_sigma = 0.0;  // SE from the true noise level
};

// Seeded Monte-Carlo of the fit's error bars. Trial t draws from its own
// generator seeded from (master_seed, t), so results do not depend on how
// trials are scheduled.
CoverageResult cutback_coverage(double slope, double intercept, const std::vector<double>& lengths_mm,
                                double sigma_db, int trials, std::uint64_t master_seed,
                                double k_se = 3.0, int threads = 0);

// Three-layer TE slab: film index n_f, thickness t, substrate n_s, cover n_c.
// Returns the fundamental effective index, or nothing below cutoff.
std::optional<double> te_slab_neff(double n_f, double n_s, double n_c, double thickness,
                                   double lambda);

struct SlabEquivalent {
    double n1 = 0.0;          // core of the planar guide (film effective index)
    double n2 = 0.0;          // lateral cladding
    double half_width = 0.0;  // d
    double lateral_neff = 0.0;
};

SlabEquivalent effective_slab_reduction(const WaveguideGeometry& geom, double lambda);

struct RoughnessSpec {
    double sigma = 0.0;               // RMS, m
    double correlation_length = 50e-9;
    void validate() const;
};

enum class PayneLaceyMode { full, upper_bound };

struct PayneLaceyOptions {
    PayneLaceyMode mode = PayneLaceyMode::full;
    double kappa = 0.76;  // upper-bound factor
};

// Sidewall scattering loss in dB/mm for an exponential autocorrelation.
double payne_lacey_alpha(const SlabEquivalent& slab, const RoughnessSpec& roughness, double lambda,
                         const PayneLaceyOptions& options = {});

// sigma giving alpha_db_per_mm; exact by the sigma^2 scaling.
double payne_lacey_sigma_for(const SlabEquivalent& slab, double alpha_db_per_mm,
                             double correlation_length, double lambda,
                             const PayneLaceyOptions& options = {});

}  // namespace wgkit
