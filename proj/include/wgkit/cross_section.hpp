#pragma once

#include <Eigen/Core>
#include <algorithm>

#include "wgkit/materials.hpp"

namespace wgkit {

// Strip waveguide: a core rectangle (or trapezoid for non-zero sidewall angle)
// sitting on a substrate half-space, surrounded above and beside by the
// superstrate. Lengths in m, angle in rad.
struct WaveguideGeometry {
    double core_width = 700e-9;
    double core_height = 100e-9;
    MaterialModel core = tantala_default();
    MaterialModel substrate = fused_silica_malitson();
    MaterialModel superstrate = air();
    double sidewall_angle = 0.0;

    void validate() const;
    // n_core > max(n_substrate, n_superstrate) at lambda.
    bool supports_guidance(double lambda) const;
    double max_cladding_index(double lambda) const;
};

struct GridWindow {
    double x_extent = 4e-6;
    double y_extent = 3e-6;
};

struct GridResolution {
    double dx = 10e-9;
    double dy = 10e-9;
};

struct CrossSectionOptions {
    // Minimum cladding between core and window edge. A core wider than the
    // window is accepted as a laterally invariant slab.
    double min_margin = 1e-6;
    // Sub-samples per axis used for interface averaging; must be even.
    int subsamples = 8;
};

// Staggered (Yee) permittivity map of the cross-section. Origin at the core
// center; x spans [-X/2, X/2], y spans [-Y/2, Y/2]. Nodes sit at
// x_i = (i - nx/2) dx, y_j = (j - ny/2) dy, and the outer boundary is a
// perfect electric conductor, so only interior tangential samples are stored:
//   Ex, Hy : (x_{i+1/2}, y_j)      i in [0, nx),   j in [1, ny)   -> nx x (ny-1)
//   Ey, Hx : (x_i, y_{j+1/2})      i in [1, nx),   j in [0, ny)   -> (nx-1) x ny
//   Ez     : (x_i, y_j)            i in [1, nx),   j in [1, ny)   -> (nx-1) x (ny-1)
//   Hz     : (x_{i+1/2}, y_{j+1/2})                               -> nx x ny
struct CrossSectionGrid {
    double lambda = 0.0;
    int nx = 0;
    int ny = 0;
    double dx = 0.0;
    double dy = 0.0;

    Eigen::ArrayXXd eps_x;
    Eigen::ArrayXXd eps_y;
    Eigen::ArrayXXd eps_z;

    double n_core = 1.0;
    double n_substrate = 1.0;
    double n_superstrate = 1.0;
    double core_width = 0.0;
    double core_height = 0.0;

    double x_extent() const { return nx * dx; }
    double y_extent() const { return ny * dy; }
    // Exact mirror images: x_node(nx - i) == -x_node(i).
    double x_node(int i) const { return (2 * i - nx) * (0.5 * dx); }
    double y_node(int j) const { return (2 * j - ny) * (0.5 * dy); }
    double x_center(int i) const { return (2 * i + 1 - nx) * (0.5 * dx); }
    double y_center(int j) const { return (2 * j + 1 - ny) * (0.5 * dy); }

    int ex_count() const { return nx * (ny - 1); }
    int ey_count() const { return (nx - 1) * ny; }
    double max_cladding_index() const { return std::max(n_substrate, n_superstrate); }

    bool same_layout(const CrossSectionGrid& other) const;
};

// Relative permittivity of the layer stack at a point (no averaging).
double permittivity_at(const WaveguideGeometry& geom, double lambda, double x, double y);

// Throws DomainError for non-positive resolution or a window without the
// required cladding margin.
CrossSectionGrid build_cross_section(const WaveguideGeometry& geom, double lambda,
                                     const GridWindow& window, const GridResolution& resolution,
                                     const CrossSectionOptions& options = {});

}  // namespace wgkit
