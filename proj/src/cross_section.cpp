#include "wgkit/cross_section.hpp"

#include <cmath>

namespace wgkit {

void WaveguideGeometry::validate() const {
    if (!(core_width > 0.0)) throw DomainError("geometry: core width must be positive");
    if (!(core_height > 0.0)) throw DomainError("geometry: core height must be positive");
    if (!(std::abs(sidewall_angle) < 1.2))
        throw DomainError("geometry: sidewall angle out of range");
    // A trapezoid must keep a positive top width.
    if (core_width - 2.0 * core_height * std::tan(sidewall_angle) <= 0.0)
        throw DomainError("geometry: sidewall angle closes the core top");
}

double WaveguideGeometry::max_cladding_index(double lambda) const {
    return std::max(refractive_index(substrate, lambda), refractive_index(superstrate, lambda));
}

bool WaveguideGeometry::supports_guidance(double lambda) const {
    return refractive_index(core, lambda) > max_cladding_index(lambda);
}

bool CrossSectionGrid::same_layout(const CrossSectionGrid& other) const {
    return nx == other.nx && ny == other.ny && dx == other.dx && dy == other.dy;
}

namespace {

struct StackPermittivity {
    double core, substrate, superstrate;
    double half_height, half_width, slope;

    double operator()(double x, double y) const {
        if (y < -half_height) return substrate;
        if (y > half_height) return superstrate;
        const double hw = half_width - (y + half_height) * slope;
        return std::abs(x) <= hw ? core : superstrate;
    }
};

StackPermittivity make_stack(const WaveguideGeometry& geom, double lambda) {
    const double nc = refractive_index(geom.core, lambda);
    const double ns = refractive_index(geom.substrate, lambda);
    const double nu = refractive_index(geom.superstrate, lambda);
    return {nc * nc, ns * ns, nu * nu, 0.5 * geom.core_height, 0.5 * geom.core_width,
            std::tan(geom.sidewall_angle)};
}

enum class Harmonic { none, along_x, along_y };

// Averages eps over the dual cell centered at (xc, yc). Sub-samples are summed
// in mirrored pairs so that mirrored cells give bit-identical results.
template <class Eps>
double cell_average(const Eps& eps, double xc, double yc, double dx, double dy, int s,
                    Harmonic mode) {
    const double inv2s = 1.0 / (2.0 * s);
    auto offset = [&](int k) { return (2 * k + 1 - s) * inv2s; };
    auto line_mean = [&](auto&& sample, bool harmonic) {
        double acc = 0.0;
        for (int k = 0; k < s / 2; ++k) {
            const double a = sample(k);
            const double b = sample(s - 1 - k);
            acc += harmonic ? (1.0 / a + 1.0 / b) : (a + b);
        }
        return harmonic ? s / acc : acc / s;
    };
    switch (mode) {
    case Harmonic::along_x:
        return line_mean(
            [&](int ky) {
                const double y = yc + offset(ky) * dy;
                return line_mean([&](int kx) { return eps(xc + offset(kx) * dx, y); }, true);
            },
            false);
    case Harmonic::along_y:
        return line_mean(
            [&](int kx) {
                const double x = xc + offset(kx) * dx;
                return line_mean([&](int ky) { return eps(x, yc + offset(ky) * dy); }, true);
            },
            false);
    case Harmonic::none:
    default:
        return line_mean(
            [&](int kx) {
                const double x = xc + offset(kx) * dx;
                return line_mean([&](int ky) { return eps(x, yc + offset(ky) * dy); }, false);
            },
            false);
    }
}

}  // namespace

double permittivity_at(const WaveguideGeometry& geom, double lambda, double x, double y) {
    return make_stack(geom, lambda)(x, y);
}

CrossSectionGrid build_cross_section(const WaveguideGeometry& geom, double lambda,
                                     const GridWindow& window, const GridResolution& resolution,
                                     const CrossSectionOptions& options) {
    geom.validate();
    if (!(resolution.dx > 0.0) || !(resolution.dy > 0.0))
        throw DomainError("grid: resolution must be positive");
    if (!(window.x_extent > 0.0) || !(window.y_extent > 0.0))
        throw DomainError("grid: window extent must be positive");
    if (options.subsamples < 2 || options.subsamples % 2 != 0)
        throw DomainError("grid: subsamples must be a positive even number");

    const bool lateral_slab = geom.core_width >= window.x_extent;
    if (!lateral_slab && 0.5 * (window.x_extent - geom.core_width) < options.min_margin)
        throw DomainError("grid: window too small in x for the required cladding margin");
    if (0.5 * (window.y_extent - geom.core_height) < options.min_margin)
        throw DomainError("grid: window too small in y for the required cladding margin");

    CrossSectionGrid g;
    g.lambda = lambda;
    g.nx = std::max(2, static_cast<int>(std::lround(window.x_extent / resolution.dx)));
    g.ny = std::max(2, static_cast<int>(std::lround(window.y_extent / resolution.dy)));
    g.dx = window.x_extent / g.nx;
    g.dy = window.y_extent / g.ny;
    g.n_core = refractive_index(geom.core, lambda);
    g.n_substrate = refractive_index(geom.substrate, lambda);
    g.n_superstrate = refractive_index(geom.superstrate, lambda);
    g.core_width = geom.core_width;
    g.core_height = geom.core_height;

    const auto eps = make_stack(geom, lambda);
    const int s = options.subsamples;

    g.eps_x.resize(g.nx, g.ny - 1);
    for (int i = 0; i < g.nx; ++i)
        for (int j = 1; j < g.ny; ++j)
            g.eps_x(i, j - 1) =
                cell_average(eps, g.x_center(i), g.y_node(j), g.dx, g.dy, s, Harmonic::along_x);

    g.eps_y.resize(g.nx - 1, g.ny);
    for (int i = 1; i < g.nx; ++i)
        for (int j = 0; j < g.ny; ++j)
            g.eps_y(i - 1, j) =
                cell_average(eps, g.x_node(i), g.y_center(j), g.dx, g.dy, s, Harmonic::along_y);

    g.eps_z.resize(g.nx - 1, g.ny - 1);
    for (int i = 1; i < g.nx; ++i)
        for (int j = 1; j < g.ny; ++j)
            g.eps_z(i - 1, j - 1) =
                cell_average(eps, g.x_node(i), g.y_node(j), g.dx, g.dy, s, Harmonic::none);

    return g;
}

}  // namespace wgkit
