#include "wgkit/fiber.hpp"

#include <algorithm>
#include <cmath>
#include <Eigen/Eigenvalues>
#include <numbers>
#include <unsupported/Eigen/FFT>

#include "wgkit/parallel.hpp"

namespace wgkit {

void FiberSpec::validate() const {
    if (!(lambda > 0.0)) throw DomainError("fiber: wavelength must be positive");
    if (!(mode_field_diameter > 0.5 * lambda))
        throw DomainError("fiber: mode field diameter must exceed half the wavelength");
}

void TaperProfile::validate() const {
    if (!(tip_width > 0.0)) throw DomainError("taper: tip width must be positive");
    if (!(end_width >= tip_width)) throw DomainError("taper: tip wider than the end");
    if (!(length > 0.0)) throw DomainError("taper: length must be positive");
    if (!(height > 0.0)) throw DomainError("taper: height must be positive");
}

GuidedMode gaussian_fiber_mode(const FiberSpec& fiber, std::shared_ptr<const CrossSectionGrid> grid) {
    fiber.validate();
    if (!grid) throw DomainError("gaussian_fiber_mode: no grid");
    const auto& g = *grid;
    const double mfd = fiber.mode_field_diameter;
    if (g.x_extent() < 2.0 * mfd || g.y_extent() < 2.0 * mfd)
        throw DomainError("gaussian_fiber_mode: window must be at least twice the mode field diameter");

    const double w0 = 0.5 * mfd;
    GuidedMode m;
    m.lambda = g.lambda;
    m.n_eff = g.n_substrate;
    m.polarization = Polarization::quasi_te;
    m.ex.resize(g.nx, g.ny - 1);
    for (int i = 0; i < g.nx; ++i)
        for (int jp = 0; jp < g.ny - 1; ++jp) {
            const double x = g.x_center(i);
            const double y = g.y_node(jp + 1);
            m.ex(i, jp) = std::exp(-(x * x + y * y) / (w0 * w0));
        }
    m.hy = m.ex * g.n_substrate;
    m.ey = Eigen::ArrayXXcd::Zero(g.nx - 1, g.ny);
    m.hx = Eigen::ArrayXXcd::Zero(g.nx - 1, g.ny);
    m.ez = Eigen::ArrayXXcd::Zero(g.nx - 1, g.ny - 1);
    m.hz = Eigen::ArrayXXcd::Zero(g.nx, g.ny);
    m.grid = std::move(grid);
    return normalize_power(std::move(m));
}

double overlap(const GuidedMode& a, const GuidedMode& b, bool vectorial) {
    if (!a.grid || !b.grid || !a.grid->same_layout(*b.grid))
        throw DomainError("overlap: fields live on different grids");
    std::complex<double> inner{};
    double na = 0.0, nb = 0.0;
    auto add = [&](const Eigen::ArrayXXcd& fa, const Eigen::ArrayXXcd& fb) {
        inner += (fa * fb.conjugate()).sum();
        na += fa.abs2().sum();
        nb += fb.abs2().sum();
    };
    if (vectorial) {
        add(a.ex, b.ex);
        add(a.ey, b.ey);
    } else if (a.polarization == Polarization::quasi_te) {
        add(a.ex, b.ex);
    } else {
        add(a.ey, b.ey);
    }
    if (!(na > 0.0)) throw DomainError("overlap: zero field");
    if (nb == 0.0) return 0.0;  // b carries nothing in the compared components
    return std::min(1.0, std::norm(inner) / (na * nb));
}

namespace {

// Near-square tips make the two lowest modes (quasi-)degenerate, and the solver
// then returns an arbitrary mix of them. Any combination is an eigenmode, so
// rotate the pair to the member with the largest Ex share.
GuidedMode most_x_polarized(const GuidedMode& a, const GuidedMode& b) {
    auto dot = [](const Eigen::ArrayXXcd& u, const Eigen::ArrayXXcd& v) { return (u.conjugate() * v).sum(); };
    Eigen::Matrix2cd gx, gy;
    gx << dot(a.ex, a.ex), dot(a.ex, b.ex), dot(b.ex, a.ex), dot(b.ex, b.ex);
    gy << dot(a.ey, a.ey), dot(a.ey, b.ey), dot(b.ey, a.ey), dot(b.ey, b.ey);
    const Eigen::Matrix2cd gt = gx + gy;
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::Matrix2cd> es(gx, gt);
    const Eigen::Vector2cd c = es.eigenvectors().col(1);  // largest Ex share
    GuidedMode m = a;
    m.ex = c(0) * a.ex + c(1) * b.ex;
    m.ey = c(0) * a.ey + c(1) * b.ey;
    m.ez = c(0) * a.ez + c(1) * b.ez;
    m.hx = c(0) * a.hx + c(1) * b.hx;
    m.hy = c(0) * a.hy + c(1) * b.hy;
    m.hz = c(0) * a.hz + c(1) * b.hz;
    const double wa = std::norm(c(0)), wb = std::norm(c(1));
    m.n_eff = (wa * a.n_eff + wb * b.n_eff) / (wa + wb);
    m.polarization = m.te_fraction() >= 0.5 ? Polarization::quasi_te : Polarization::quasi_tm;
    return normalize_power(std::move(m));
}

constexpr double kDegenerateSplit = 1e-4;

}  // namespace

TaperSweep taper_coupling_sweep(const WaveguideGeometry& geom, const std::vector<double>& tip_widths,
                                const FiberSpec& fiber, const ModeSetup& setup, bool vectorial) {
    fiber.validate();
    std::vector<double> widths = tip_widths;
    std::sort(widths.begin(), widths.end());
    widths.erase(std::unique(widths.begin(), widths.end()), widths.end());
    const double min_width = 2.0 * setup.resolution.dx;
    for (double w : widths)
        if (!(w >= min_width))
            throw DomainError("taper_coupling_sweep: tip width below two grid cells");

    auto points = parallel_map(
        widths.size(),
        [&](std::size_t k) {
            WaveguideGeometry g = geom;
            g.core_width = widths[k];
            auto grid = setup.grid(g, fiber.lambda);
            const auto fib = gaussian_fiber_mode(fiber, grid);
            // Thin tips can push quasi-TM above quasi-TE; the fiber is x-polarized.
            // A single Krylov start vector sees only one member of an exactly
            // degenerate pair; asking for three lets round-off expose the second.
            auto modes = solve_modes(grid, 3, std::nullopt, setup.solver);
            if (modes.size() >= 2 && std::abs(modes[0].n_eff - modes[1].n_eff) < kDegenerateSplit)
                modes = {most_x_polarized(modes[0], modes[1])};
            TaperPoint p;
            p.tip_width = widths[k];
            for (const auto& m : modes) {
                if (m.polarization != Polarization::quasi_te) continue;
                p.eta = overlap(m, fib, vectorial);
                p.n_eff = m.n_eff;
                break;
            }
            return p;
        },
        setup.threads);

    TaperSweep out;
    out.points = std::move(points);
    for (const auto& p : out.points)
        if (p.eta && (!out.best_eta || *p.eta > *out.best_eta)) {
            out.best_eta = p.eta;
            out.best_width = p.tip_width;
        }
    return out;
}

IndexPairProvider solver_index_pairs(const WaveguideGeometry& geom, double lambda,
                                     const ModeSetup& setup) {
    return [geom, lambda, setup](double width) {
        WaveguideGeometry g = geom;
        g.core_width = width;
        const auto grid = setup.grid(g, lambda);
        const auto modes = solve_modes(grid, 2, std::nullopt, setup.solver);
        const double clad = grid->max_cladding_index();
        const double n1 = modes.empty() ? clad : modes[0].n_eff;
        const double n2 =
            modes.size() > 1 && modes[1].n_eff > clad + kGuidanceMargin ? modes[1].n_eff : clad;
        return std::pair{n1, n2};
    };
}

double adiabaticity_margin(const TaperProfile& taper, double lambda, const IndexPairProvider& provider,
                           int stations) {
    if (!(taper.length > 0.0)) throw DomainError("adiabaticity_margin: zero-length taper");
    taper.validate();
    if (!(lambda > 0.0)) throw DomainError("adiabaticity_margin: wavelength must be positive");
    if (stations < 10) throw DomainError("adiabaticity_margin: need at least 10 stations");
    const double slope = std::abs(taper.end_width - taper.tip_width) / taper.length;
    if (slope == 0.0) return std::numeric_limits<double>::infinity();

    double margin = std::numeric_limits<double>::infinity();
    for (int k = 0; k < stations; ++k) {
        const double w =
            taper.tip_width + (taper.end_width - taper.tip_width) * k / static_cast<double>(stations - 1);
        const auto [n1, n2] = provider(w);
        margin = std::min(margin, w * (n1 - n2) / lambda / slope);
    }
    return margin;
}

namespace {

int fast_size(int n) {
    int p = 1;
    while (p < n) p <<= 1;
    return p;
}

}  // namespace

NaResult na_collection(const GuidedMode& mode, double na, const NaOptions& options) {
    if (!(na > 0.0 && na <= 1.0)) throw DomainError("na_collection: NA must lie in (0, 1]");
    if (options.pad_factor < 1) throw DomainError("na_collection: pad factor must be >= 1");
    if (!mode.grid) throw DomainError("na_collection: mode has no grid");
    const auto& g = *mode.grid;
    const Eigen::ArrayXXcd& f = mode.polarization == Polarization::quasi_te ? mode.ex : mode.ey;
    const double dx = g.dx, dy = g.dy;
    const int rows = static_cast<int>(f.rows()), cols = static_cast<int>(f.cols());
    const int nx = fast_size(options.pad_factor * rows);
    const int ny = fast_size(options.pad_factor * cols);

    // Row-then-column 1D transforms; padding only refines the k-space sampling.
    Eigen::ArrayXXcd spec = Eigen::ArrayXXcd::Zero(nx, ny);
    spec.topLeftCorner(rows, cols) = f;
    Eigen::FFT<double> fft;
    std::vector<std::complex<double>> in, out;
    in.resize(nx);
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) in[i] = spec(i, j);
        fft.fwd(out, in);
        for (int i = 0; i < nx; ++i) spec(i, j) = out[i];
    }
    in.resize(ny);
    for (int i = 0; i < nx; ++i) {
        for (int j = 0; j < ny; ++j) in[j] = spec(i, j);
        fft.fwd(out, in);
        for (int j = 0; j < ny; ++j) spec(i, j) = out[j];
    }

    const double k0 = mode.k0();
    const double kna2 = (na * k0) * (na * k0);
    const double k02 = k0 * k0;
    const double dkx = 2.0 * std::numbers::pi / (nx * dx);
    const double dky = 2.0 * std::numbers::pi / (ny * dy);
    double inside = 0.0, disc = 0.0, total = 0.0;
    for (int i = 0; i < nx; ++i) {
        const int mi = i < nx / 2 ? i : i - nx;
        const double kx = mi * dkx;
        for (int j = 0; j < ny; ++j) {
            const int mj = j < ny / 2 ? j : j - ny;
            const double ky = mj * dky;
            const double kt2 = kx * kx + ky * ky;
            const double p = std::norm(spec(i, j));
            total += p;
            if (kt2 <= k02) disc += p;
            if (kt2 <= kna2) inside += p;
        }
    }
    const double real_space = f.abs2().sum();
    if (!(real_space > 0.0)) throw DomainError("na_collection: zero field");

    NaResult r;
    r.fraction_of_total = inside / total;
    r.fraction_of_propagating = disc > 0.0 ? inside / disc : 0.0;
    r.evanescent_fraction = (total - disc) / total;
    r.parseval_residual = std::abs(total / (static_cast<double>(nx) * ny) / real_space - 1.0);
    r.fraction = options.normalization == NaNormalization::total_power ? r.fraction_of_total
                                                                        : r.fraction_of_propagating;
    return r;
}

}  // namespace wgkit
