#include "wgkit/mode_solver.hpp"

#include <Eigen/SparseCore>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "wgkit/parallel.hpp"

namespace wgkit {

const char* to_string(Polarization p) { return p == Polarization::quasi_te ? "quasi-TE" : "quasi-TM"; }

double GuidedMode::k0() const { return 2.0 * std::numbers::pi / lambda; }

double GuidedMode::te_fraction() const {
    const double px = ex.abs2().sum();
    const double py = ey.abs2().sum();
    return px + py > 0.0 ? px / (px + py) : 0.0;
}

std::shared_ptr<const CrossSectionGrid> ModeSetup::grid(const WaveguideGeometry& geom,
                                                        double lambda) const {
    return std::make_shared<const CrossSectionGrid>(
        build_cross_section(geom, lambda, window, resolution, cross_section));
}

namespace {

using SpMat = Eigen::SparseMatrix<double>;
using Trip = Eigen::Triplet<double>;
using cd = std::complex<double>;

// Finite-difference curl pieces on the staggered lattice, scaled by 1/k0.
//   ax: Ey -> Hz (d/dx)   ay: Ex -> Hz (d/dy)
//   cx: Ex -> Ez (d/dx)   cy: Ey -> Ez (d/dy)
// The H-side derivatives are the negative transposes of these.
struct Operators {
    SpMat ax, ay, cx, cy;
    SpMat q;  // [Ex; Ey] -> n_eff [Hx; Hy]
    SpMat a;  // [Ex; Ey] -> n_eff^2 [Ex; Ey]
    Eigen::VectorXd inv_eps_z;
};

struct Layout {
    int nx, ny;
    int ex(int i, int jp) const { return i * (ny - 1) + jp; }
    int ey(int ip, int j) const { return ip * ny + j; }
    int hz(int i, int j) const { return i * ny + j; }
    int ez(int ip, int jp) const { return ip * (ny - 1) + jp; }
    int n_ex() const { return nx * (ny - 1); }
    int n_ey() const { return (nx - 1) * ny; }
    int n_hz() const { return nx * ny; }
    int n_ez() const { return (nx - 1) * (ny - 1); }
};

void add_block(std::vector<Trip>& out, const SpMat& m, int r0, int c0, double scale = 1.0) {
    for (int k = 0; k < m.outerSize(); ++k)
        for (SpMat::InnerIterator it(m, k); it; ++it)
            out.emplace_back(r0 + static_cast<int>(it.row()), c0 + static_cast<int>(it.col()),
                             scale * it.value());
}

SpMat diagonal(const Eigen::VectorXd& d) {
    SpMat m(d.size(), d.size());
    std::vector<Trip> t;
    t.reserve(d.size());
    for (Eigen::Index i = 0; i < d.size(); ++i) t.emplace_back(i, i, d[i]);
    m.setFromTriplets(t.begin(), t.end());
    return m;
}

Operators build_operators(const CrossSectionGrid& g) {
    const Layout l{g.nx, g.ny};
    const double k0 = 2.0 * std::numbers::pi / g.lambda;
    const double sx = 1.0 / (k0 * g.dx);
    const double sy = 1.0 / (k0 * g.dy);
    Operators op;

    std::vector<Trip> t;
    t.reserve(2 * l.n_hz());
    for (int i = 0; i < l.nx; ++i)
        for (int j = 0; j < l.ny; ++j) {
            if (i <= l.nx - 2) t.emplace_back(l.hz(i, j), l.ey(i, j), sx);
            if (i >= 1) t.emplace_back(l.hz(i, j), l.ey(i - 1, j), -sx);
        }
    op.ax.resize(l.n_hz(), l.n_ey());
    op.ax.setFromTriplets(t.begin(), t.end());

    t.clear();
    for (int i = 0; i < l.nx; ++i)
        for (int j = 0; j < l.ny; ++j) {
            if (j <= l.ny - 2) t.emplace_back(l.hz(i, j), l.ex(i, j), sy);
            if (j >= 1) t.emplace_back(l.hz(i, j), l.ex(i, j - 1), -sy);
        }
    op.ay.resize(l.n_hz(), l.n_ex());
    op.ay.setFromTriplets(t.begin(), t.end());

    t.clear();
    for (int ip = 0; ip < l.nx - 1; ++ip)
        for (int jp = 0; jp < l.ny - 1; ++jp) {
            t.emplace_back(l.ez(ip, jp), l.ex(ip + 1, jp), sx);
            t.emplace_back(l.ez(ip, jp), l.ex(ip, jp), -sx);
        }
    op.cx.resize(l.n_ez(), l.n_ex());
    op.cx.setFromTriplets(t.begin(), t.end());

    t.clear();
    for (int ip = 0; ip < l.nx - 1; ++ip)
        for (int jp = 0; jp < l.ny - 1; ++jp) {
            t.emplace_back(l.ez(ip, jp), l.ey(ip, jp + 1), sy);
            t.emplace_back(l.ez(ip, jp), l.ey(ip, jp), -sy);
        }
    op.cy.resize(l.n_ez(), l.n_ey());
    op.cy.setFromTriplets(t.begin(), t.end());

    Eigen::VectorXd eps_x(l.n_ex()), eps_y(l.n_ey());
    op.inv_eps_z.resize(l.n_ez());
    for (int i = 0; i < l.nx; ++i)
        for (int jp = 0; jp < l.ny - 1; ++jp) eps_x[l.ex(i, jp)] = g.eps_x(i, jp);
    for (int ip = 0; ip < l.nx - 1; ++ip)
        for (int j = 0; j < l.ny; ++j) eps_y[l.ey(ip, j)] = g.eps_y(ip, j);
    for (int ip = 0; ip < l.nx - 1; ++ip)
        for (int jp = 0; jp < l.ny - 1; ++jp) op.inv_eps_z[l.ez(ip, jp)] = 1.0 / g.eps_z(ip, jp);

    const SpMat bx = -SpMat(op.ax.transpose());
    const SpMat by = -SpMat(op.ay.transpose());
    const SpMat iz = diagonal(op.inv_eps_z);
    const int nex = l.n_ex();
    const int ney = l.n_ey();
    const int n = nex + ney;

    // n [Hx; Hy] = Q [Ex; Ey]; rows: Hx on the Ey lattice, Hy on the Ex lattice.
    {
        const SpMat q11 = bx * op.ay;
        const SpMat q12 = diagonal(eps_y) + SpMat(bx * op.ax);
        const SpMat q21 = diagonal(eps_x) + SpMat(by * op.ay);
        const SpMat q22 = by * op.ax;
        std::vector<Trip> qt;
        qt.reserve(q11.nonZeros() + q12.nonZeros() + q21.nonZeros() + q22.nonZeros());
        add_block(qt, q11, 0, 0);
        add_block(qt, q12, 0, nex, -1.0);
        add_block(qt, q21, ney, 0);
        add_block(qt, q22, ney, nex, -1.0);
        op.q.resize(n, n);
        op.q.setFromTriplets(qt.begin(), qt.end());
    }

    // n [Ex; Ey] = P [Hx; Hy]
    SpMat p(n, n);
    {
        const SpMat cxt = op.cx.transpose();
        const SpMat cyt = op.cy.transpose();
        const SpMat p11 = cxt * iz * op.cy;
        const SpMat p12 = cxt * iz * op.cx;
        const SpMat p21 = cyt * iz * op.cy;
        const SpMat p22 = cyt * iz * op.cx;
        std::vector<Trip> pt;
        pt.reserve(p11.nonZeros() + p12.nonZeros() + p21.nonZeros() + p22.nonZeros() + n);
        add_block(pt, p11, 0, 0);
        add_block(pt, p12, 0, ney, -1.0);
        for (int i = 0; i < nex; ++i) pt.emplace_back(i, ney + i, 1.0);
        add_block(pt, p21, nex, 0);
        for (int i = 0; i < ney; ++i) pt.emplace_back(nex + i, i, -1.0);
        add_block(pt, p22, nex, ney, -1.0);
        p.setFromTriplets(pt.begin(), pt.end());
    }
    op.a = p * op.q;
    op.a.makeCompressed();
    return op;
}

template <class Vec>
Eigen::ArrayXXcd unpack(const Vec& v, int rows, int cols) {
    // Row-major flat index (i * cols + j) into a column-major array.
    Eigen::ArrayXXcd out(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) out(i, j) = v[static_cast<Eigen::Index>(i) * cols + j];
    return out;
}

double frame_energy_fraction(const GuidedMode& m) {
    const auto& g = *m.grid;
    const double xl = 0.4 * g.x_extent();
    const double yl = 0.4 * g.y_extent();
    auto in_frame = [&](double x, double y) { return std::abs(x) > xl || std::abs(y) > yl; };
    double total = 0.0, frame = 0.0;
    auto acc = [&](double w, double x, double y) {
        total += w;
        if (in_frame(x, y)) frame += w;
    };
    for (int i = 0; i < g.nx; ++i)
        for (int jp = 0; jp < g.ny - 1; ++jp)
            acc(g.eps_x(i, jp) * std::norm(m.ex(i, jp)) + std::norm(m.hy(i, jp)), g.x_center(i),
                g.y_node(jp + 1));
    for (int ip = 0; ip < g.nx - 1; ++ip)
        for (int j = 0; j < g.ny; ++j)
            acc(g.eps_y(ip, j) * std::norm(m.ey(ip, j)) + std::norm(m.hx(ip, j)), g.x_node(ip + 1),
                g.y_center(j));
    for (int ip = 0; ip < g.nx - 1; ++ip)
        for (int jp = 0; jp < g.ny - 1; ++jp)
            acc(g.eps_z(ip, jp) * std::norm(m.ez(ip, jp)), g.x_node(ip + 1), g.y_node(jp + 1));
    for (int i = 0; i < g.nx; ++i)
        for (int j = 0; j < g.ny; ++j) acc(std::norm(m.hz(i, j)), g.x_center(i), g.y_center(j));
    return total > 0.0 ? frame / total : 0.0;
}

void scale_fields(GuidedMode& m, cd s) {
    m.ex *= s;
    m.ey *= s;
    m.ez *= s;
    m.hx *= s;
    m.hy *= s;
    m.hz *= s;
}

GuidedMode assemble_mode(std::shared_ptr<const CrossSectionGrid> grid, const Operators& op,
                         const Eigen::VectorXd& e, double n_eff) {
    const auto& g = *grid;
    const Layout l{g.nx, g.ny};
    const int nex = l.n_ex();
    const int ney = l.n_ey();
    const Eigen::VectorXd ex = e.head(nex);
    const Eigen::VectorXd ey = e.tail(ney);
    const Eigen::VectorXd ht = (op.q * e) / n_eff;
    const Eigen::VectorXd hx = ht.head(ney);
    const Eigen::VectorXd hy = ht.tail(nex);
    // Hz = j (dEy/dx - dEx/dy);  Ez = -j eps_z^{-1} (dHy/dx - dHx/dy)
    const Eigen::VectorXd hz_r = op.ax * ey - op.ay * ex;
    const Eigen::VectorXd ez_r = -(op.inv_eps_z.array() * (op.cx * hy - op.cy * hx).array()).matrix();
    const cd j1(0.0, 1.0);

    GuidedMode m;
    m.grid = std::move(grid);
    m.lambda = g.lambda;
    m.n_eff = n_eff;
    m.ex = unpack(ex, g.nx, g.ny - 1);
    m.ey = unpack(ey, g.nx - 1, g.ny);
    m.hx = unpack(hx, g.nx - 1, g.ny);
    m.hy = unpack(hy, g.nx, g.ny - 1);
    m.hz = unpack(hz_r, g.nx, g.ny) * j1;
    m.ez = unpack(ez_r, g.nx - 1, g.ny - 1) * j1;

    m.polarization = m.te_fraction() >= 0.5 ? Polarization::quasi_te : Polarization::quasi_tm;
    m = normalize_power(std::move(m));

    // Sign convention: the largest sample of the dominant component is real positive.
    const auto& dom = m.polarization == Polarization::quasi_te ? m.ex : m.ey;
    Eigen::Index r = 0, c = 0;
    dom.abs().maxCoeff(&r, &c);
    const cd peak = dom(r, c);
    if (std::abs(peak) > 0.0) scale_fields(m, std::conj(peak) / std::abs(peak));

    m.boundary_energy_fraction = frame_energy_fraction(m);
    return m;
}

}  // namespace

double mode_power(const GuidedMode& m) {
    const auto& g = *m.grid;
    const double k0 = m.k0();
    const double area = (k0 * g.dx) * (k0 * g.dy);
    const double s = (m.ex * m.hy.conjugate()).real().sum() - (m.ey * m.hx.conjugate()).real().sum();
    return 0.5 * s * area;
}

GuidedMode normalize_power(GuidedMode mode) {
    const double p = mode_power(mode);
    if (!(p > 0.0)) throw DomainError("mode: non-positive power flux, cannot normalize");
    scale_fields(mode, cd(1.0 / std::sqrt(p), 0.0));
    mode.power_normalized = true;
    return mode;
}

double transverse_overlap(const GuidedMode& a, const GuidedMode& b) {
    if (!a.grid->same_layout(*b.grid)) throw DomainError("overlap: grid layouts differ");
    const cd inner = (a.ex.conjugate() * b.ex).sum() + (a.ey.conjugate() * b.ey).sum();
    const double na = a.ex.abs2().sum() + a.ey.abs2().sum();
    const double nb = b.ex.abs2().sum() + b.ey.abs2().sum();
    if (!(na > 0.0 && nb > 0.0)) throw DomainError("overlap: zero field");
    return std::abs(inner) / std::sqrt(na * nb);
}

std::vector<GuidedMode> solve_modes(std::shared_ptr<const CrossSectionGrid> grid, int count,
                                    std::optional<double> n_eff_target,
                                    const SolverOptions& options) {
    if (!grid) throw DomainError("solve_modes: no grid");
    if (count < 1) throw DomainError("solve_modes: count must be >= 1");
    const auto& g = *grid;
    const double target = n_eff_target.value_or(g.n_core);
    const double n_clad = g.max_cladding_index();

    std::vector<GuidedMode> modes;
    if (!(g.n_core > n_clad)) return modes;

    const Operators op = build_operators(g);
    ShiftInvertOptions eo;
    eo.count = count;
    eo.shift = target * target;
    eo.krylov_dim = options.krylov_dim;
    eo.max_restarts = options.max_restarts;
    eo.tolerance = options.tolerance;
    const EigenPairs pairs = shift_invert_eigs(op.a, eo);

    for (std::size_t k = 0; k < pairs.values.size(); ++k) {
        const double n2 = pairs.values[k];
        if (!(n2 > 0.0)) continue;
        const double n = std::sqrt(n2);
        if (!(n > n_clad && n < g.n_core)) continue;
        modes.push_back(assemble_mode(grid, op, pairs.vectors.col(static_cast<Eigen::Index>(k)), n));
    }
    std::stable_sort(modes.begin(), modes.end(),
                     [](const GuidedMode& a, const GuidedMode& b) { return a.n_eff > b.n_eff; });
    return modes;
}

namespace {

int guided_count_upto(const WaveguideGeometry& geom, double lambda, const ModeSetup& setup,
                      int limit) {
    const auto grid = setup.grid(geom, lambda);
    const auto modes = solve_modes(grid, limit, std::nullopt, setup.solver);
    const double threshold = grid->max_cladding_index() + kGuidanceMargin;
    return static_cast<int>(std::count_if(modes.begin(), modes.end(),
                                          [&](const GuidedMode& m) { return m.n_eff > threshold; }));
}

}  // namespace

int count_guided_modes(const WaveguideGeometry& geom, double lambda, const ModeSetup& setup) {
    const auto grid = setup.grid(geom, lambda);
    const auto modes = solve_modes(grid, 4, std::nullopt, setup.solver);
    const double threshold = grid->max_cladding_index() + kGuidanceMargin;
    return static_cast<int>(std::count_if(modes.begin(), modes.end(),
                                          [&](const GuidedMode& m) { return m.n_eff > threshold; }));
}

std::array<std::complex<double>, 3> field_at(const GuidedMode& mode, double x, double y) {
    const auto& g = *mode.grid;
    if (!(std::abs(x) <= 0.5 * g.x_extent() && std::abs(y) <= 0.5 * g.y_extent()))
        throw DomainError("field_at: point outside the grid window");

    struct Axis {
        int i0;
        double w;
    };
    auto snap = [](double t) {
        const double r = std::round(t);
        return std::abs(t - r) < 1e-9 ? r : t;
    };
    // Node lattice 0..n (values vanish at both ends).
    auto node_axis = [&](double q, double d, int n) {
        const double t = snap(q / d + 0.5 * n);
        int i0 = std::clamp(static_cast<int>(std::floor(t)), 0, n - 1);
        return Axis{i0, std::clamp(t - i0, 0.0, 1.0)};
    };
    // Center lattice 0..n-1 (clamped outside).
    auto center_axis = [&](double q, double d, int n) {
        const double t = snap(q / d + 0.5 * n - 0.5);
        int i0 = std::clamp(static_cast<int>(std::floor(t)), 0, n - 2);
        return Axis{i0, std::clamp(t - i0, 0.0, 1.0)};
    };
    auto bilinear = [](const Axis& ax, const Axis& ay, auto&& value) {
        const cd v00 = value(ax.i0, ay.i0), v10 = value(ax.i0 + 1, ay.i0);
        const cd v01 = value(ax.i0, ay.i0 + 1), v11 = value(ax.i0 + 1, ay.i0 + 1);
        return (1 - ax.w) * (1 - ay.w) * v00 + ax.w * (1 - ay.w) * v10 + (1 - ax.w) * ay.w * v01 +
               ax.w * ay.w * v11;
    };

    const Axis xc = center_axis(x, g.dx, g.nx), xn = node_axis(x, g.dx, g.nx);
    const Axis yc = center_axis(y, g.dy, g.ny), yn = node_axis(y, g.dy, g.ny);

    const cd ex = bilinear(xc, yn, [&](int i, int j) {
        return (j == 0 || j == g.ny) ? cd{} : mode.ex(i, j - 1);
    });
    const cd ey = bilinear(xn, yc, [&](int i, int j) {
        return (i == 0 || i == g.nx) ? cd{} : mode.ey(i - 1, j);
    });
    const cd ez = bilinear(xn, yn, [&](int i, int j) {
        return (i == 0 || i == g.nx || j == 0 || j == g.ny) ? cd{} : mode.ez(i - 1, j - 1);
    });
    return {ex, ey, ez};
}

namespace {

struct SweepSample {
    std::vector<double> neff;
    std::vector<GuidedMode> modes;  // transverse E only, for branch tracking
};

GuidedMode strip_to_transverse_e(const GuidedMode& m) {
    GuidedMode t;
    t.grid = m.grid;
    t.lambda = m.lambda;
    t.n_eff = m.n_eff;
    t.ex = m.ex;
    t.ey = m.ey;
    t.polarization = m.polarization;
    return t;
}

}  // namespace

DispersionCurve dispersion_sweep(const WaveguideGeometry& geom, const std::vector<double>& lambdas,
                                 int modes, const ModeSetup& setup) {
    if (modes < 1) throw DomainError("dispersion_sweep: modes must be >= 1");
    if (lambdas.empty()) throw DomainError("dispersion_sweep: empty wavelength list");
    if (!std::is_sorted(lambdas.begin(), lambdas.end()))
        throw DomainError("dispersion_sweep: wavelengths must be sorted ascending");

    auto samples = parallel_map(
        lambdas.size(),
        [&](std::size_t k) {
            auto grid = setup.grid(geom, lambdas[k]);
            auto solved = solve_modes(grid, modes + 1, std::nullopt, setup.solver);
            SweepSample s;
            for (auto& m : solved) {
                s.neff.push_back(m.n_eff);
                // Drop the grid pointer's heavy siblings; keep what tracking needs.
                s.modes.push_back(strip_to_transverse_e(m));
            }
            return s;
        },
        setup.threads);

    DispersionCurve curve;
    curve.lambdas = lambdas;
    curve.geometry = geom;
    curve.neff.assign(modes, std::vector<std::optional<double>>(lambdas.size()));
    std::vector<std::optional<GuidedMode>> last(modes);

    constexpr double kMinOverlap = 0.3;
    for (std::size_t k = 0; k < lambdas.size(); ++k) {
        const auto& s = samples[k];
        std::vector<bool> taken(s.modes.size(), false);
        std::vector<bool> assigned(modes, false);

        // Greedy assignment on descending overlap with each branch's last field.
        struct Cand {
            double ov;
            int branch;
            int mode;
        };
        std::vector<Cand> cands;
        for (int b = 0; b < modes; ++b) {
            if (!last[b]) continue;
            for (std::size_t m = 0; m < s.modes.size(); ++m)
                cands.push_back({transverse_overlap(*last[b], s.modes[m]), b, static_cast<int>(m)});
        }
        std::stable_sort(cands.begin(), cands.end(),
                         [](const Cand& a, const Cand& b) { return a.ov > b.ov; });
        for (const auto& c : cands) {
            if (c.ov < kMinOverlap || assigned[c.branch] || taken[c.mode]) continue;
            assigned[c.branch] = true;
            taken[c.mode] = true;
            curve.neff[c.branch][k] = s.neff[c.mode];
            last[c.branch] = s.modes[c.mode];
        }
        // Unmatched modes open branches that have never been populated.
        for (std::size_t m = 0; m < s.modes.size(); ++m) {
            if (taken[m]) continue;
            for (int b = 0; b < modes; ++b) {
                if (!last[b]) {
                    last[b] = s.modes[m];
                    curve.neff[b][k] = s.neff[m];
                    assigned[b] = true;
                    taken[m] = true;
                    break;
                }
            }
        }
    }
    return curve;
}

std::vector<WavelengthInterval> single_mode_window(const WaveguideGeometry& geom, double lambda_from,
                                                   double lambda_to, double step,
                                                   const ModeSetup& setup) {
    if (!(step > 0.0) || step > 10e-9 + 1e-15)
        throw DomainError("single_mode_window: step must be in (0, 10 nm]");
    if (!(lambda_to > lambda_from)) throw DomainError("single_mode_window: empty range");

    std::vector<double> grid_l;
    const int n = static_cast<int>(std::floor((lambda_to - lambda_from) / step + 1e-9));
    for (int k = 0; k <= n; ++k) grid_l.push_back(lambda_from + k * step);
    if (lambda_to - grid_l.back() > 1e-12) grid_l.push_back(lambda_to);

    // Single-mode only needs to tell 0, 1 and "more than one" apart, so two
    // eigenvalues suffice; this halves the cost of a full count.
    const auto counts = parallel_map(
        grid_l.size(), [&](std::size_t k) { return guided_count_upto(geom, grid_l[k], setup, 2); },
        setup.threads);

    auto single = [&](double l) { return guided_count_upto(geom, l, setup, 2) == 1; };
    auto refine = [&](double lo, bool lo_single, double hi) {
        while (hi - lo > 1e-9) {
            const double mid = 0.5 * (lo + hi);
            if (single(mid) == lo_single)
                lo = mid;
            else
                hi = mid;
        }
        return 0.5 * (lo + hi);
    };

    std::vector<WavelengthInterval> out;
    std::optional<double> start;
    for (std::size_t k = 0; k < grid_l.size(); ++k) {
        const bool s = counts[k] == 1;
        if (s && !start) start = k == 0 ? grid_l[0] : refine(grid_l[k - 1], false, grid_l[k]);
        if (!s && start) {
            out.push_back({*start, refine(grid_l[k - 1], true, grid_l[k])});
            start.reset();
        }
    }
    if (start) out.push_back({*start, grid_l.back()});
    return out;
}

CutoffResult cutoff_height(const WaveguideGeometry& geom, double lambda, double h_lo, double h_hi,
                           const ModeSetup& setup, double resolution) {
    if (!(h_lo > 0.0 && h_hi > h_lo)) throw DomainError("cutoff_height: invalid height bracket");
    CutoffResult r;
    auto guided = [&](double h) {
        WaveguideGeometry g = geom;
        g.core_height = h;
        ++r.solves;
        const auto grid = setup.grid(g, lambda);
        const auto modes = solve_modes(grid, 1, std::nullopt, setup.solver);
        return !modes.empty() && modes.front().n_eff > grid->max_cladding_index() + kGuidanceMargin;
    };
    if (!guided(h_hi))
        throw DomainError("cutoff_height: bracket invalid, fundamental not guided at upper end");
    if (guided(h_lo)) {
        r.height = h_lo;
        r.below_range = true;
        return r;
    }
    double lo = h_lo, hi = h_hi;
    while (hi - lo > resolution) {
        const double mid = 0.5 * (lo + hi);
        (guided(mid) ? hi : lo) = mid;
    }
    r.height = 0.5 * (lo + hi);
    return r;
}

double group_index_from_samples(double lambda, double delta, double n_minus, double n_center,
                                double n_plus) {
    if (!(delta > 0.0)) throw DomainError("group_index: delta must be positive");
    return n_center - lambda * (n_plus - n_minus) / (2.0 * delta);
}

GroupIndexResult group_index(const WaveguideGeometry& geom, double lambda, int mode_index,
                             const ModeSetup& setup, double delta) {
    if (mode_index < 0) throw DomainError("group_index: negative mode index");
    const std::array<double, 3> ls{lambda - delta, lambda, lambda + delta};
    auto solved = parallel_map(
        3,
        [&](std::size_t k) {
            return solve_modes(setup.grid(geom, ls[k]), mode_index + 2, std::nullopt, setup.solver);
        },
        setup.threads);
    const auto& center = solved[1];
    if (static_cast<int>(center.size()) <= mode_index)
        throw DomainError("group_index: mode not guided at the center wavelength");
    const GuidedMode& ref = center[mode_index];

    auto tracked = [&](const std::vector<GuidedMode>& cands) {
        double best = -1.0;
        const GuidedMode* hit = nullptr;
        for (const auto& c : cands) {
            const double ov = transverse_overlap(ref, c);
            if (ov > best) {
                best = ov;
                hit = &c;
            }
        }
        if (!hit || best < 0.5) throw DomainError("group_index: mode cut off within the stencil");
        return hit->n_eff;
    };
    GroupIndexResult r;
    r.n_eff = ref.n_eff;
    r.n_group = group_index_from_samples(lambda, delta, tracked(solved[0]), ref.n_eff,
                                         tracked(solved[2]));
    r.mode = ref;
    return r;
}

}  // namespace wgkit
