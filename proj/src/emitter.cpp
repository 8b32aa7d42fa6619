#include "wgkit/emitter.hpp"

#include <cmath>
#include <numbers>

#include "wgkit/parallel.hpp"

namespace wgkit {

const char* to_string(Orientation o) {
    switch (o) {
        case Orientation::horizontal: return "horizontal";
        case Orientation::vertical: return "vertical";
        case Orientation::longitudinal: return "longitudinal";
    }
    return "?";
}

Orientation orientation_from_string(const std::string& s) {
    if (s == "horizontal") return Orientation::horizontal;
    if (s == "vertical") return Orientation::vertical;
    if (s == "longitudinal") return Orientation::longitudinal;
    throw DomainError("unknown dipole orientation '" + s + "'");
}

Eigen::Vector3d unit_vector(Orientation o) {
    switch (o) {
        case Orientation::horizontal: return Eigen::Vector3d::UnitX();
        case Orientation::vertical: return Eigen::Vector3d::UnitY();
        case Orientation::longitudinal: return Eigen::Vector3d::UnitZ();
    }
    return Eigen::Vector3d::UnitX();
}

DipoleEmitter DipoleEmitter::on_surface(Orientation o, double standoff) {
    DipoleEmitter e;
    e.y = standoff;
    e.direction = unit_vector(o);
    e.label = to_string(o);
    return e;
}

void DipoleEmitter::validate() const {
    if (!(std::abs(direction.norm() - 1.0) <= 1e-9))
        throw DomainError("emitter: orientation must be a unit vector");
    if (!std::isfinite(x) || !std::isfinite(y)) throw DomainError("emitter: non-finite position");
}

namespace {

double electric_energy(const GuidedMode& m) {
    const auto& g = *m.grid;
    const double s = (g.eps_x * m.ex.abs2()).sum() + (g.eps_y * m.ey.abs2()).sum() +
                     (g.eps_z * m.ez.abs2()).sum();
    return s * g.dx * g.dy;
}

}  // namespace

double gamma_wg_ratio(const GuidedMode& mode, const DipoleEmitter& emitter, double n_group) {
    emitter.validate();
    if (!mode.grid) throw DomainError("gamma_wg_ratio: mode has no grid");
    if (!(n_group > 0.0)) throw DomainError("gamma_wg_ratio: group index must be positive");
    const auto& g = *mode.grid;
    const double gx = emitter.x;
    const double gy = 0.5 * g.core_height + emitter.y;
    if (!(std::abs(gx) <= 0.5 * g.x_extent() && std::abs(gy) <= 0.5 * g.y_extent()))
        throw DomainError("gamma_wg_ratio: emitter outside the grid window");

    const double energy = electric_energy(mode);
    if (!(energy > 0.0)) throw DomainError("gamma_wg_ratio: zero field");
    const auto e = field_at(mode, gx, gy);
    const std::complex<double> proj =
        e[0] * emitter.direction.x() + e[1] * emitter.direction.y() + e[2] * emitter.direction.z();
    const double k0 = mode.k0();
    return 3.0 * std::numbers::pi * n_group * std::norm(proj) / (k0 * k0 * energy);
}

BetaResult beta(const GuidedMode& mode, const DipoleEmitter& emitter, double n_group, double rho) {
    if (!(rho > 0.0)) throw DomainError("beta: rho must be positive");
    BetaResult r;
    r.gamma_wg_ratio = gamma_wg_ratio(mode, emitter, n_group);
    r.rho = rho;
    r.beta = r.gamma_wg_ratio / (r.gamma_wg_ratio + rho);
    r.lambda = mode.lambda;
    r.orientation = emitter.label;
    return r;
}

std::vector<BetaResult> beta_spectrum(const WaveguideGeometry& geom, const DipoleEmitter& emitter,
                                      const std::vector<double>& lambdas,
                                      const std::vector<Orientation>& orientations,
                                      const ModeSetup& setup, double rho) {
    if (!(rho > 0.0)) throw DomainError("beta: rho must be positive");
    if (orientations.empty()) throw DomainError("beta_spectrum: no orientations");
    // Group-index stencils already run three solves; keep those serial inside
    // and spread wavelengths across workers instead.
    ModeSetup inner = setup;
    inner.threads = 1;
    auto rows = parallel_map(
        lambdas.size(),
        [&](std::size_t k) {
            const GroupIndexResult gi = group_index(geom, lambdas[k], 0, inner);
            std::vector<BetaResult> out;
            for (auto o : orientations) {
                DipoleEmitter e = emitter;
                e.direction = unit_vector(o);
                e.label = to_string(o);
                out.push_back(beta(gi.mode, e, gi.n_group, rho));
            }
            return out;
        },
        setup.threads);
    std::vector<BetaResult> flat;
    for (auto& r : rows) flat.insert(flat.end(), r.begin(), r.end());
    return flat;
}

double standoff_sensitivity(const GuidedMode& mode, const DipoleEmitter& emitter, double n_group,
                            double rho) {
    const double ref = beta(mode, emitter, n_group, rho).beta;
    if (!(ref > 0.0)) return 0.0;
    double worst = 0.0;
    for (int k = 0; k <= 10; ++k) {
        DipoleEmitter e = emitter;
        e.y = k * 1e-9;
        worst = std::max(worst, std::abs(beta(mode, e, n_group, rho).beta - ref) / ref);
    }
    return worst;
}

double budget(double beta, double prop_loss_db_per_mm, double length_mm, double taper_eff,
              double detector_eff) {
    auto unit = [](double v) { return v >= 0.0 && v <= 1.0; };
    if (!unit(beta)) throw DomainError("budget: beta must lie in [0, 1]");
    if (!unit(taper_eff)) throw DomainError("budget: taper efficiency must lie in [0, 1]");
    if (!unit(detector_eff)) throw DomainError("budget: detector efficiency must lie in [0, 1]");
    if (!(prop_loss_db_per_mm >= 0.0)) throw DomainError("budget: propagation loss must be >= 0");
    if (!(length_mm >= 0.0)) throw DomainError("budget: length must be >= 0");
    return beta * std::pow(10.0, -prop_loss_db_per_mm * length_mm / 10.0) * taper_eff * detector_eff;
}

}  // namespace wgkit
