#include <cmath>

#include "common.hpp"
#include "doctest.h"
#include "wgkit/emitter.hpp"

using namespace wgkit;

namespace {

GuidedMode scaled(GuidedMode m, std::complex<double> s) {
    m.ex *= s;
    m.ey *= s;
    m.ez *= s;
    m.hx *= s;
    m.hy *= s;
    m.hz *= s;
    m.power_normalized = false;
    return m;
}

}  // namespace

TEST_CASE("beta lies in [0, 1] and falls with rho") {
    const auto& m = default_modes(658e-9)[0];
    const auto e = DipoleEmitter::on_surface(Orientation::horizontal);
    double prev = 1.0;
    for (double rho : {0.5, 1.0, 1.5, 2.0}) {
        const auto r = beta(m, e, 2.0, rho);
        CHECK(r.beta > 0.0);
        CHECK(r.beta < 1.0);
        CHECK(r.beta < prev);
        CHECK(r.beta == doctest::Approx(r.gamma_wg_ratio / (r.gamma_wg_ratio + rho)));
        prev = r.beta;
    }
}

TEST_CASE("coupling does not depend on the mode's normalization") {
    const auto& m = default_modes(658e-9)[0];
    DipoleEmitter e = DipoleEmitter::on_surface(Orientation::horizontal);
    e.x = 130e-9;
    const double ref = gamma_wg_ratio(m, e, 2.0);
    // power-of-two scaling is exact in binary floating point
    CHECK(gamma_wg_ratio(scaled(m, 4.0), e, 2.0) == ref);
    CHECK(gamma_wg_ratio(scaled(m, 0.125), e, 2.0) == ref);
    CHECK(gamma_wg_ratio(scaled(m, {0.0, 3.0}), e, 2.0) == doctest::Approx(ref).epsilon(1e-13));
    CHECK(gamma_wg_ratio(scaled(m, 1e-7), e, 2.0) == doctest::Approx(ref).epsilon(1e-13));
}

TEST_CASE("gamma scales linearly with the group index") {
    const auto& m = default_modes(658e-9)[0];
    const auto e = DipoleEmitter::on_surface(Orientation::horizontal);
    CHECK(gamma_wg_ratio(m, e, 3.0) == doctest::Approx(1.5 * gamma_wg_ratio(m, e, 2.0)).epsilon(1e-14));
}

TEST_CASE("symmetric position decouples vertical and longitudinal dipoles from the TE mode") {
    const auto& m = default_modes(658e-9)[0];
    const double h = beta(m, DipoleEmitter::on_surface(Orientation::horizontal), 2.0).beta;
    const double v = beta(m, DipoleEmitter::on_surface(Orientation::vertical), 2.0).beta;
    const double l = beta(m, DipoleEmitter::on_surface(Orientation::longitudinal), 2.0).beta;
    CHECK(h > 0.1);
    CHECK(v < 1e-6 * h);
    CHECK(l < 1e-6 * h);
}

TEST_CASE("Ez is in quadrature with Ex, so a 45 degree dipole averages the rates") {
    const auto& m = default_modes(658e-9)[0];
    DipoleEmitter e = DipoleEmitter::on_surface(Orientation::horizontal);
    e.x = 250e-9;
    const double gx = gamma_wg_ratio(m, e, 2.0);
    e.direction = unit_vector(Orientation::longitudinal);
    const double gz = gamma_wg_ratio(m, e, 2.0);
    CHECK(gz > 0.0);
    e.direction = Eigen::Vector3d(1, 0, 1).normalized();
    CHECK(gamma_wg_ratio(m, e, 2.0) == doctest::Approx(0.5 * (gx + gz)).epsilon(1e-10));
}

TEST_CASE("coupling weakens away from the surface") {
    const auto& m = default_modes(658e-9)[0];
    double prev = 2.0;
    for (double y : {0.0, 50e-9, 150e-9, 400e-9}) {
        auto e = DipoleEmitter::on_surface(Orientation::horizontal, y);
        const double b = beta(m, e, 2.0).beta;
        CHECK(b < prev);
        prev = b;
    }
    const double s = standoff_sensitivity(m, DipoleEmitter::on_surface(Orientation::horizontal), 2.0);
    CHECK(s >= 0.0);
    CHECK(s < 0.5);
}

TEST_CASE("emitter validation") {
    const auto& m = default_modes(658e-9)[0];
    DipoleEmitter e;
    e.direction = Eigen::Vector3d(1, 1, 0);
    CHECK_THROWS_AS(e.validate(), DomainError);
    e = DipoleEmitter::on_surface(Orientation::horizontal);
    e.x = 5e-6;
    CHECK_THROWS_AS(gamma_wg_ratio(m, e, 2.0), DomainError);
    e.x = 0;
    CHECK_THROWS_AS(beta(m, e, 2.0, 0.0), DomainError);
    CHECK_THROWS_AS(gamma_wg_ratio(m, e, -1.0), DomainError);
    CHECK_THROWS_AS(orientation_from_string("diagonal"), DomainError);
    CHECK(orientation_from_string("vertical") == Orientation::vertical);
}

TEST_CASE("spectrum rows are wavelength-major and thread-count independent") {
    auto s = coarse_setup();
    const std::vector<double> ls{640e-9, 700e-9};
    const std::vector<Orientation> os{Orientation::horizontal, Orientation::vertical};
    s.threads = 1;
    const auto a = beta_spectrum(WaveguideGeometry{}, DipoleEmitter::on_surface(Orientation::horizontal), ls,
                                 os, s);
    s.threads = 2;
    const auto b = beta_spectrum(WaveguideGeometry{}, DipoleEmitter::on_surface(Orientation::horizontal), ls,
                                 os, s);
    REQUIRE(a.size() == 4);
    REQUIRE(b.size() == 4);
    CHECK(a[0].lambda == 640e-9);
    CHECK(a[1].orientation == "vertical");
    CHECK(a[2].lambda == 700e-9);
    for (int k = 0; k < 4; ++k) CHECK(a[k].beta == b[k].beta);
}

TEST_CASE("budget is the product of its factors") {
    CHECK(budget(0.35, 1.8, 1.0, 0.57, 1.0) == doctest::Approx(0.35 * std::pow(10.0, -0.18) * 0.57));
    CHECK(budget(0.4, 0.0, 10.0, 1.0, 1.0) == 0.4);
    CHECK(budget(0.4, 3.0, 0.0, 1.0, 0.5) == 0.2);
    CHECK_THROWS_AS(budget(1.2, 1.8, 1.0, 0.5, 1.0), DomainError);
    CHECK_THROWS_AS(budget(0.3, -1.0, 1.0, 0.5, 1.0), DomainError);
    CHECK_THROWS_AS(budget(0.3, 1.0, -1.0, 0.5, 1.0), DomainError);
    CHECK_THROWS_AS(budget(0.3, 1.0, 1.0, 1.5, 1.0), DomainError);
    CHECK_THROWS_AS(budget(0.3, 1.0, 1.0, 0.5, -0.1), DomainError);
}
