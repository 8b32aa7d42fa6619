#include <cmath>
#include <limits>
#include <numbers>

#include "common.hpp"
#include "doctest.h"
#include "wgkit/fiber.hpp"

using namespace wgkit;

namespace {

// Large low-resolution facet window; the geometry only sets the indices.
std::shared_ptr<const CrossSectionGrid> facet_grid(double res = 50e-9, double extent = 12e-6) {
    ModeSetup s;
    s.window = {extent, extent};
    s.resolution = {res, res};
    WaveguideGeometry g;
    g.superstrate = g.substrate;
    return s.grid(g, 658e-9);
}

ModeSetup facet_setup() {
    ModeSetup s;
    s.window = {10e-6, 10e-6};
    s.resolution = {50e-9, 50e-9};
    return s;
}

}  // namespace

TEST_CASE("fiber mode overlaps itself perfectly") {
    const auto f = gaussian_fiber_mode(FiberSpec{}, facet_grid());
    CHECK(mode_power(f) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(overlap(f, f) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(overlap(f, f, true) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("mismatched Gaussian waists follow the closed form") {
    const auto g = facet_grid();
    FiberSpec a, b;
    b.mode_field_diameter = 3e-6;
    const double w1 = 2e-6, w2 = 1.5e-6;
    const double exact = std::pow(2 * w1 * w2 / (w1 * w1 + w2 * w2), 2);
    const auto fa = gaussian_fiber_mode(a, g), fb = gaussian_fiber_mode(b, g);
    CHECK(overlap(fa, fb) == doctest::Approx(exact).epsilon(1e-6));
    CHECK(overlap(fb, fa) == doctest::Approx(exact).epsilon(1e-6));
}

TEST_CASE("fiber mode needs a window twice the MFD") {
    CHECK_THROWS_AS(gaussian_fiber_mode(FiberSpec{}, facet_grid(50e-9, 6e-6)), DomainError);
    FiberSpec bad;
    bad.mode_field_diameter = -1;
    CHECK_THROWS_AS(bad.validate(), DomainError);
}

TEST_CASE("orthogonal polarizations do not couple") {
    const auto g = facet_grid();
    const auto f = gaussian_fiber_mode(FiberSpec{}, g);
    GuidedMode y = f;
    y.ey = Eigen::ArrayXXcd::Zero(f.ey.rows(), f.ey.cols());
    y.ey.block(0, 0, f.ex.rows() - 1, f.ex.cols()) = f.ex.block(0, 0, f.ex.rows() - 1, f.ex.cols());
    y.ex.setZero();
    y.polarization = Polarization::quasi_tm;
    CHECK(overlap(f, y) == doctest::Approx(0.0));
}

TEST_CASE("NA collection of a Gaussian matches its angular spectrum") {
    // E ~ exp(-r^2/w0^2) carries 1 - exp(-(k0 NA w0)^2 / 2) of its power in |k_t| <= k0 NA
    // Heavy padding puts the small collection disc on a fine k-space lattice.
    const auto f = gaussian_fiber_mode(FiberSpec{}, facet_grid(50e-9));
    const double k0 = 2 * std::numbers::pi / 658e-9, w0 = 2e-6;
    NaOptions o;
    o.pad_factor = 16;
    for (double na : {0.1, 0.15}) {
        const auto r = na_collection(f, na, o);
        const double exact = 1 - std::exp(-std::pow(k0 * na * w0, 2) / 2);
        CHECK(r.fraction == doctest::Approx(exact).epsilon(5e-3));
        CHECK(r.parseval_residual < 1e-10);
    }
}

TEST_CASE("NA collection: bounds, monotonicity and normalizations") {
    const auto& m = default_modes(658e-9)[0];
    double prev = 0.0;
    for (double na : {0.2, 0.4, 0.65, 0.9, 1.0}) {
        const auto r = na_collection(m, na);
        CHECK(r.fraction >= prev);
        CHECK(r.fraction <= 1.0);
        CHECK(r.fraction_of_propagating >= r.fraction_of_total);
        CHECK(r.parseval_residual < 1e-10);
        prev = r.fraction;
    }
    const auto one = na_collection(m, 1.0);
    CHECK(one.fraction_of_total + one.evanescent_fraction == doctest::Approx(1.0).epsilon(1e-12));
    NaOptions p;
    p.normalization = NaNormalization::propagating_disc;
    CHECK(na_collection(m, 1.0, p).fraction == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(one.evanescent_fraction > 0.0);  // the high-index core confines below the light line
    CHECK_THROWS_AS(na_collection(m, 0.0), DomainError);
    CHECK_THROWS_AS(na_collection(m, 1.1), DomainError);
}

TEST_CASE("adiabaticity margin against a closed form") {
    TaperProfile t;
    t.tip_width = 100e-9;
    t.end_width = 700e-9;
    t.length = 300e-6;
    const double lambda = 658e-9;
    const IndexPairProvider constant = [](double) { return std::pair{1.6, 1.5}; };
    const double slope = (t.end_width - t.tip_width) / t.length;
    CHECK(adiabaticity_margin(t, lambda, constant) ==
          doctest::Approx(t.tip_width * 0.1 / lambda / slope).epsilon(1e-12));
    // longer tapers are more adiabatic
    TaperProfile longer = t;
    longer.length *= 2;
    CHECK(adiabaticity_margin(longer, lambda, constant) > adiabaticity_margin(t, lambda, constant));
    TaperProfile flat = t;
    flat.tip_width = flat.end_width;
    CHECK(adiabaticity_margin(flat, lambda, constant) == std::numeric_limits<double>::infinity());
    CHECK_THROWS_AS(adiabaticity_margin(t, lambda, constant, 5), DomainError);
    TaperProfile zero = t;
    zero.length = 0;
    CHECK_THROWS_AS(adiabaticity_margin(zero, lambda, constant), DomainError);
}

TEST_CASE("taper sweep: order, duplicates and best point") {
    WaveguideGeometry g;
    g.superstrate = g.substrate;
    const auto s = facet_setup();
    const auto a = taper_coupling_sweep(g, {500e-9, 150e-9, 300e-9, 150e-9}, FiberSpec{}, s);
    REQUIRE(a.points.size() == 3);
    CHECK(a.points[0].tip_width == 150e-9);
    CHECK(a.points[2].tip_width == 500e-9);
    REQUIRE(a.best_eta);
    double best = 0;
    for (const auto& p : a.points) {
        REQUIRE(p.eta);
        CHECK(*p.eta >= 0.0);
        CHECK(*p.eta <= 1.0);
        best = std::max(best, *p.eta);
    }
    CHECK(*a.best_eta == best);
    // narrower tips expand the mode toward the fiber's size
    CHECK(*a.points[0].eta > *a.points[2].eta);
    const auto b = taper_coupling_sweep(g, {300e-9, 500e-9, 150e-9}, FiberSpec{}, s);
    for (std::size_t k = 0; k < 3; ++k) CHECK(*b.points[k].eta == *a.points[k].eta);
    CHECK_THROWS_AS(taper_coupling_sweep(g, {60e-9}, FiberSpec{}, s), DomainError);
}
