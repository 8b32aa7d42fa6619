#include "doctest.h"
#include "oracles.hpp"
#include "wgkit/cross_section.hpp"

using namespace wgkit;

TEST_CASE("constant index model") {
    CHECK(refractive_index(tantala_default(), 658e-9) == 2.10);
}

TEST_CASE("fused silica at 658 nm") {
    const double n = refractive_index(fused_silica_malitson(), 658e-9);
    // Frozen from the term-by-term oracle; the two must also agree.
    CHECK(oracle::silica(658e-9) == doctest::Approx(1.4563209429).epsilon(1e-10));
    CHECK(n == doctest::Approx(oracle::silica(658e-9)).epsilon(1e-14));
    CHECK(std::abs(n - 1.4565) < 5e-4);
}

TEST_CASE("wavelength range is enforced, never extrapolated") {
    auto m = fused_silica_malitson();
    m.lambda_max = 2.0e-6;
    CHECK_THROWS_AS(refractive_index(m, 5e-6), DomainError);
    CHECK_THROWS_AS(refractive_index(fused_silica_malitson(), 0.1e-6), DomainError);
    CHECK_NOTHROW(refractive_index(m, 2.0e-6));
}

TEST_CASE("malformed Sellmeier coefficients are rejected") {
    // n^2 < 1 at 1 um
    auto bad = MaterialModel::sellmeier("bad", {-2.0, 0.0, 0.0}, {0.01, 0.01, 0.01}, 0.5e-6, 2e-6);
    CHECK_THROWS_AS(refractive_index(bad, 1e-6), DomainError);
    // pole inside the range
    auto pole = MaterialModel::sellmeier("pole", {0.5, 0.0, 0.0}, {1.0, 0.01, 0.01}, 0.5e-6, 2e-6);
    CHECK_THROWS_AS(refractive_index(pole, 1e-6), DomainError);
}

TEST_CASE("silica dispersion is normal over 500-900 nm") {
    const auto m = fused_silica_malitson();
    double prev = refractive_index(m, 500e-9);
    for (int l = 505; l <= 900; l += 5) {
        const double n = refractive_index(m, l * 1e-9);
        CHECK(n < prev);
        prev = n;
    }
}

TEST_CASE("geometry validation") {
    WaveguideGeometry g;
    CHECK_NOTHROW(g.validate());
    CHECK(g.supports_guidance(658e-9));
    g.core_width = 0;
    CHECK_THROWS_AS(g.validate(), DomainError);
    g = {};
    g.core_height = -1e-9;
    CHECK_THROWS_AS(g.validate(), DomainError);
    g = {};
    g.core = MaterialModel::constant("low", 1.3, 0.3e-6, 2e-6);
    CHECK_FALSE(g.supports_guidance(658e-9));
}

namespace {

CrossSectionGrid default_grid(double res = 10e-9) {
    return build_cross_section(WaveguideGeometry{}, 658e-9, GridWindow{}, GridResolution{res, res});
}

}  // namespace

TEST_CASE("core interior carries n_core^2") {
    const auto g = default_grid();
    CHECK(permittivity_at(WaveguideGeometry{}, 658e-9, 0.0, 0.0) == doctest::Approx(4.41));
    // Ex sample nearest the core center: x_center(nx/2), y_node(ny/2)
    CHECK(g.eps_x(g.nx / 2, g.ny / 2 - 1) == doctest::Approx(4.41).epsilon(1e-14));
    CHECK(g.eps_z(g.nx / 2 - 1, g.ny / 2 - 1) == doctest::Approx(4.41).epsilon(1e-14));
    // deep in the substrate and the air
    CHECK(g.eps_x(0, 0) == doctest::Approx(std::pow(oracle::silica(658e-9), 2)).epsilon(1e-12));
    CHECK(g.eps_x(0, g.ny - 2) == 1.0);
}

TEST_CASE("uniform stack gives a constant map") {
    WaveguideGeometry u;
    u.core = u.substrate = u.superstrate = MaterialModel::constant("glass", 1.5, 0.3e-6, 2e-6);
    const auto g = build_cross_section(u, 658e-9, GridWindow{}, GridResolution{20e-9, 20e-9});
    CHECK((g.eps_x == 2.25).all());
    CHECK((g.eps_y == 2.25).all());
    CHECK((g.eps_z == 2.25).all());
}

TEST_CASE("vertical sidewalls give a bit-exact mirror-symmetric map") {
    // 7 nm cells put the sidewalls off the grid lines, so averaging is exercised.
    const auto g = build_cross_section(WaveguideGeometry{}, 658e-9, GridWindow{}, GridResolution{7e-9, 7e-9});
    for (int j = 0; j < g.ny - 1; ++j)
        for (int i = 0; i < g.nx; ++i) REQUIRE(g.eps_x(i, j) == g.eps_x(g.nx - 1 - i, j));
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx - 1; ++i) REQUIRE(g.eps_y(i, j) == g.eps_y(g.nx - 2 - i, j));
    for (int j = 0; j < g.ny - 1; ++j)
        for (int i = 0; i < g.nx - 1; ++i) REQUIRE(g.eps_z(i, j) == g.eps_z(g.nx - 2 - i, j));
}

TEST_CASE("permittivity is at least one everywhere") {
    const auto g = default_grid(20e-9);
    CHECK(g.eps_x.minCoeff() >= 1.0);
    CHECK(g.eps_y.minCoeff() >= 1.0);
    CHECK(g.eps_z.minCoeff() >= 1.0);
}

TEST_CASE("interface averaging conserves the permittivity integral") {
    // Sum of eps_z over node-centered cells against the exact integral over the
    // same area; the error is referred to the core's excess permittivity.
    WaveguideGeometry geom;
    geom.core_height = 97e-9;  // off-grid on purpose
    geom.core_width = 693e-9;
    const double ns2 = std::pow(oracle::silica(658e-9), 2), nc2 = 4.41;
    for (double res : {10e-9, 5e-9}) {
        const auto g = build_cross_section(geom, 658e-9, GridWindow{}, GridResolution{res, res});
        double sum = 0.0;
        for (int i = 0; i < g.nx - 1; ++i)
            for (int j = 0; j < g.ny - 1; ++j) sum += g.eps_z(i, j) * res * res;
        const double x_span = g.x_extent() - res, y_lo = -0.5 * g.y_extent() + 0.5 * res,
                     y_hi = 0.5 * g.y_extent() - 0.5 * res, y_if = -0.5 * geom.core_height;
        const double exact = x_span * ((y_if - y_lo) * ns2 + (y_hi - y_if) * 1.0) +
                             geom.core_width * geom.core_height * (nc2 - 1.0);
        const double core_excess = geom.core_width * geom.core_height * (nc2 - 1.0);
        CHECK(std::abs(sum - exact) / core_excess < 0.01);
    }
}

TEST_CASE("window and resolution are validated") {
    WaveguideGeometry g;
    CHECK_THROWS_AS(build_cross_section(g, 658e-9, GridWindow{2e-6, 3e-6}, GridResolution{}), DomainError);
    CHECK_THROWS_AS(build_cross_section(g, 658e-9, GridWindow{4e-6, 1.5e-6}, GridResolution{}), DomainError);
    CHECK_THROWS_AS(build_cross_section(g, 658e-9, GridWindow{}, GridResolution{0.0, 10e-9}), DomainError);
    CHECK_THROWS_AS(build_cross_section(g, 658e-9, GridWindow{}, GridResolution{10e-9, -1e-9}), DomainError);
}

TEST_CASE("sloped sidewalls narrow the core toward the top") {
    WaveguideGeometry g;
    g.sidewall_angle = 0.2;
    const double half = 0.5 * g.core_width;
    // just inside at the bottom, outside at the top
    CHECK(permittivity_at(g, 658e-9, half - 5e-9, -0.5 * g.core_height + 1e-9) == doctest::Approx(4.41));
    CHECK(permittivity_at(g, 658e-9, half - 5e-9, 0.5 * g.core_height - 1e-9) == 1.0);
}
