#include <Eigen/SparseCore>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "wgkit/eigensolver.hpp"

using namespace wgkit;

namespace {

// Non-symmetric tridiagonal Toeplitz matrix; with b c > 0 its eigenvalues are
// a + 2 sqrt(b c) cos(k pi / (n + 1)), k = 1..n. The eigenvector condition
// grows like (c/b)^(n/2), so keep c/b near one.
Eigen::SparseMatrix<double> toeplitz(int n, double a, double b, double c) {
    std::vector<Eigen::Triplet<double>> t;
    for (int i = 0; i < n; ++i) {
        t.emplace_back(i, i, a);
        if (i > 0) t.emplace_back(i, i - 1, b);
        if (i + 1 < n) t.emplace_back(i, i + 1, c);
    }
    Eigen::SparseMatrix<double> m(n, n);
    m.setFromTriplets(t.begin(), t.end());
    return m;
}

std::vector<double> toeplitz_eigs(int n, double a, double b, double c) {
    std::vector<double> v;
    for (int k = 1; k <= n; ++k) v.push_back(a + 2 * std::sqrt(b * c) * std::cos(k * std::numbers::pi / (n + 1)));
    return v;
}

}  // namespace

TEST_CASE("finds the eigenvalues nearest the shift") {
    const int n = 120;
    const auto a = toeplitz(n, 2.0, 0.97, 1.03);
    auto exact = toeplitz_eigs(n, 2.0, 0.97, 1.03);
    ShiftInvertOptions o;
    o.count = 4;
    o.shift = 3.3;
    const auto r = shift_invert_eigs(a, o);
    REQUIRE(r.values.size() == 4);
    std::sort(exact.begin(), exact.end(),
              [&](double p, double q) { return std::abs(p - o.shift) < std::abs(q - o.shift); });
    for (int k = 0; k < 4; ++k) CHECK(r.values[k] == doctest::Approx(exact[k]).epsilon(1e-9));
    // eigenvector residuals
    for (int k = 0; k < 4; ++k) {
        const Eigen::VectorXd x = r.vectors.col(k);
        CHECK(x.norm() == doctest::Approx(1.0));
        CHECK((a * x - r.values[k] * x).norm() < 1e-7);
    }
}

TEST_CASE("results are reproducible bit for bit") {
    const auto a = toeplitz(300, 1.0, 0.95, 1.05);
    ShiftInvertOptions o;
    o.count = 3;
    o.shift = 2.0;
    const auto r1 = shift_invert_eigs(a, o);
    const auto r2 = shift_invert_eigs(a, o);
    REQUIRE(r1.values.size() == r2.values.size());
    for (std::size_t k = 0; k < r1.values.size(); ++k) CHECK(r1.values[k] == r2.values[k]);
    CHECK((r1.vectors.array() == r2.vectors.array()).all());
}

TEST_CASE("a shift exactly on an eigenvalue still converges") {
    const int n = 50;
    const auto a = toeplitz(n, 2.0, 1.0, 1.0);
    const auto exact = toeplitz_eigs(n, 2.0, 1.0, 1.0);
    ShiftInvertOptions o;
    o.count = 1;
    o.shift = exact[10];
    const auto r = shift_invert_eigs(a, o);
    REQUIRE(r.values.size() == 1);
    CHECK(r.values[0] == doctest::Approx(exact[10]).epsilon(1e-8));
}

TEST_CASE("iteration budget exhaustion is reported") {
    const auto a = toeplitz(2000, 2.0, 1.0, 1.0);  // tightly clustered spectrum
    ShiftInvertOptions o;
    o.count = 6;
    o.shift = 10.0;  // far away: poor separation
    o.max_restarts = 0;
    o.krylov_dim = 14;
    CHECK_THROWS_AS(shift_invert_eigs(a, o), ConvergenceError);
}

TEST_CASE("argument checks") {
    Eigen::SparseMatrix<double> rect(3, 4);
    CHECK_THROWS_AS(shift_invert_eigs(rect, {}), DomainError);
    ShiftInvertOptions o;
    o.count = 0;
    CHECK_THROWS_AS(shift_invert_eigs(toeplitz(10, 1, 1, 1), o), DomainError);
}
