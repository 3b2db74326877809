#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstring>
#include <vector>

#include "qtunnel/spectral.hpp"

using namespace qtunnel;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

// r chosen so r (1 + r) = 1 with sigma = 1, making the second-derivative
// coefficient exactly 1 up to rounding
MarketParams unit_h2() { return MarketParams{0.6180339887498949, 1.0}; }

// analytic spectrum of the flat Dirichlet box
double flat_box_eigenvalue(const MarketParams& p, double length, int n) {
    const double h2 = planck_coefficient(p);
    const double k = static_cast<double>(n) * M_PI / length;
    return h2 * k * k;
}

int interior_sign_changes(const std::vector<double>& psi) {
    int changes = 0;
    double prev = 0.0;
    for (double v : psi) {
        if (v == 0.0) continue;
        if (prev != 0.0 && ((prev > 0.0) != (v > 0.0))) ++changes;
        prev = v;
    }
    return changes;
}

}  // namespace

TEST_CASE("stencil entries, flat box") {
    const auto op = discretize(unit_h2(), Box(0.0, 1.0, 3), true);
    REQUIRE(op.matrix.diag.size() == 3);
    REQUIRE(op.matrix.off.size() == 2);
    CHECK_THAT(op.step, WithinRel(0.25, 1e-15));
    for (double d : op.matrix.diag) CHECK_THAT(d, WithinRel(32.0, 1e-12));
    for (double e : op.matrix.off) CHECK_THAT(e, WithinRel(-16.0, 1e-12));
    CHECK(op.flat_potential);
}

TEST_CASE("stencil entries with the potential, box [1, 2]") {
    // hand-evaluated oracle: 2 h^2 / ds^2 + 1/s_i^2 at s_i in {1.25, 1.5, 1.75}
    const MarketParams p(0.05, 0.2);
    const auto op = discretize(p, Box(1.0, 2.0, 3), false);
    REQUIRE(op.grid.size() == 3);
    CHECK_THAT(op.grid[0], WithinRel(1.25, 1e-15));
    CHECK_THAT(op.grid[1], WithinRel(1.5, 1e-15));
    CHECK_THAT(op.grid[2], WithinRel(1.75, 1e-15));
    CHECK_THAT(op.matrix.diag[0], WithinRel(12.017777777777779, 1e-12));
    CHECK_THAT(op.matrix.diag[1], WithinRel(11.822222222222223, 1e-12));
    CHECK_THAT(op.matrix.diag[2], WithinRel(11.704308390022677, 1e-12));
    for (double e : op.matrix.off) CHECK_THAT(e, WithinRel(-5.688888888888889, 1e-12));
}

TEST_CASE("discretize rejects a singular wall unless the potential is flat") {
    const MarketParams p(0.05, 0.2);
    CHECK_THROWS_AS(discretize(p, Box(0.0, 1.0, 5), false), std::domain_error);
    CHECK_NOTHROW(discretize(p, Box(0.0, 1.0, 5), true));
}

TEST_CASE("Box validation") {
    CHECK_THROWS_AS(Box(-1.0, 1.0, 5), std::invalid_argument);
    CHECK_THROWS_AS(Box(2.0, 1.0, 5), std::invalid_argument);
    CHECK_THROWS_AS(Box(1.0, 1.0, 5), std::invalid_argument);
    CHECK_THROWS_AS(Box(1.0, 2.0, 2), std::invalid_argument);
}

TEST_CASE("flat-box spectrum matches the analytic values") {
    const MarketParams p(0.05, 0.2);
    const Box box(0.0, 1.0, 5001);
    const auto sol = eigen_spectrum(p, box, 5, true);
    REQUIRE(sol.eigenvalues.size() == 5);
    for (int n = 1; n <= 5; ++n) {
        const double expected = flat_box_eigenvalue(p, 1.0, n);
        INFO("n=" << n);
        CHECK(std::abs(sol.eigenvalues[n - 1] - expected) / expected < 1e-3);
    }
    // ground state near h^2 pi^2
    CHECK_THAT(sol.eigenvalues[0], WithinRel(3.509192675942883, 1e-3));
}

TEST_CASE("potential-enabled spectrum matches a reference dense solver") {
    // first 8 eigenvalues of the identical discretized matrix, computed
    // independently with LAPACK (scipy.linalg.eigh_tridiagonal) and frozen
    const double reference[8] = {3.972945946863518,  14.526740431854343, 32.07814232489068,
                                 56.644332908192936, 88.22772034989501,  126.82885799459928,
                                 172.44787011905368, 225.08473666579062};
    const MarketParams p(0.05, 0.2);
    const auto sol = eigen_spectrum(p, Box(1.0, 2.0, 2001), 8, false);
    REQUIRE(sol.eigenvalues.size() == 8);
    for (int n = 0; n < 8; ++n)
        CHECK_THAT(sol.eigenvalues[n], WithinRel(reference[n], 1e-8));
}

TEST_CASE("eigenvalues ascend strictly and dominate the potential minimum") {
    const MarketParams p(0.05, 0.2);
    const auto sol = eigen_spectrum(p, Box(1.0, 2.0, 801), 6, false);
    for (std::size_t i = 1; i < sol.eigenvalues.size(); ++i)
        CHECK(sol.eigenvalues[i] > sol.eigenvalues[i - 1]);
    for (double ev : sol.eigenvalues) CHECK(ev > 0.25);   // min V on [1, 2]
}

TEST_CASE("eigenfunctions: normalization, node counts, orthogonality") {
    const MarketParams p(0.05, 0.2);
    const auto sol = eigen_spectrum(p, Box(1.0, 2.0, 2001), 8, false);
    REQUIRE(sol.eigenfunctions.size() == 8);

    for (std::size_t n = 0; n < 8; ++n) {
        double norm = 0.0;
        for (double v : sol.eigenfunctions[n]) norm += v * v;
        norm *= sol.step;
        CHECK_THAT(norm, WithinAbs(1.0, 1e-10));
        CHECK(interior_sign_changes(sol.eigenfunctions[n]) == static_cast<int>(n));
    }

    for (std::size_t m = 0; m < 8; ++m) {
        for (std::size_t n = m + 1; n < 8; ++n) {
            double dot = 0.0;
            for (std::size_t i = 0; i < sol.grid.size(); ++i)
                dot += sol.eigenfunctions[m][i] * sol.eigenfunctions[n][i];
            dot *= sol.step;
            INFO("m=" << m << " n=" << n);
            CHECK(std::abs(dot) <= 1e-8);
        }
    }

    // sign convention: first nonzero component positive
    for (const auto& psi : sol.eigenfunctions) {
        for (double v : psi) {
            if (v != 0.0) {
                CHECK(v > 0.0);
                break;
            }
        }
    }
}

TEST_CASE("flat-box convergence is second order (Richardson ratio)") {
    const MarketParams p(0.05, 0.2);
    const auto coarse = eigen_spectrum(p, Box(0.0, 1.0, 1001), 5, true);
    const auto fine = eigen_spectrum(p, Box(0.0, 1.0, 2003), 5, true);
    for (int n = 1; n <= 5; ++n) {
        const double exact = flat_box_eigenvalue(p, 1.0, n);
        const double err_coarse = std::abs(coarse.eigenvalues[n - 1] - exact);
        const double err_fine = std::abs(fine.eigenvalues[n - 1] - exact);
        const double ratio = err_coarse / err_fine;
        INFO("n=" << n << " ratio=" << ratio);
        CHECK(ratio >= 3.6);
        CHECK(ratio <= 4.4);
    }
}

TEST_CASE("enabling the potential never lowers an eigenvalue") {
    const MarketParams p(0.05, 0.2);
    const Box box(1.0, 2.0, 501);
    const auto flat = eigen_spectrum(p, box, 5, true);
    const auto with_v = eigen_spectrum(p, box, 5, false);
    for (int n = 0; n < 5; ++n) CHECK(with_v.eigenvalues[n] >= flat.eigenvalues[n]);
}

TEST_CASE("spectra are bitwise deterministic") {
    const MarketParams p(0.03, 0.25);
    const Box box(0.5, 3.0, 901);
    const auto a = eigen_spectrum(p, box, 4, false);
    const auto b = eigen_spectrum(p, box, 4, false);
    REQUIRE(a.eigenvalues.size() == b.eigenvalues.size());
    CHECK(std::memcmp(a.eigenvalues.data(), b.eigenvalues.data(),
                      a.eigenvalues.size() * sizeof(double)) == 0);
    for (std::size_t n = 0; n < a.eigenfunctions.size(); ++n)
        CHECK(std::memcmp(a.eigenfunctions[n].data(), b.eigenfunctions[n].data(),
                          a.eigenfunctions[n].size() * sizeof(double)) == 0);
}

TEST_CASE("count bounds") {
    const MarketParams p(0.05, 0.2);
    CHECK_THROWS_AS(eigen_spectrum(p, Box(1.0, 2.0, 5), 6, false), std::invalid_argument);
    CHECK_THROWS_AS(eigen_spectrum(p, Box(1.0, 2.0, 5), 0, false), std::invalid_argument);
    CHECK_NOTHROW(eigen_spectrum(p, Box(1.0, 2.0, 5), 5, false));
}

TEST_CASE("matrix is symmetric as applied") {
    // dense reconstruction of the tridiagonal operator equals its transpose
    const MarketParams p(0.05, 0.2);
    const auto op = discretize(p, Box(1.0, 2.0, 8), false);
    const std::size_t n = op.matrix.size();
    std::vector<std::vector<double>> dense(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        dense[i][i] = op.matrix.diag[i];
        if (i + 1 < n) {
            dense[i][i + 1] = op.matrix.off[i];
            dense[i + 1][i] = op.matrix.off[i];
        }
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) CHECK(dense[i][j] == dense[j][i]);
}

TEST_CASE("resonance gap") {
    const MarketParams quarter(0.05, 0.2);   // lambda = 0.25
    EigenSolution sol;
    sol.grid = {1.0};
    sol.step = 1.0;
    sol.flat_potential = false;

    sol.eigenvalues = {0.2, 0.3};
    CHECK_THAT(resonance_gap(quarter, sol), WithinRel(0.05, 1e-12));

    sol.eigenvalues = {0.1, 0.25, 0.9};
    CHECK_THAT(resonance_gap(quarter, sol), WithinAbs(0.0, 1e-15));

    sol.eigenvalues = {1.0};
    CHECK_THAT(resonance_gap(quarter, sol), WithinRel(0.75, 1e-12));

    sol.eigenvalues = {};
    CHECK_THROWS_AS(resonance_gap(quarter, sol), std::invalid_argument);
}
