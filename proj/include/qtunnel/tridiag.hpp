#pragma once

// Symmetric tridiagonal eigensolver: the k smallest eigenpairs via Sturm
// sequence bisection plus inverse iteration. Fully deterministic for a
// fixed matrix (fixed bisection schedule, fixed integer-seeded start
// vectors), which the snapshot and reproducibility tests rely on.

#include <cmath>
#include <cstdint>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "qtunnel/errors.hpp"

namespace qtunnel {

/// Symmetric tridiagonal matrix: diag has n entries, off has n-1.
struct SymTridiag {
    std::vector<double> diag;
    std::vector<double> off;

    std::size_t size() const { return diag.size(); }
};

struct EigenPairs {
    std::vector<double> values;                 // ascending
    std::vector<std::vector<double>> vectors;   // unit 2-norm, first nonzero entry > 0
};

namespace detail {

// Number of eigenvalues of T strictly below x, from the signs of the
// LDL^T pivots. Pivots near zero are replaced by -pivmin (the classic
// bisection guard), which at worst shifts the count by the same rule on
// every call, keeping the bisection consistent.
inline int sturm_count_below(const SymTridiag& t, double x, double pivmin) {
    int count = 0;
    double q = 1.0;
    const std::size_t n = t.size();
    for (std::size_t i = 0; i < n; ++i) {
        q = t.diag[i] - x - (i == 0 ? 0.0 : t.off[i - 1] * t.off[i - 1] / q);
        if (std::abs(q) < pivmin) q = -pivmin;
        if (q < 0.0) ++count;
    }
    return count;
}

inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// LU factors of (T - mu I) with partial pivoting; tridiagonal input gains
// a second superdiagonal as fill-in.
struct ShiftedLU {
    std::vector<double> lower;   // multipliers
    std::vector<double> d;       // U main diagonal
    std::vector<double> du1;     // U first superdiagonal
    std::vector<double> du2;     // U second superdiagonal (fill-in)
    std::vector<bool> swapped;   // row interchange at step i
};

inline ShiftedLU factor_shifted(const SymTridiag& t, double mu, double pivot_floor) {
    const std::size_t n = t.size();
    ShiftedLU lu;
    lu.lower.assign(n > 0 ? n - 1 : 0, 0.0);
    lu.d.resize(n);
    lu.du1.assign(n > 0 ? n - 1 : 0, 0.0);
    lu.du2.assign(n > 1 ? n - 2 : 0, 0.0);
    lu.swapped.assign(n > 0 ? n - 1 : 0, false);

    for (std::size_t i = 0; i < n; ++i) lu.d[i] = t.diag[i] - mu;
    for (std::size_t i = 0; i + 1 < n; ++i) lu.du1[i] = t.off[i];

    std::vector<double> sub(n > 0 ? n - 1 : 0);
    for (std::size_t i = 0; i + 1 < n; ++i) sub[i] = t.off[i];

    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (std::abs(lu.d[i]) >= std::abs(sub[i])) {
            // no interchange
            if (std::abs(lu.d[i]) < pivot_floor)
                lu.d[i] = (std::signbit(lu.d[i]) ? -pivot_floor : pivot_floor);
            const double m = sub[i] / lu.d[i];
            lu.lower[i] = m;
            lu.d[i + 1] -= m * lu.du1[i];
            if (i + 2 < n) lu.du2[i] = 0.0;
        } else {
            // interchange rows i and i+1
            lu.swapped[i] = true;
            const double m = lu.d[i] / sub[i];
            lu.lower[i] = m;
            const double tmp_d = lu.du1[i];
            lu.d[i] = sub[i];
            lu.du1[i] = lu.d[i + 1];
            lu.d[i + 1] = tmp_d - m * lu.d[i + 1];
            if (i + 2 < n) {
                lu.du2[i] = lu.du1[i + 1];
                lu.du1[i + 1] = -m * lu.du2[i];
            }
        }
    }
    if (n > 0 && std::abs(lu.d[n - 1]) < pivot_floor)
        lu.d[n - 1] = (std::signbit(lu.d[n - 1]) ? -pivot_floor : pivot_floor);
    return lu;
}

inline void solve_shifted(const ShiftedLU& lu, std::vector<double>& x) {
    const std::size_t n = lu.d.size();
    // forward elimination
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (lu.swapped[i]) std::swap(x[i], x[i + 1]);
        x[i + 1] -= lu.lower[i] * x[i];
    }
    // back substitution
    for (std::size_t ri = n; ri-- > 0;) {
        double v = x[ri];
        if (ri + 1 < n) v -= lu.du1[ri] * x[ri + 1];
        if (ri + 2 < n) v -= lu.du2[ri] * x[ri + 2];
        x[ri] = v / lu.d[ri];
    }
}

inline double norm2(const std::vector<double>& x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return std::sqrt(s);
}

}  // namespace detail

/// The k smallest eigenvalues and unit eigenvectors of a symmetric
/// tridiagonal matrix. Eigenvalues come from bisection on the Sturm count
/// (resolved to roughly eps * ||T||), eigenvectors from inverse iteration
/// with Gram-Schmidt against the previously accepted vectors. Throws
/// NumericError if an eigenvector fails its residual check.
inline EigenPairs smallest_eigenpairs(const SymTridiag& t, std::size_t k) {
    const std::size_t n = t.size();
    if (n == 0) throw std::invalid_argument("smallest_eigenpairs: empty matrix");
    if (k < 1 || k > n)
        throw std::invalid_argument("smallest_eigenpairs: need 1 <= k <= n, got k=" +
                                    std::to_string(k) + ", n=" + std::to_string(n));
    if (t.off.size() + 1 != n)
        throw std::invalid_argument("smallest_eigenpairs: off-diagonal size mismatch");

    const double eps = std::numeric_limits<double>::epsilon();
    const double safmin = std::numeric_limits<double>::min();

    // Gershgorin interval and pivot guard
    double gl = std::numeric_limits<double>::infinity();
    double gu = -std::numeric_limits<double>::infinity();
    double max_off2 = 0.0;
    double anorm = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double lo = (i > 0) ? std::abs(t.off[i - 1]) : 0.0;
        const double hi = (i + 1 < n) ? std::abs(t.off[i]) : 0.0;
        gl = std::min(gl, t.diag[i] - lo - hi);
        gu = std::max(gu, t.diag[i] + lo + hi);
        anorm = std::max(anorm, std::abs(t.diag[i]) + lo + hi);
        if (i + 1 < n) max_off2 = std::max(max_off2, t.off[i] * t.off[i]);
    }
    const double pivmin = safmin * std::max(1.0, max_off2);
    const double width0 = gu - gl;
    gl -= 2.0 * eps * std::abs(gl) + 2.0 * pivmin;
    gu += 2.0 * eps * std::abs(gu) + 2.0 * pivmin;

    EigenPairs out;
    out.values.resize(k);

    // Bisection, one eigenvalue index at a time. 80 halvings take the
    // Gershgorin width below eps-level for any double input.
    for (std::size_t m = 1; m <= k; ++m) {
        double lo = gl, hi = gu;
        for (int it = 0; it < 80 && (hi - lo) > 2.0 * eps * std::max(std::abs(lo), std::abs(hi)) + 2.0 * safmin; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (detail::sturm_count_below(t, mid, pivmin) >= static_cast<int>(m))
                hi = mid;
            else
                lo = mid;
        }
        out.values[m - 1] = 0.5 * (lo + hi);
    }

    // Inverse iteration per eigenvalue.
    const double pivot_floor = std::max(safmin, eps * eps * std::max(anorm, width0));
    out.vectors.reserve(k);
    for (std::size_t m = 0; m < k; ++m) {
        const double mu = out.values[m];
        const auto lu = detail::factor_shifted(t, mu, pivot_floor);

        std::vector<double> x(n);
        std::uint64_t rng_state = 0x8000000000000001ULL + static_cast<std::uint64_t>(m);
        for (std::size_t i = 0; i < n; ++i)
            x[i] = static_cast<double>(detail::splitmix64(rng_state) >> 11) * 0x1.0p-53 - 0.5;
        double nx = detail::norm2(x);
        for (double& v : x) v /= nx;

        bool converged = false;
        double growth = 0.0;
        const int max_iter = 20;
        int used = 0;
        for (int it = 1; it <= max_iter; ++it) {
            used = it;
            detail::solve_shifted(lu, x);
            growth = detail::norm2(x);
            for (double& v : x) v /= growth;
            // Gram-Schmidt against accepted vectors; required for
            // orthogonality when eigenvalues cluster.
            for (const auto& prev : out.vectors) {
                double dot = 0.0;
                for (std::size_t i = 0; i < n; ++i) dot += prev[i] * x[i];
                for (std::size_t i = 0; i < n; ++i) x[i] -= dot * prev[i];
            }
            const double nrm = detail::norm2(x);
            if (nrm < 0.1) {  // start vector fell into the accepted span; reseed
                for (std::size_t i = 0; i < n; ++i)
                    x[i] = static_cast<double>(detail::splitmix64(rng_state) >> 11) * 0x1.0p-53 - 0.5;
                const double nn = detail::norm2(x);
                for (double& v : x) v /= nn;
                continue;
            }
            for (double& v : x) v /= nrm;
            // (T - mu) y = x_old with |x_old| = 1, so 1/|y| estimates the
            // residual of the normalized iterate.
            if (1.0 / growth <= 1e3 * eps * std::max(anorm, 1.0)) {
                converged = true;
                break;
            }
        }

        // explicit residual check
        double resid = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double r = (t.diag[i] - mu) * x[i];
            if (i > 0) r += t.off[i - 1] * x[i - 1];
            if (i + 1 < n) r += t.off[i] * x[i + 1];
            resid = std::max(resid, std::abs(r));
        }
        if (!converged && resid > 1e4 * eps * std::max(anorm, 1.0))
            throw NumericError("inverse iteration failed for eigenvalue index " +
                                   std::to_string(m + 1) + " after " + std::to_string(used) +
                                   " iterations",
                               mu, resid, static_cast<std::size_t>(used));

        // sign convention: first nonzero component positive
        for (std::size_t i = 0; i < n; ++i) {
            if (x[i] != 0.0) {
                if (x[i] < 0.0)
                    for (double& v : x) v = -v;
                break;
            }
        }
        out.vectors.push_back(std::move(x));
    }
    return out;
}

}  // namespace qtunnel
