#pragma once

// Discretizes the stationary pricing operator
//     H psi = -h^2 psi'' + V(S) psi,   h^2 = planck_coefficient,
// on a finite box [lower, upper] with Dirichlet walls (psi = 0 at both
// ends, the particle-in-a-box convention) and solves for the lowest part
// of its spectrum. Uniform grid, central second differences.

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "qtunnel/market_params.hpp"
#include "qtunnel/tridiag.hpp"

namespace qtunnel {

/// Solution domain: interior grid of `points` abscissae strictly between
/// the walls. `lower` may be 0 only when the potential is switched off.
struct Box {
    double lower;
    double upper;
    std::size_t points;

    Box(double lower_, double upper_, std::size_t points_)
        : lower(lower_), upper(upper_), points(points_) {
        if (!(std::isfinite(lower) && std::isfinite(upper)))
            throw std::invalid_argument("Box: walls must be finite");
        if (!(lower >= 0.0))
            throw std::invalid_argument("Box: lower wall must be >= 0");
        if (!(upper > lower))
            throw std::invalid_argument("Box: upper wall must exceed lower wall");
        if (points < 3)
            throw std::invalid_argument("Box: need at least 3 interior points");
    }
};

/// Discretized operator plus the grid it lives on.
struct DiscreteOperator {
    std::vector<double> grid;   // interior abscissae, uniform spacing
    double step;                // grid spacing
    SymTridiag matrix;
    bool flat_potential;
};

/// Eigenvalues and grid-normalized eigenfunctions
/// (sum psi_n(s_i)^2 * step == 1).
struct EigenSolution {
    std::vector<double> grid;
    double step;
    std::vector<double> eigenvalues;                  // ascending
    std::vector<std::vector<double>> eigenfunctions;  // one per eigenvalue
    bool flat_potential;
};

/// Central-difference stencil on the interior grid s_i = lower + i*step,
/// i = 1..N, step = (upper-lower)/(N+1): diagonal 2 h^2/step^2 + V(s_i),
/// off-diagonal -h^2/step^2. With flat_potential the V term is dropped.
inline DiscreteOperator discretize(const MarketParams& params, const Box& box,
                                   bool flat_potential = false) {
    if (!flat_potential && !(box.lower > 0.0))
        throw std::domain_error("discretize: potential is singular at 0; lower wall must be > 0");

    const std::size_t n = box.points;
    const double step = (box.upper - box.lower) / static_cast<double>(n + 1);
    const double h2 = planck_coefficient(params);
    const double couple = h2 / (step * step);

    DiscreteOperator op;
    op.grid.resize(n);
    op.step = step;
    op.flat_potential = flat_potential;
    op.matrix.diag.resize(n);
    op.matrix.off.assign(n - 1, -couple);
    for (std::size_t i = 0; i < n; ++i) {
        const double s = box.lower + static_cast<double>(i + 1) * step;
        op.grid[i] = s;
        op.matrix.diag[i] = 2.0 * couple + (flat_potential ? 0.0 : potential(s));
    }
    return op;
}

/// The `count` smallest eigenpairs of the discretized operator,
/// deterministic for fixed inputs.
inline EigenSolution eigen_spectrum(const MarketParams& params, const Box& box,
                                    std::size_t count, bool flat_potential = false) {
    if (count < 1 || count > box.points)
        throw std::invalid_argument("eigen_spectrum: need 1 <= count <= grid points, got count=" +
                                    std::to_string(count));
    DiscreteOperator op = discretize(params, box, flat_potential);
    EigenPairs pairs = smallest_eigenpairs(op.matrix, count);

    EigenSolution sol;
    sol.grid = std::move(op.grid);
    sol.step = op.step;
    sol.flat_potential = flat_potential;
    sol.eigenvalues = std::move(pairs.values);
    sol.eigenfunctions = std::move(pairs.vectors);
    // rescale unit 2-norm vectors to the grid measure
    const double scale = 1.0 / std::sqrt(sol.step);
    for (auto& psi : sol.eigenfunctions)
        for (double& v : psi) v *= scale;
    return sol;
}

/// Distance from the market level lambda = r/sigma to the nearest box
/// eigenvalue; reports flag near-resonant boxes with it.
inline double resonance_gap(const MarketParams& params, const EigenSolution& solution) {
    if (solution.eigenvalues.empty())
        throw std::invalid_argument("resonance_gap: empty spectrum");
    const double lambda = lambda_constant(params);
    double best = std::abs(solution.eigenvalues.front() - lambda);
    for (double ev : solution.eigenvalues)
        best = std::min(best, std::abs(ev - lambda));
    return best;
}

}  // namespace qtunnel
