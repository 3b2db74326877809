#pragma once

// Globally adaptive Gauss-Kronrod (G7,K15) quadrature. All nodes are
// interior, so integrands with endpoint singularities (the square-root
// zero at a turning point, say) are never evaluated at the endpoints.

#include <cmath>
#include <cstddef>
#include <queue>
#include <stdexcept>
#include <vector>

#include "qtunnel/errors.hpp"

namespace qtunnel {

struct QuadratureResult {
    double value;
    double error_estimate;
    std::size_t evaluations;
};

namespace detail {

// Kronrod-15 abscissae/weights and the embedded Gauss-7 weights.
inline constexpr double kGK15Nodes[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};

inline constexpr double kGK15Weights[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};

inline constexpr double kG7Weights[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

struct Panel {
    double a, b;
    double value;
    double error;
};

struct PanelWorse {
    bool operator()(const Panel& x, const Panel& y) const { return x.error < y.error; }
};

template <typename F>
Panel evaluate_panel(F&& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    const double fc = f(c);
    double resk = kGK15Weights[7] * fc;
    double resg = kG7Weights[3] * fc;
    for (int j = 0; j < 7; ++j) {
        const double dx = h * kGK15Nodes[j];
        const double f1 = f(c - dx);
        const double f2 = f(c + dx);
        resk += kGK15Weights[j] * (f1 + f2);
        if (j % 2 == 1) resg += kG7Weights[(j - 1) / 2] * (f1 + f2);
    }
    return Panel{a, b, resk * h, std::abs((resk - resg) * h)};
}

}  // namespace detail

/// Integrates f over [a, b] to the requested relative tolerance by
/// repeatedly bisecting the panel with the largest error estimate.
/// Throws NumericError carrying the best estimate when the evaluation
/// budget runs out first.
template <typename F>
QuadratureResult integrate_adaptive(F&& f, double a, double b, double rel_tol,
                                    std::size_t max_evaluations = 1'000'000) {
    if (!(rel_tol > 0.0)) throw std::invalid_argument("integrate_adaptive: rel_tol must be > 0");
    if (a == b) return QuadratureResult{0.0, 0.0, 0};

    std::priority_queue<detail::Panel, std::vector<detail::Panel>, detail::PanelWorse> panels;
    std::size_t evals = 15;
    panels.push(detail::evaluate_panel(f, a, b));
    double total = panels.top().value;
    double err = panels.top().error;

    const double tiny = 1e-300;
    while (err > rel_tol * std::max(std::abs(total), tiny)) {
        if (evals + 30 > max_evaluations)
            throw NumericError("quadrature budget exhausted before reaching tolerance", total,
                               err / std::max(std::abs(total), tiny), evals);
        detail::Panel worst = panels.top();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(worst.a < mid && mid < worst.b))
            throw NumericError("quadrature panel too narrow to refine further", total,
                               err / std::max(std::abs(total), tiny), evals);
        panels.pop();
        total -= worst.value;
        err -= worst.error;
        detail::Panel left = detail::evaluate_panel(f, worst.a, mid);
        detail::Panel right = detail::evaluate_panel(f, mid, worst.b);
        evals += 30;
        total += left.value + right.value;
        err += left.error + right.error;
        panels.push(left);
        panels.push(right);
    }
    return QuadratureResult{total, err, evals};
}

}  // namespace qtunnel
