#pragma once

// Adaptive Gauss-Kronrod (7-15) integration on a finite interval with an
// absolute-error target.  Bisects until the local Kronrod/Gauss discrepancy
// fits the local budget; a budget that cannot be met raises instead of
// returning a value of unknown quality.

#include <cmath>
#include <string>

#include "uavris/errors.hpp"

namespace uavris::quadrature {

namespace detail {

// 15-point Kronrod extension of 7-point Gauss, abscissae on [0, 1) half-axis.
constexpr double kNodes[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.0};
constexpr double kKronrodW[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
// Gauss weights attach to the odd-indexed Kronrod nodes.
constexpr double kGaussW[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119, 0.417959183673469};

struct Panel {
    double kronrod = 0.0;
    double gauss = 0.0;
};

template <typename F>
Panel gk15(F&& f, double a, double b) {
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    Panel p;
    for (int i = 0; i < 8; ++i) {
        const double dx = half * kNodes[i];
        const double f_sum = (i == 7) ? f(mid) : f(mid - dx) + f(mid + dx);
        p.kronrod += kKronrodW[i] * f_sum;
        if (i % 2 == 1) p.gauss += kGaussW[i / 2] * f_sum;
    }
    p.kronrod *= half;
    p.gauss *= half;
    return p;
}

template <typename F>
double integrate_panel(F&& f, double a, double b, double abs_tol, int depth, int max_depth) {
    const Panel p = gk15(f, a, b);
    const double err = std::fabs(p.kronrod - p.gauss);
    if (err <= abs_tol) return p.kronrod;
    if (depth >= max_depth)
        throw ConvergenceError("adaptive quadrature exhausted depth " + std::to_string(max_depth) +
                               " with residual error " + std::to_string(err));
    const double mid = 0.5 * (a + b);
    return integrate_panel(f, a, mid, 0.5 * abs_tol, depth + 1, max_depth) +
           integrate_panel(f, mid, b, 0.5 * abs_tol, depth + 1, max_depth);
}

} // namespace detail

template <typename F>
double integrate(F&& f, double a, double b, double abs_tol = 1e-9, int max_depth = 48) {
    if (!(abs_tol > 0.0)) throw ValidationError("integrate requires abs_tol > 0");
    if (a == b) return 0.0;
    const double sign = a < b ? 1.0 : -1.0;
    if (sign < 0.0) std::swap(a, b);
    return sign * detail::integrate_panel(f, a, b, abs_tol, 0, max_depth);
}

} // namespace uavris::quadrature
