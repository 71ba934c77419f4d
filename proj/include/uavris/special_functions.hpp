#pragma once

// Scalar special functions used by the closed-form link analysis: gamma,
// log-gamma, the lower incomplete gamma (plain, regularized and log forms)
// and modified Bessel functions of the first kind I_0, I_1, I_2.
//
// Everything is plain double precision.  The incomplete gamma follows the
// classic split: power series for x < a+1, Lentz continued fraction
// otherwise, both capped by an explicit term budget so a non-converging
// call fails loudly instead of returning a silently truncated value.

#include <cmath>
#include <limits>
#include <string>

#include "uavris/errors.hpp"

namespace uavris::sf {

struct AccuracyBudget {
    double rel_tol = 1e-14; // requested relative tolerance, must be in (0, 1e-6]
    int max_terms = 500;    // iteration cap, must be >= 100
};

inline void check_budget(const AccuracyBudget& b) {
    if (!(b.rel_tol > 0.0) || b.rel_tol > 1e-6)
        throw ValidationError("AccuracyBudget.rel_tol must lie in (0, 1e-6], got " +
                              std::to_string(b.rel_tol));
    if (b.max_terms < 100)
        throw ValidationError("AccuracyBudget.max_terms must be >= 100, got " +
                              std::to_string(b.max_terms));
}

inline double gamma_fn(double x) {
    if (!(x > 0.0)) throw ValidationError("gamma_fn requires x > 0");
    return std::tgamma(x); // overflows to +inf past x ~ 171.6
}

inline double log_gamma(double x) {
    if (!(x > 0.0)) throw ValidationError("log_gamma requires x > 0");
    return std::lgamma(x);
}

namespace detail {

// Series for P(a,x) = gamma(a,x)/Gamma(a), valid (and fast) for x < a+1.
// Returns the series factor S with P = S * exp(a*ln x - x - lgamma(a)),
// where S = sum_{n>=0} x^n / (a (a+1) ... (a+n)).
inline double lower_gamma_series_factor(double a, double x, const AccuracyBudget& b) {
    double term = 1.0 / a;
    double sum = term;
    for (int n = 1; n <= b.max_terms; ++n) {
        term *= x / (a + n);
        sum += term;
        if (term < sum * b.rel_tol) return sum;
    }
    throw ConvergenceError("incomplete gamma series failed to converge, a=" +
                           std::to_string(a) + " x=" + std::to_string(x));
}

// Modified Lentz evaluation of the continued fraction for Q(a,x), valid for
// x >= a+1.  Returns H with Q = H * exp(a*ln x - x - lgamma(a)).
inline double upper_gamma_cf_factor(double a, double x, const AccuracyBudget& b) {
    constexpr double tiny = 1e-300;
    double bb = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / bb;
    double h = d;
    for (int i = 1; i <= b.max_terms; ++i) {
        const double an = -static_cast<double>(i) * (i - a);
        bb += 2.0;
        d = an * d + bb;
        if (std::fabs(d) < tiny) d = tiny;
        c = bb + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < b.rel_tol) return h;
    }
    throw ConvergenceError("incomplete gamma continued fraction failed to converge, a=" +
                           std::to_string(a) + " x=" + std::to_string(x));
}

inline double gamma_prefactor_log(double a, double x) {
    return a * std::log(x) - x - std::lgamma(a);
}

} // namespace detail

// Regularized lower incomplete gamma P(a,x) = gamma(a,x) / Gamma(a).
inline double regularized_lower_gamma(double a, double x, const AccuracyBudget& b = {}) {
    check_budget(b);
    if (!(a > 0.0)) throw ValidationError("regularized_lower_gamma requires a > 0");
    if (x < 0.0) throw ValidationError("regularized_lower_gamma requires x >= 0");
    if (x == 0.0) return 0.0;
    if (x < a + 1.0) {
        const double s = detail::lower_gamma_series_factor(a, x, b);
        return s * std::exp(detail::gamma_prefactor_log(a, x));
    }
    const double h = detail::upper_gamma_cf_factor(a, x, b);
    return 1.0 - h * std::exp(detail::gamma_prefactor_log(a, x));
}

// Regularized upper incomplete gamma Q(a,x) = 1 - P(a,x), computed on the
// branch that keeps the small tail accurate.
inline double regularized_upper_gamma(double a, double x, const AccuracyBudget& b = {}) {
    check_budget(b);
    if (!(a > 0.0)) throw ValidationError("regularized_upper_gamma requires a > 0");
    if (x < 0.0) throw ValidationError("regularized_upper_gamma requires x >= 0");
    if (x == 0.0) return 1.0;
    if (x < a + 1.0) {
        const double s = detail::lower_gamma_series_factor(a, x, b);
        return 1.0 - s * std::exp(detail::gamma_prefactor_log(a, x));
    }
    const double h = detail::upper_gamma_cf_factor(a, x, b);
    return h * std::exp(detail::gamma_prefactor_log(a, x));
}

// Unregularized gamma(a,x).  Overflows together with Gamma(a) for a >~ 171;
// large-shape callers should stay on the regularized or log forms.
inline double lower_incomplete_gamma(double a, double x, const AccuracyBudget& b = {}) {
    return regularized_lower_gamma(a, x, b) * std::tgamma(a);
}

// log P(a,x); finite for shapes far beyond the overflow range of the plain
// form (a = 400 is routine for the multi-round sums downstream).
inline double log_regularized_lower_gamma(double a, double x, const AccuracyBudget& b = {}) {
    check_budget(b);
    if (!(a > 0.0)) throw ValidationError("log_regularized_lower_gamma requires a > 0");
    if (x < 0.0) throw ValidationError("log_regularized_lower_gamma requires x >= 0");
    if (x == 0.0) return -std::numeric_limits<double>::infinity();
    if (x < a + 1.0) {
        const double s = detail::lower_gamma_series_factor(a, x, b);
        return std::log(s) + detail::gamma_prefactor_log(a, x);
    }
    const double h = detail::upper_gamma_cf_factor(a, x, b);
    const double q = h * std::exp(detail::gamma_prefactor_log(a, x));
    return std::log1p(-q);
}

// log gamma(a,x) = log P(a,x) + lgamma(a).
inline double log_lower_incomplete_gamma(double a, double x, const AccuracyBudget& b = {}) {
    return log_regularized_lower_gamma(a, x, b) + std::lgamma(a);
}

namespace detail {

// Ascending series sum for I_p(x) (all terms positive, no cancellation).
inline double bessel_i_series(int p, double x, const AccuracyBudget& b) {
    const double q = 0.25 * x * x;
    // term_0 = (x/2)^p / p!
    double term = 1.0;
    for (int j = 1; j <= p; ++j) term *= 0.5 * x / j;
    double sum = term;
    for (int k = 1; k <= b.max_terms; ++k) {
        term *= q / (static_cast<double>(k) * (k + p));
        sum += term;
        if (term < sum * b.rel_tol) return sum;
    }
    throw ConvergenceError("bessel_i series failed to converge, p=" + std::to_string(p) +
                           " x=" + std::to_string(x));
}

// Large-argument expansion of e^{-x} I_p(x); usable well below machine
// precision for x >= 60 with a handful of terms.
inline double bessel_i_scaled_asymptotic(int p, double x, const AccuracyBudget& b) {
    const double mu = 4.0 * p * p;
    double term = 1.0;
    double sum = 1.0;
    double prev = std::numeric_limits<double>::max();
    for (int k = 1; k <= b.max_terms; ++k) {
        const double num = mu - (2.0 * k - 1.0) * (2.0 * k - 1.0);
        term *= -num / (8.0 * k * x);
        if (std::fabs(term) >= prev) break; // asymptotic tail started growing
        sum += term;
        prev = std::fabs(term);
        if (std::fabs(term) < std::fabs(sum) * b.rel_tol) break;
    }
    return sum / std::sqrt(2.0 * M_PI * x);
}

constexpr double kBesselSeriesCutoff = 60.0;

} // namespace detail

// e^{-x} I_p(x) for p in {0,1,2}; stays finite for arbitrarily large x.
inline double bessel_i_scaled(int p, double x, const AccuracyBudget& b = {}) {
    check_budget(b);
    if (p < 0 || p > 2) throw ValidationError("bessel_i supports orders 0..2 only");
    if (x < 0.0) throw ValidationError("bessel_i requires x >= 0");
    if (x == 0.0) return p == 0 ? 1.0 : 0.0;
    if (x < detail::kBesselSeriesCutoff)
        return detail::bessel_i_series(p, x, b) * std::exp(-x);
    return detail::bessel_i_scaled_asymptotic(p, x, b);
}

// I_p(x) for p in {0,1,2}.  Overflows to +inf for x >~ 709 like std::exp;
// use bessel_i_scaled (or the ratio helper) in that regime.
inline double bessel_i(int p, double x, const AccuracyBudget& b = {}) {
    check_budget(b);
    if (p < 0 || p > 2) throw ValidationError("bessel_i supports orders 0..2 only");
    if (x < 0.0) throw ValidationError("bessel_i requires x >= 0");
    if (x == 0.0) return p == 0 ? 1.0 : 0.0;
    if (x < detail::kBesselSeriesCutoff) return detail::bessel_i_series(p, x, b);
    return detail::bessel_i_scaled_asymptotic(p, x, b) * std::exp(x);
}

// I_p(x) / I_0(x); well-defined for all x >= 0 (I_0 >= 1).
inline double bessel_i_ratio(int p, double x, const AccuracyBudget& b = {}) {
    return bessel_i_scaled(p, x, b) / bessel_i_scaled(0, x, b);
}

} // namespace uavris::sf
