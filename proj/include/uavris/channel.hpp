#pragma once

// Geometry and channel model for a disk of sensors served via an elevated
// reflecting board: sensor-to-board distance law, the moment-matched
// equivalent gamma channel for the coherently combined reflection, and the
// samplers that realize the same channel element by element.

#include <cmath>
#include <string>

#include "uavris/errors.hpp"
#include "uavris/rng.hpp"
#include "uavris/scenario.hpp"
#include "uavris/special_functions.hpp"

namespace uavris::channel {

struct DiskGeometry {
    double h = 50.0; // board height above the disk center, m
    double R = 20.0; // disk radius, m

    double d1_min() const { return h; }
    double d1_max() const { return std::sqrt(h * h + R * R); }
};

inline DiskGeometry geometry_of(const scenario::ScenarioParams& p) { return {p.h, p.R}; }

struct CdfValue {
    double value = 0.0;
    bool in_support = true; // false when x was clamped to an endpoint
};

// CDF of the sensor-to-board distance d1 for a sensor uniform on the disk:
// F(x) = (x^2 - h^2) / R^2 on [h, sqrt(h^2 + R^2)].
inline CdfValue d1_cdf(const DiskGeometry& g, double x) {
    if (x < g.d1_min()) return {0.0, false};
    if (x > g.d1_max()) return {1.0, false};
    return {(x * x - g.h * g.h) / (g.R * g.R), true};
}

// Density of y = d1^{-2}, supported on [1/(h^2+R^2), 1/h^2].
inline double inv_d1_sq_density(const DiskGeometry& g, double y) {
    const double lo = 1.0 / (g.h * g.h + g.R * g.R);
    const double hi = 1.0 / (g.h * g.h);
    if (y < lo || y > hi) return 0.0;
    return 1.0 / (y * y * g.R * g.R);
}

// Moment-matched gamma description of the squared magnitude of the combined
// reflection, normalized by N: |H|/N ~ Nakagami(m_tilde, omega_tilde), so
// (|H|/N)^2 ~ Gamma(k_hat, theta) after rounding the shape to an integer.
struct EquivalentChannel {
    double omega_tilde = 0.0;
    double m_tilde = 0.0;
    int k_hat = 1;       // round-half-up of m_tilde, clamped to >= 1
    double theta = 0.0;  // omega_tilde / m_tilde
};

inline EquivalentChannel equivalent_channel(double m, double Omega, double kappa, int N,
                                            const sf::AccuracyBudget& budget = {}) {
    if (!(m >= 0.5)) throw ValidationError("equivalent_channel requires m >= 0.5");
    if (!(Omega > 0.0)) throw ValidationError("equivalent_channel requires Omega > 0");
    if (kappa < 0.0) throw ValidationError("equivalent_channel requires kappa >= 0");
    if (N < 1) throw ValidationError("equivalent_channel requires N >= 1");

    // Bessel ratios keep this finite for arbitrarily large kappa.
    const double r1 = sf::bessel_i_ratio(1, kappa, budget);
    const double r2 = sf::bessel_i_ratio(2, kappa, budget);
    const double nak_mean = std::exp(sf::log_gamma(m + 0.5) - sf::log_gamma(m)) * std::sqrt(Omega / m);

    EquivalentChannel eq;
    eq.omega_tilde = r1 * nak_mean;
    eq.omega_tilde *= eq.omega_tilde;
    if (!(eq.omega_tilde > 0.0))
        throw ModelError("equivalent channel degenerates: omega_tilde = 0 (kappa too small)");

    const double denom = 2.0 + 2.0 * r2 - 4.0 * eq.omega_tilde;
    if (!(denom > 0.0))
        throw ModelError("equivalent channel moment-matching denominator <= 0");

    eq.m_tilde = N * eq.omega_tilde / denom;
    eq.k_hat = static_cast<int>(std::floor(eq.m_tilde + 0.5));
    if (eq.k_hat < 1) eq.k_hat = 1;
    eq.theta = eq.omega_tilde / eq.m_tilde;
    return eq;
}

inline EquivalentChannel equivalent_channel(const scenario::ScenarioParams& p,
                                            const sf::AccuracyBudget& budget = {}) {
    return equivalent_channel(p.m, p.Omega, p.kappa, p.N, budget);
}

/// Decode-threshold constant: the received SNR clears gamma_thr exactly when
// (|H|/N)^2 >= w * d1^2.
inline double w_threshold(const scenario::ScenarioParams& p) {
    return p.gamma_thr_lin() * p.d2 * p.d2 /
           (p.gamma_t_lin() * p.G_lin() * p.C0_lin() * p.d0 * p.d0 *
            static_cast<double>(p.N) * static_cast<double>(p.N));
}

// SNR of one combined-reflection realization given |H|^2 (unnormalized sum).
inline double snr_from_gain(const scenario::ScenarioParams& p, double d1, double gain_sq) {
    const double ratio = p.d0 / (d1 * p.d2);
    return p.gamma_t_lin() * p.C0_lin() * p.G_lin() * ratio * ratio * gain_sq;
}

// ---- samplers ----------------------------------------------------------

// Distance of a uniformly placed sensor: d1 = sqrt(h^2 + R^2 U).
inline double sample_sensor_distance(rng::Stream& rs, const DiskGeometry& g) {
    return std::sqrt(g.h * g.h + g.R * g.R * rs.uniform01());
}

// Gamma(shape, scale) via Marsaglia-Tsang; shapes below 1 are boosted and
// corrected with the standard U^{1/shape} factor.
inline double sample_gamma(rng::Stream& rs, double shape, double scale) {
    double boost = 1.0;
    if (shape < 1.0) {
        boost = std::pow(rs.uniform01(), 1.0 / shape);
        shape += 1.0;
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x, v;
        do {
            x = rs.normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = rs.uniform01();
        const double x2 = x * x;
        if (u < 1.0 - 0.0331 * x2 * x2) return boost * d * v * scale;
        if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return boost * d * v * scale;
    }
}

// Nakagami(m, Omega) amplitude.
inline double sample_nakagami(rng::Stream& rs, double m, double Omega) {
    return std::sqrt(sample_gamma(rs, m, Omega / m));
}

struct CosSin {
    double c = 1.0;
    double s = 0.0;
};

// Von Mises (mean 0, concentration kappa) via the Best-Fisher rejection
// scheme.  The accepted variable already *is* the cosine of the angle, so
// this returns (cos phi, sin phi) without any trig inversion; the sign of
// the sine is the usual symmetric coin flip.
inline CosSin sample_von_mises_cossin(rng::Stream& rs, double kappa) {
    if (kappa < 0.0) throw ValidationError("sample_von_mises requires kappa >= 0");
    if (kappa == 0.0) {
        const double phi = (2.0 * rs.uniform01() - 1.0) * M_PI;
        return {std::cos(phi), std::sin(phi)};
    }
    const double tau = 1.0 + std::sqrt(1.0 + 4.0 * kappa * kappa);
    const double rho = (tau - std::sqrt(2.0 * tau)) / (2.0 * kappa);
    const double r = (1.0 + rho * rho) / (2.0 * rho);
    for (;;) {
        const double z = std::cos(M_PI * rs.uniform01());
        const double f = (1.0 + r * z) / (r + z);
        const double c = kappa * (r - f);
        const double u2 = rs.uniform01();
        if (c * (2.0 - c) - u2 > 0.0 || std::log(c / u2) + 1.0 - c >= 0.0) {
            const double sign = rs.uniform01() < 0.5 ? -1.0 : 1.0;
            const double f_clamped = f > 1.0 ? 1.0 : (f < -1.0 ? -1.0 : f);
            return {f_clamped, sign * std::sqrt(1.0 - f_clamped * f_clamped)};
        }
    }
}

// Von Mises angle in (-pi, pi].
inline double sample_von_mises(rng::Stream& rs, double kappa) {
    const CosSin cs = sample_von_mises_cossin(rs, kappa);
    return std::copysign(std::acos(cs.c), cs.s);
}

// One per-element contribution to the coherent sum.
inline CosSin sample_element_contribution(rng::Stream& rs, const scenario::ScenarioParams& p) {
    const double a = sample_nakagami(rs, p.m, p.Omega);
    const CosSin cs = sample_von_mises_cossin(rs, p.kappa);
    return {a * cs.c, a * cs.s};
}

// |sum_i a_i e^{j phi_i}|^2 over the N configured elements (unnormalized).
inline double sample_combined_gain(rng::Stream& rs, const scenario::ScenarioParams& p) {
    double re = 0.0, im = 0.0;
    for (int i = 0; i < p.N; ++i) {
        const CosSin e = sample_element_contribution(rs, p);
        re += e.c;
        im += e.s;
    }
    return re * re + im * im;
}

// Full received-SNR sample for a sensor at distance d1.
inline double sample_received_snr(rng::Stream& rs, const scenario::ScenarioParams& p, double d1) {
    return snr_from_gain(p, d1, sample_combined_gain(rs, p));
}

} // namespace uavris::channel
