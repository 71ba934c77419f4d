#pragma once

// Closed-form link/MAC analysis for the disk-of-sensors relay scenario:
//
//  * coverage          - P(received SNR >= threshold) for a random sensor
//  * coverage_cc       - same with l chase-combining rounds accumulated
//  * round_success     - P(decode happens exactly at round l), via three
//                        routes: numeric integration of the conditional law
//                        (reference), the closed form as printed in the
//                        source material, and an index-consistent closed form
//  * avg_transmissions - expected rounds until decode or round budget
//  * success_probability / avg_throughput - slotted-access MAC chain
//
// All probability formulas reduce to sums of regularized incomplete gamma
// differences; everything is evaluated in regularized form so shapes in the
// hundreds stay far from overflow.

#include <cmath>
#include <span>
#include <vector>

#include "uavris/channel.hpp"
#include "uavris/errors.hpp"
#include "uavris/quadrature.hpp"
#include "uavris/scenario.hpp"
#include "uavris/special_functions.hpp"

namespace uavris::analytics {

enum class Method {
    closed_form,            // the plain coverage expression
    numeric_integration,    // conditional law integrated over the distance density
    closed_form_printed,      // multi-round closed form with the printed index ranges
    closed_form_consistent, // same with sums started at zero
};

struct CoverageResult {
    double probability = 0.0;
    int l_rounds = 1;
    Method method = Method::closed_form;
};

namespace detail {

// P(K, B) - P(K, A) for A <= B, evaluated on whichever tail keeps the
// difference accurate.
inline double regularized_diff(double K, double A, double B, const sf::AccuracyBudget& budget) {
    if (A > K)
        return sf::regularized_upper_gamma(K, A, budget) - sf::regularized_upper_gamma(K, B, budget);
    return sf::regularized_lower_gamma(K, B, budget) - sf::regularized_lower_gamma(K, A, budget);
}

// S(K) = sum_{i=0}^{K-1} [P(i+1, B) - P(i+1, A)].
//
// The naive sum telescopes through the Poisson CDF identity
//   sum_{i=1}^{K} Q(i, x) = K Q(K, x) - x Q(K-1, x),
// giving the three-term pair form below.  Every factor is a regularized
// tail, so the evaluation stays in [0, max(A,B)] magnitudes for any K.
inline double lower_gamma_sum(int K, double A, double B, const sf::AccuracyBudget& budget) {
    if (K == 0) return 0.0;
    double s = K * regularized_diff(K, A, B, budget);
    if (K >= 2) {
        s += B * sf::regularized_upper_gamma(K - 1.0, B, budget);
        s -= A * sf::regularized_upper_gamma(K - 1.0, A, budget);
    }
    return s;
}

struct ThresholdBounds {
    double A = 0.0; // h^2 w / theta
    double B = 0.0; // (h^2 + R^2) w / theta
};

inline ThresholdBounds threshold_bounds(const scenario::ScenarioParams& p,
                                        const channel::EquivalentChannel& eq) {
    const double t = channel::w_threshold(p) / eq.theta;
    return {p.h * p.h * t, (p.h * p.h + p.R * p.R) * t};
}

// sum_{i=i0}^{i1-1} [P(i+1,B) - P(i+1,A)] / (B - A).  Dividing by B - A
// instead of the algebraically equal R^2 w / theta makes the small- and
// large-threshold limits land exactly on 1 and 0.
inline double coverage_from_sum_range(int i0, int i1, const ThresholdBounds& tb,
                                      const sf::AccuracyBudget& budget) {
    if (tb.B <= tb.A) return i0 == 0 ? 1.0 : 0.0; // threshold underflowed to zero
    const double s = lower_gamma_sum(i1, tb.A, tb.B, budget) -
                     lower_gamma_sum(i0, tb.A, tb.B, budget);
    return s / (tb.B - tb.A);
}

inline double binomial(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    double r = 1.0;
    for (int j = 1; j <= k; ++j) r = r * (n - k + j) / j;
    return r;
}

} // namespace detail

// Coverage for a single transmission round.
inline CoverageResult coverage(const scenario::ScenarioParams& p,
                               const sf::AccuracyBudget& budget = {}) {
    const auto eq = channel::equivalent_channel(p, budget);
    const auto tb = detail::threshold_bounds(p, eq);
    return {detail::coverage_from_sum_range(0, eq.k_hat, tb, budget), 1, Method::closed_form};
}

// Coverage after l chase-combining rounds (sum of l i.i.d. round gains);
// the combined gain keeps scale theta and takes shape l * k_hat.
inline CoverageResult coverage_cc(const scenario::ScenarioParams& p, int l,
                                  const sf::AccuracyBudget& budget = {}) {
    if (l < 1) throw ValidationError("coverage_cc requires l >= 1");
    const auto eq = channel::equivalent_channel(p, budget);
    const auto tb = detail::threshold_bounds(p, eq);
    return {detail::coverage_from_sum_range(0, l * eq.k_hat, tb, budget), l, Method::closed_form};
}

namespace detail {

// Reference route: P(decode exactly at round l | d1) is the probability that
// a Gamma((l-1)k, theta) partial sum is still below the threshold while
// adding one more Gamma(k, theta) round crosses it.  Because same-scale
// gamma shapes add, the conditional is P(ka, x) - P(l k, x) with
// x = w d1^2 / theta; integrate it over the density of d1^{-2}.
inline double round_success_quadrature(const scenario::ScenarioParams& p, int l,
                                       const channel::EquivalentChannel& eq,
                                       const sf::AccuracyBudget& budget) {
    const channel::DiskGeometry g = channel::geometry_of(p);
    const double ka = static_cast<double>(l - 1) * eq.k_hat;
    const double kb = static_cast<double>(l) * eq.k_hat;
    const double w_over_theta = channel::w_threshold(p) / eq.theta;
    const double y_lo = 1.0 / (g.h * g.h + g.R * g.R);
    const double y_hi = 1.0 / (g.h * g.h);
    // Shape 0 degenerates to the point mass at zero: P(0, x) = 1, Q(0, x) = 0.
    const auto upper = [&](double k, double x) {
        return k == 0.0 ? 0.0 : sf::regularized_upper_gamma(k, x, budget);
    };
    const auto lower = [&](double k, double x) {
        return k == 0.0 ? 1.0 : sf::regularized_lower_gamma(k, x, budget);
    };
    const auto integrand = [&](double y) {
        const double x = w_over_theta / y;
        double cross;
        if (x > 0.5 * (ka + kb))
            cross = upper(kb, x) - upper(ka, x);
        else
            cross = lower(ka, x) - lower(kb, x);
        return cross * channel::inv_d1_sq_density(g, y);
    };
    return quadrature::integrate(integrand, y_lo, y_hi, 1e-11);
}

} // namespace detail

// Probability that decoding succeeds exactly at chase-combining round l.
//
// numeric_integration is the reference route: direct quadrature of the
// conditional crossing probability over the sensor-distance density.
//
// closed_form_printed reproduces the printed expression: its two leading sums
// start at index 1, which drops one term from each.  For l >= 2 the dropped
// terms cancel, so it matches the consistent form; for l = 1 only the first
// sum exists and the result is short by the first gamma-difference term.
// The printed nested correction sum is evaluated through the identity
// sum_nu C(mu,nu)(-1)^(mu-nu)/(k+mu-nu) = Beta(k, mu+1), which collapses it
// to further regularized-difference terms; this is exact algebra, not an
// approximation, and avoids the catastrophic alternating-sum cancellation
// the literal transcription would hit for large shapes.
inline CoverageResult round_success(const scenario::ScenarioParams& p, int l,
                                    Method method = Method::closed_form_consistent,
                                    const sf::AccuracyBudget& budget = {}) {
    if (l < 1) throw ValidationError("round_success requires l >= 1");
    const auto eq = channel::equivalent_channel(p, budget);
    const auto tb = detail::threshold_bounds(p, eq);
    const int ka = (l - 1) * eq.k_hat;
    const int kb = l * eq.k_hat;
    double value = 0.0;
    switch (method) {
        case Method::numeric_integration:
            value = detail::round_success_quadrature(p, l, eq, budget);
            break;
        case Method::closed_form_consistent:
            value = detail::coverage_from_sum_range(ka, kb, tb, budget);
            break;
        case Method::closed_form_printed:
            value = detail::coverage_from_sum_range(ka, kb, tb, budget);
            if (l == 1 && tb.B > tb.A)
                value -= detail::regularized_diff(1.0, tb.A, tb.B, budget) / (tb.B - tb.A);
            break;
        case Method::closed_form:
            throw ValidationError("round_success: use a per-round method, not closed_form");
    }
    return {value, l, method};
}

// Which algebraic shape of the MAC recursion to evaluate.
enum class MacForm {
    as_printed,       // no arrangement factor on multi-round events
    with_arrangement, // C(i-1, j-1) ways to place the j clean rounds
};

// Expected number of rounds spent on one packet.  ps[j-1] = P(decode exactly
// at clean round j), pc[i-1] = P(decode within i clean rounds); both indexed
// from round 1 and at least L entries long.
inline double avg_transmissions(const scenario::ScenarioParams& p,
                                std::span<const double> ps, std::span<const double> pc,
                                MacForm form = MacForm::as_printed) {
    const int L = p.L_max;
    if (static_cast<int>(ps.size()) < L || static_cast<int>(pc.size()) < L)
        throw ValidationError("avg_transmissions needs L round-success and coverage values");
    const double q = std::pow(1.0 - p.rho_access, p.S_sensors - 1); // clean-round probability
    const double c = 1.0 - q;

    if (form == MacForm::as_printed) {
        double rounds = 0.0;
        for (int i = 1; i <= L - 1; ++i) {
            double decode_at_i = 0.0;
            for (int j = 1; j <= i; ++j)
                decode_at_i += std::pow(c, i - j) * std::pow(q, j) * ps[j - 1];
            rounds += i * decode_at_i;
        }
        double exhausted = std::pow(c, L - 1);
        for (int i = 1; i <= L - 1; ++i)
            exhausted += std::pow(c, L - 1 - i) * std::pow(q, i) * (1.0 - pc[i - 1]);
        return rounds + L * exhausted;
    }

    // with_arrangement: P(T = i) for i < L counts every placement of the
    // clean rounds; P(T = L) is the complement.
    double rounds = 0.0;
    double mass = 0.0;
    for (int i = 1; i <= L - 1; ++i) {
        double decode_at_i = 0.0;
        for (int j = 1; j <= i; ++j)
            decode_at_i += detail::binomial(i - 1, j - 1) * std::pow(c, i - j) *
                           std::pow(q, j) * ps[j - 1];
        rounds += i * decode_at_i;
        mass += decode_at_i;
    }
    return rounds + L * (1.0 - mass);
}

// Per-packet MAC success probability over the round budget.
inline double success_probability(const scenario::ScenarioParams& p,
                                  std::span<const double> ps,
                                  MacForm form = MacForm::as_printed) {
    const int L = p.L_max;
    if (static_cast<int>(ps.size()) < L)
        throw ValidationError("success_probability needs L round-success values");
    const double q = std::pow(1.0 - p.rho_access, p.S_sensors - 1);
    const double c = 1.0 - q;
    double p_suc = 0.0;
    for (int i = 1; i <= L; ++i)
        for (int j = 1; j <= i; ++j) {
            const double arrangements =
                form == MacForm::with_arrangement ? detail::binomial(i - 1, j - 1) : 1.0;
            p_suc += arrangements * std::pow(c, i - j) * std::pow(q, j) * ps[j - 1];
        }
    return p_suc;
}

// Single-round access (no chase combining): the tagged sensor transmits with
// probability rho and needs a clean, covered round.
inline double success_probability_no_cc(const scenario::ScenarioParams& p, double coverage_1) {
    const double q = std::pow(1.0 - p.rho_access, p.S_sensors - 1);
    return p.rho_access * q * coverage_1;
}

inline double avg_throughput(const scenario::ScenarioParams& p, double p_suc, double t_bar) {
    if (!(t_bar > 0.0)) throw ValidationError("avg_throughput requires t_bar > 0");
    return p.bandwidth_hz * std::log2(1.0 + p.gamma_thr_lin()) * p_suc / t_bar;
}

struct MacAnalytics {
    double t_bar = 1.0;
    double p_suc = 0.0;
    double r_bar = 0.0; // bit/s
};

struct MacChain {
    std::vector<double> pc; // coverage within i rounds, i = 1..L
    std::vector<double> ps; // decode exactly at round j, j = 1..L
    MacAnalytics mac;
};

// Full analytic chain at the scenario's L_max.
inline MacChain compute_mac_chain(const scenario::ScenarioParams& p,
                                  MacForm form = MacForm::as_printed,
                                  Method ps_method = Method::closed_form_consistent,
                                  const sf::AccuracyBudget& budget = {}) {
    MacChain chain;
    chain.pc.reserve(p.L_max);
    chain.ps.reserve(p.L_max);
    for (int l = 1; l <= p.L_max; ++l) {
        chain.pc.push_back(coverage_cc(p, l, budget).probability);
        chain.ps.push_back(round_success(p, l, ps_method, budget).probability);
    }
    chain.mac.t_bar = avg_transmissions(p, chain.ps, chain.pc, form);
    chain.mac.p_suc = success_probability(p, chain.ps, form);
    chain.mac.r_bar = avg_throughput(p, chain.mac.p_suc, chain.mac.t_bar);
    return chain;
}

} // namespace uavris::analytics
