#pragma once

// Monte Carlo counterpart of the analytic chain.  Trials are reproducible:
// every trial owns a private substream derived from (seed, purpose, trial
// index), and all reductions are integer counts, so estimates are
// bit-identical for a given (seed, trials, params) regardless of evaluation
// order.
//
// Two channel models:
//  * element          - draw every element's Nakagami amplitude and Von Mises
//                       phase error and combine coherently (the ground truth
//                       the closed forms approximate)
//  * gamma_equivalent - draw the moment-matched Gamma(k_hat, theta) round
//                       gain (the law the closed forms integrate exactly);
//                       used to adjudicate formula transcription, never the
//                       element-level physics

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "uavris/channel.hpp"
#include "uavris/errors.hpp"
#include "uavris/rng.hpp"
#include "uavris/scenario.hpp"

namespace uavris::mac {

struct Metric {
    enum class Kind { coverage, coverage_cc, round_success, t_bar, p_suc, r_bar };
    Kind kind = Kind::coverage;
    int l = 1; // round index for coverage_cc / round_success

    static Metric coverage() { return {Kind::coverage, 1}; }
    static Metric coverage_cc(int l) { return {Kind::coverage_cc, l}; }
    static Metric round_success(int l) { return {Kind::round_success, l}; }
    static Metric t_bar() { return {Kind::t_bar, 1}; }
    static Metric p_suc() { return {Kind::p_suc, 1}; }
    static Metric r_bar() { return {Kind::r_bar, 1}; }
};

struct McEstimate {
    double mean = 0.0;
    double half_width_95 = 0.0; // normal-approximation 95% half width
    std::uint64_t trials = 0;
};

enum class ChannelModel { element, gamma_equivalent };

struct SimOptions {
    ChannelModel channel = ChannelModel::element;
    // Tagged sensor behavior: retransmit every round (default) or gate each
    // round on its own Bernoulli(rho) access decision.
    bool tagged_persistent = true;
};

namespace detail {

inline McEstimate binomial_estimate(std::uint64_t successes, std::uint64_t trials) {
    const double p = static_cast<double>(successes) / static_cast<double>(trials);
    const double hw = 1.96 * std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
    return {p, hw, trials};
}

// One round gain |H|^2 (unnormalized coherent sum).
struct GainSampler {
    const scenario::ScenarioParams& p;
    ChannelModel model;
    channel::EquivalentChannel eq; // only populated for gamma_equivalent
    double n_sq = 0.0;

    GainSampler(const scenario::ScenarioParams& params, ChannelModel m)
        : p(params), model(m) {
        if (model == ChannelModel::gamma_equivalent) {
            eq = channel::equivalent_channel(p);
            n_sq = static_cast<double>(p.N) * static_cast<double>(p.N);
        }
    }

    double operator()(rng::Stream& rs) const {
        if (model == ChannelModel::element) return channel::sample_combined_gain(rs, p);
        return n_sq * channel::sample_gamma(rs, eq.k_hat, eq.theta);
    }
};

} // namespace detail

struct EpisodeOutcome {
    bool decoded = false;
    int rounds_used = 0;
};

// One packet delivery attempt: up to L_max rounds, chase combining across
// the tagged sensor's clean rounds, collision whenever any of the other
// S-1 sensors transmits (their any-active indicator collapses to a single
// Bernoulli(1-q) draw with q = (1-rho)^(S-1)).
inline EpisodeOutcome run_episode(const scenario::ScenarioParams& p, rng::Stream& rs,
                                  const SimOptions& opts = {}) {
    const detail::GainSampler gain(p, opts.channel);
    const channel::DiskGeometry geom = channel::geometry_of(p);
    const double d1 = channel::sample_sensor_distance(rs, geom);
    const double q_clean = std::pow(1.0 - p.rho_access, p.S_sensors - 1);
    const double thr = p.gamma_thr_lin();

    double acc_snr = 0.0;
    for (int round = 1; round <= p.L_max; ++round) {
        const bool tagged_tx = opts.tagged_persistent || rs.uniform01() < p.rho_access;
        const bool clean = rs.uniform01() < q_clean;
        if (tagged_tx && clean) {
            acc_snr += channel::snr_from_gain(p, d1, gain(rs));
            if (acc_snr >= thr) return {true, round};
        }
    }
    return {false, p.L_max};
}

namespace detail {

struct EpisodeTallies {
    std::uint64_t decoded = 0;
    std::uint64_t rounds_sum = 0;
    std::uint64_t rounds_sq_sum = 0;
    std::uint64_t decoded_rounds_sum = 0; // sum of rounds over decoded episodes
    std::uint64_t trials = 0;
};

inline EpisodeTallies run_episodes(const scenario::ScenarioParams& p, std::uint64_t trials,
                                   std::uint64_t seed, const SimOptions& opts) {
    EpisodeTallies t;
    t.trials = trials;
    for (std::uint64_t i = 0; i < trials; ++i) {
        rng::Stream rs(seed, "episode", i);
        const EpisodeOutcome out = run_episode(p, rs, opts);
        const auto r = static_cast<std::uint64_t>(out.rounds_used);
        t.decoded += out.decoded ? 1 : 0;
        t.rounds_sum += r;
        t.rounds_sq_sum += r * r;
        if (out.decoded) t.decoded_rounds_sum += r;
    }
    return t;
}

inline McEstimate t_bar_from_tallies(const EpisodeTallies& t) {
    const double n = static_cast<double>(t.trials);
    const double mean = static_cast<double>(t.rounds_sum) / n;
    const double var = (static_cast<double>(t.rounds_sq_sum) / n - mean * mean) * n / (n - 1.0);
    return {mean, 1.96 * std::sqrt(var / n), t.trials};
}

// r_bar = C * p_suc / t_bar is a ratio of two means over the same episodes;
// the half width comes from the delta method with the sample covariance.
inline McEstimate r_bar_from_tallies(const scenario::ScenarioParams& p, const EpisodeTallies& t) {
    const double n = static_cast<double>(t.trials);
    const double C = p.bandwidth_hz * std::log2(1.0 + p.gamma_thr_lin());
    const double d_mean = static_cast<double>(t.decoded) / n;
    const double r_mean = static_cast<double>(t.rounds_sum) / n;
    const double value = C * d_mean / r_mean;

    const double var_d = d_mean * (1.0 - d_mean);
    const double var_r = static_cast<double>(t.rounds_sq_sum) / n - r_mean * r_mean;
    const double cov_dr = static_cast<double>(t.decoded_rounds_sum) / n - d_mean * r_mean;
    const double g_d = C / r_mean;
    const double g_r = -C * d_mean / (r_mean * r_mean);
    double var = g_d * g_d * var_d + 2.0 * g_d * g_r * cov_dr + g_r * g_r * var_r;
    if (var < 0.0) var = 0.0;
    return {value, 1.96 * std::sqrt(var / n), t.trials};
}

} // namespace detail

// Channel-only estimates (no MAC): coverage within l rounds or exact-round
// crossing, for l = 1..l_max, from one shared set of trials.  Row l of the
// result reuses the same draws as row l-1 plus one more round, which is
// exactly how the analytic quantities relate.
struct RoundProfile {
    std::vector<McEstimate> coverage_cc;   // decoded within l rounds
    std::vector<McEstimate> round_success; // decoded exactly at round l
};

inline RoundProfile estimate_round_profile(const scenario::ScenarioParams& p, int l_max,
                                           std::uint64_t trials, std::uint64_t seed,
                                           const SimOptions& opts = {}) {
    if (trials == 0) throw ValidationError("estimate_round_profile requires trials > 0");
    if (l_max < 1) throw ValidationError("estimate_round_profile requires l_max >= 1");
    const detail::GainSampler gain(p, opts.channel);
    const channel::DiskGeometry geom = channel::geometry_of(p);
    const double thr = p.gamma_thr_lin();

    std::vector<std::uint64_t> crossed_at(l_max + 1, 0); // [l] = first crossing at round l
    for (std::uint64_t i = 0; i < trials; ++i) {
        rng::Stream rs(seed, "round_profile", i);
        const double d1 = channel::sample_sensor_distance(rs, geom);
        double acc = 0.0;
        for (int l = 1; l <= l_max; ++l) {
            acc += channel::snr_from_gain(p, d1, gain(rs));
            if (acc >= thr) {
                ++crossed_at[l];
                break;
            }
        }
    }

    RoundProfile prof;
    std::uint64_t within = 0;
    for (int l = 1; l <= l_max; ++l) {
        within += crossed_at[l];
        prof.coverage_cc.push_back(detail::binomial_estimate(within, trials));
        prof.round_success.push_back(detail::binomial_estimate(crossed_at[l], trials));
    }
    return prof;
}

// MAC estimates (t_bar, p_suc, r_bar) from one shared set of episodes.
struct MacProfile {
    McEstimate t_bar;
    McEstimate p_suc;
    McEstimate r_bar;
};

inline MacProfile estimate_mac_profile(const scenario::ScenarioParams& p, std::uint64_t trials,
                                       std::uint64_t seed, const SimOptions& opts = {}) {
    if (trials == 0) throw ValidationError("estimate_mac_profile requires trials > 0");
    const detail::EpisodeTallies t = detail::run_episodes(p, trials, seed, opts);
    return {detail::t_bar_from_tallies(t),
            detail::binomial_estimate(t.decoded, t.trials),
            detail::r_bar_from_tallies(p, t)};
}

// Single-metric entry point.
inline McEstimate estimate(const scenario::ScenarioParams& p, Metric metric,
                           std::uint64_t trials, std::uint64_t seed,
                           const SimOptions& opts = {}) {
    if (trials == 0) throw ValidationError("estimate requires trials > 0");
    using Kind = Metric::Kind;
    switch (metric.kind) {
        case Kind::coverage:
            return estimate_round_profile(p, 1, trials, seed, opts).coverage_cc[0];
        case Kind::coverage_cc: {
            if (metric.l < 1) throw ValidationError("coverage_cc metric requires l >= 1");
            return estimate_round_profile(p, metric.l, trials, seed, opts).coverage_cc[metric.l - 1];
        }
        case Kind::round_success: {
            if (metric.l < 1) throw ValidationError("round_success metric requires l >= 1");
            return estimate_round_profile(p, metric.l, trials, seed, opts).round_success[metric.l - 1];
        }
        case Kind::t_bar:
            return estimate_mac_profile(p, trials, seed, opts).t_bar;
        case Kind::p_suc:
            return estimate_mac_profile(p, trials, seed, opts).p_suc;
        case Kind::r_bar:
            return estimate_mac_profile(p, trials, seed, opts).r_bar;
    }
    throw ValidationError("unknown metric");
}

// Element-level coverage over an (N, d2) grid with common random numbers:
// each trial draws one element sequence up to max(n_values) and evaluates
// every (N, d2) cell from the same partial sums.  Each cell still receives
// a full per-trial element-level sample; sharing only correlates cells,
// which is statistically harmless for per-cell estimates and makes a
// 12-cell million-trial adjudication run ~3x faster than independent runs.
inline std::vector<std::vector<McEstimate>> estimate_coverage_grid_element(
    const scenario::ScenarioParams& base, const std::vector<int>& n_values,
    const std::vector<double>& d2_values, std::uint64_t trials, std::uint64_t seed) {
    if (trials == 0) throw ValidationError("estimate_coverage_grid_element requires trials > 0");
    if (n_values.empty() || d2_values.empty())
        throw ValidationError("estimate_coverage_grid_element requires a non-empty grid");
    for (size_t k = 1; k < n_values.size(); ++k)
        if (n_values[k] <= n_values[k - 1])
            throw ValidationError("n_values must be strictly increasing");

    const channel::DiskGeometry geom = channel::geometry_of(base);
    const int n_max = n_values.back();
    const double thr_const = base.gamma_thr_lin() /
                             (base.gamma_t_lin() * base.C0_lin() * base.G_lin() *
                              base.d0 * base.d0);

    std::vector<std::vector<std::uint64_t>> hits(
        n_values.size(), std::vector<std::uint64_t>(d2_values.size(), 0));
    std::vector<double> gain_at(n_values.size(), 0.0);

    for (std::uint64_t trial = 0; trial < trials; ++trial) {
        rng::Stream rs(seed, "coverage_grid", trial);
        const double d1 = channel::sample_sensor_distance(rs, geom);
        double re = 0.0, im = 0.0;
        size_t next = 0;
        for (int i = 1; i <= n_max; ++i) {
            const channel::CosSin e = channel::sample_element_contribution(rs, base);
            re += e.c;
            im += e.s;
            if (i == n_values[next]) {
                gain_at[next] = re * re + im * im;
                ++next;
            }
        }
        for (size_t a = 0; a < n_values.size(); ++a)
            for (size_t b = 0; b < d2_values.size(); ++b) {
                // |H|^2 >= gamma_thr (d1 d2)^2 / (gamma_t C0 G d0^2)
                const double needed = thr_const * d1 * d1 * d2_values[b] * d2_values[b];
                if (gain_at[a] >= needed) ++hits[a][b];
            }
    }

    std::vector<std::vector<McEstimate>> out(n_values.size());
    for (size_t a = 0; a < n_values.size(); ++a)
        for (size_t b = 0; b < d2_values.size(); ++b)
            out[a].push_back(detail::binomial_estimate(hits[a][b], trials));
    return out;
}

} // namespace uavris::mac
