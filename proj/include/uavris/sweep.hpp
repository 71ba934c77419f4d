#pragma once

// Grid sweeps over scenario knobs, CSV emission, element-count optimization,
// and the closed-form-vs-simulation validation report.  Output is fully
// deterministic: every double is printed with "%.9g", rows follow a fixed
// axis order (n, d2, r, l, speed), and each grid point derives its own RNG
// seed from the sweep seed and the point index.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "uavris/analytics.hpp"
#include "uavris/energy.hpp"
#include "uavris/errors.hpp"
#include "uavris/mac_sim.hpp"
#include "uavris/rng.hpp"
#include "uavris/scenario.hpp"

namespace uavris::sweep {

inline std::string fmt_g9(double v) {
    if (std::isnan(v)) return "";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

struct GridAxis {
    std::string name; // one of: n, d2, r, l, speed
    std::vector<double> values;
};

namespace detail {

// Canonical axis order; also the id-column order in every CSV row.
inline const std::vector<std::string>& axis_names() {
    static const std::vector<std::string> names = {"n", "d2", "r", "l", "speed"};
    return names;
}

inline int axis_rank(std::string_view name) {
    const auto& names = axis_names();
    for (size_t i = 0; i < names.size(); ++i)
        if (names[i] == name) return static_cast<int>(i);
    return -1;
}

inline int as_int(std::string_view key, double v) {
    const double r = std::floor(v + 0.5);
    if (std::fabs(v - r) > 1e-9 || r < -2e9 || r > 2e9)
        throw ValidationError(std::string(key) + " axis values must be integers");
    return static_cast<int>(r);
}

inline void apply_axis(scenario::ScenarioParams& p, std::string_view name, double value) {
    if (name == "n") p.N = as_int(name, value);
    else if (name == "d2") p.d2 = value;
    else if (name == "r") p.R = value;
    else if (name == "l") p.L_max = as_int(name, value);
    else if (name == "speed") p.speed_kmh = value;
    else throw ValidationError("unknown sweep axis '" + std::string(name) + "'");
}

} // namespace detail

// Axis spec grammar: "<name>=<start>:<stop>[:<step>]" or "<name>=v1,v2,...".
// Ranges are inclusive of the endpoint when the step lands on it.
inline GridAxis parse_axis(std::string_view spec) {
    const size_t eq = spec.find('=');
    if (eq == std::string_view::npos || eq == 0 || eq + 1 == spec.size())
        throw ValidationError("axis spec must look like name=start:stop:step or name=v1,v2: got '" +
                              std::string(spec) + "'");
    GridAxis axis;
    axis.name = std::string(spec.substr(0, eq));
    if (detail::axis_rank(axis.name) < 0)
        throw ValidationError("unknown sweep axis '" + axis.name + "'");
    const std::string body(spec.substr(eq + 1));

    auto parse_num = [&](const std::string& tok) {
        size_t pos = 0;
        double v = 0.0;
        try {
            v = std::stod(tok, &pos);
        } catch (const std::exception&) {
            throw ValidationError("bad number '" + tok + "' in axis '" + axis.name + "'");
        }
        if (pos != tok.size())
            throw ValidationError("bad number '" + tok + "' in axis '" + axis.name + "'");
        return v;
    };

    if (body.find(',') != std::string::npos) {
        size_t start = 0;
        while (start <= body.size()) {
            const size_t comma = body.find(',', start);
            const std::string tok =
                body.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
            axis.values.push_back(parse_num(tok));
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
    } else if (body.find(':') != std::string::npos) {
        const size_t c1 = body.find(':');
        const size_t c2 = body.find(':', c1 + 1);
        const double start = parse_num(body.substr(0, c1));
        const double stop =
            parse_num(body.substr(c1 + 1, c2 == std::string::npos ? std::string::npos : c2 - c1 - 1));
        const double step = c2 == std::string::npos ? 1.0 : parse_num(body.substr(c2 + 1));
        if (!(step > 0.0)) throw ValidationError("axis step must be > 0 in '" + axis.name + "'");
        if (stop < start) throw ValidationError("axis stop must be >= start in '" + axis.name + "'");
        const auto count = static_cast<long long>(std::floor((stop - start) / step + 1e-9)) + 1;
        if (count > 2'000'000) throw ValidationError("axis '" + axis.name + "' has too many points");
        for (long long k = 0; k < count; ++k) axis.values.push_back(start + static_cast<double>(k) * step);
    } else {
        axis.values.push_back(parse_num(body));
    }
    if (axis.values.empty()) throw ValidationError("axis '" + axis.name + "' has no values");
    return axis;
}

// Metric registry.  Analytic values always come from the closed-form chain;
// the _mc columns (optional) re-estimate the starred ones by simulation.
inline const std::vector<std::string>& metric_names() {
    static const std::vector<std::string> names = {
        "p_c", "p_c_l", "t_bar", "p_suc", "r_bar", "l_t_hours", "d_f_bits"};
    return names;
}

inline bool metric_has_mc(std::string_view name) {
    return name == "p_c" || name == "p_c_l" || name == "t_bar" || name == "p_suc" ||
           name == "r_bar";
}

struct SweepRequest {
    scenario::ScenarioParams base = scenario::baseline();
    std::vector<GridAxis> axes;        // any subset of the known axes, any order
    std::vector<std::string> metrics;  // empty = all metrics
    std::uint64_t mc_trials = 0;       // 0 = analytic only
    std::uint64_t seed = 1;
    mac::ChannelModel mc_channel = mac::ChannelModel::element;
    analytics::MacForm mac_form = analytics::MacForm::as_printed;
    analytics::Method ps_method = analytics::Method::closed_form_consistent;
};

struct PointMetrics {
    double p_c = std::numeric_limits<double>::quiet_NaN();
    double p_c_l = std::numeric_limits<double>::quiet_NaN();
    double t_bar = std::numeric_limits<double>::quiet_NaN();
    double p_suc = std::numeric_limits<double>::quiet_NaN();
    double r_bar = std::numeric_limits<double>::quiet_NaN();
    double l_t_hours = std::numeric_limits<double>::quiet_NaN();
    double d_f_bits = std::numeric_limits<double>::quiet_NaN();
    bool unflyable = false;

    double by_name(std::string_view name) const {
        if (name == "p_c") return p_c;
        if (name == "p_c_l") return p_c_l;
        if (name == "t_bar") return t_bar;
        if (name == "p_suc") return p_suc;
        if (name == "r_bar") return r_bar;
        if (name == "l_t_hours") return l_t_hours;
        if (name == "d_f_bits") return d_f_bits;
        throw ValidationError("unknown metric '" + std::string(name) + "'");
    }
};

// All analytic metrics at one parameter point.  An overweight point still
// gets its channel and MAC values; only the flight metrics stay empty.
inline PointMetrics compute_point(const scenario::ScenarioParams& p,
                                  analytics::MacForm form = analytics::MacForm::as_printed,
                                  analytics::Method ps_method = analytics::Method::closed_form_consistent,
                                  const sf::AccuracyBudget& budget = {}) {
    PointMetrics out;
    try {
        scenario::validate(p);
    } catch (const UnflyableError&) {
        out.unflyable = true; // range checks all passed; only the weight gate fired
    }
    const analytics::MacChain chain = analytics::compute_mac_chain(p, form, ps_method, budget);
    out.p_c = chain.pc.front();
    out.p_c_l = chain.pc.back();
    out.t_bar = chain.mac.t_bar;
    out.p_suc = chain.mac.p_suc;
    out.r_bar = chain.mac.r_bar;
    if (!out.unflyable) {
        const energy::EnergyBreakdown e = energy::energy_breakdown(p);
        out.l_t_hours = e.lifetime_hours;
        out.d_f_bits = out.r_bar * e.lifetime_hours * 3600.0;
    }
    return out;
}

struct SweepResult {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows; // cells already formatted
};

namespace detail {

struct Point {
    scenario::ScenarioParams params;
    std::vector<double> axis_values; // aligned with the sorted axes
};

inline std::vector<GridAxis> sorted_axes(const std::vector<GridAxis>& axes) {
    std::vector<GridAxis> sorted;
    for (const std::string& name : axis_names())
        for (const GridAxis& a : axes)
            if (a.name == name) {
                for (const GridAxis& b : sorted)
                    if (b.name == name) throw ValidationError("duplicate sweep axis '" + name + "'");
                if (a.values.empty()) throw ValidationError("axis '" + name + "' has no values");
                sorted.push_back(a);
            }
    if (sorted.size() != axes.size()) throw ValidationError("unknown sweep axis in request");
    return sorted;
}

template <typename Visit>
inline void enumerate_points(const scenario::ScenarioParams& base,
                             const std::vector<GridAxis>& sorted, Visit&& visit) {
    std::vector<size_t> idx(sorted.size(), 0);
    std::uint64_t point_index = 0;
    while (true) {
        Point pt;
        pt.params = base;
        pt.axis_values.resize(sorted.size());
        for (size_t a = 0; a < sorted.size(); ++a) {
            pt.axis_values[a] = sorted[a].values[idx[a]];
            apply_axis(pt.params, sorted[a].name, pt.axis_values[a]);
        }
        visit(pt, point_index);
        ++point_index;
        size_t a = sorted.size();
        while (a > 0) {
            --a;
            if (++idx[a] < sorted[a].values.size()) break;
            idx[a] = 0;
            if (a == 0) return;
        }
        if (sorted.empty()) return;
    }
}

} // namespace detail

// Validate the requested metric names and return them in canonical order.
inline std::vector<std::string> resolve_metrics(const std::vector<std::string>& requested) {
    if (requested.empty()) return metric_names();
    for (const std::string& want : requested) {
        bool known = false;
        for (const std::string& c : metric_names()) known = known || want == c;
        if (!known) throw ValidationError("unknown metric '" + want + "'");
    }
    std::vector<std::string> out;
    for (const std::string& c : metric_names()) {
        size_t count = 0;
        for (const std::string& want : requested) count += want == c ? 1 : 0;
        if (count > 1) throw ValidationError("duplicate metric '" + c + "'");
        if (count == 1) out.push_back(c);
    }
    return out;
}

inline SweepResult run_sweep(const SweepRequest& req) {
    const std::vector<GridAxis> axes = detail::sorted_axes(req.axes);
    const std::vector<std::string> metrics = resolve_metrics(req.metrics);
    const bool with_mc = req.mc_trials > 0;

    SweepResult result;
    result.columns = {"n", "d2", "r", "l", "speed_kmh"};
    for (const std::string& m : metrics) {
        result.columns.push_back(m);
        if (with_mc && metric_has_mc(m)) {
            result.columns.push_back(m + "_mc");
            result.columns.push_back(m + "_mc_hw95");
        }
    }
    if (with_mc) result.columns.push_back("mc_trials");
    result.columns.push_back("error");

    bool want_pc = false, want_pcl = false, want_mac_mc = false;
    for (const std::string& m : metrics) {
        want_pc |= m == "p_c";
        want_pcl |= m == "p_c_l";
        want_mac_mc |= m == "t_bar" || m == "p_suc" || m == "r_bar";
    }

    detail::enumerate_points(req.base, axes, [&](const detail::Point& pt, std::uint64_t index) {
        const scenario::ScenarioParams& p = pt.params;
        const PointMetrics pm = compute_point(p, req.mac_form, req.ps_method);

        mac::RoundProfile profile;
        mac::MacProfile mac_profile;
        bool have_profile = false, have_mac = false;
        if (with_mc) {
            const std::uint64_t point_seed = rng::Stream(req.seed, "sweep-point", index).next_u64();
            const mac::SimOptions opts{req.mc_channel, true};
            if (want_pc || want_pcl) {
                const int l_max = want_pcl ? p.L_max : 1;
                profile = mac::estimate_round_profile(p, l_max, req.mc_trials, point_seed, opts);
                have_profile = true;
            }
            if (want_mac_mc) {
                mac_profile = mac::estimate_mac_profile(p, req.mc_trials, point_seed, opts);
                have_mac = true;
            }
        }

        std::vector<std::string> row;
        row.push_back(std::to_string(p.N));
        row.push_back(fmt_g9(p.d2));
        row.push_back(fmt_g9(p.R));
        row.push_back(std::to_string(p.L_max));
        row.push_back(fmt_g9(p.speed_kmh));
        for (const std::string& m : metrics) {
            row.push_back(fmt_g9(pm.by_name(m)));
            if (with_mc && metric_has_mc(m)) {
                mac::McEstimate est;
                if (m == "p_c" && have_profile) est = profile.coverage_cc.front();
                else if (m == "p_c_l" && have_profile) est = profile.coverage_cc.back();
                else if (m == "t_bar" && have_mac) est = mac_profile.t_bar;
                else if (m == "p_suc" && have_mac) est = mac_profile.p_suc;
                else if (m == "r_bar" && have_mac) est = mac_profile.r_bar;
                row.push_back(fmt_g9(est.mean));
                row.push_back(fmt_g9(est.half_width_95));
            }
        }
        if (with_mc) row.push_back(std::to_string(req.mc_trials));
        row.push_back(pm.unflyable ? "unflyable" : "");
        result.rows.push_back(std::move(row));
    });
    return result;
}

inline void write_csv(std::ostream& os, const SweepResult& r) {
    for (size_t c = 0; c < r.columns.size(); ++c)
        os << (c ? "," : "") << r.columns[c];
    os << "\n";
    for (const auto& row : r.rows) {
        for (size_t c = 0; c < row.size(); ++c) os << (c ? "," : "") << row[c];
        os << "\n";
    }
}

// Named sweep configurations for the standard report plots.
struct PresetInfo {
    std::string name;
    std::string summary;
};

inline const std::vector<PresetInfo>& sweep_presets() {
    static const std::vector<PresetInfo> presets = {
        {"coverage", "single-round coverage vs element count for hop distances 200/250/300 m"},
        {"cc-range", "coverage after the round budget vs hop distance for budgets 1/2/3"},
        {"throughput", "round usage, success probability and throughput vs element count for budgets 1/2/3"},
        {"data-distance", "flight lifetime and data per flight vs element count for hop distances 200/250/300 m"},
        {"data-disk", "data per flight vs element count for disk radii 20/60 m and budgets 1/3"},
    };
    return presets;
}

inline SweepRequest make_preset_sweep(std::string_view name, scenario::ScenarioParams base) {
    SweepRequest req;
    if (name == "coverage") {
        req.axes = {parse_axis("n=200:800:10"), parse_axis("d2=200,250,300")};
        req.metrics = {"p_c"};
    } else if (name == "cc-range") {
        base.N = 400;
        req.axes = {parse_axis("d2=100:400:5"), parse_axis("l=1,2,3")};
        req.metrics = {"p_c_l"};
    } else if (name == "throughput") {
        base.d2 = 250.0;
        req.axes = {parse_axis("n=200:800:10"), parse_axis("l=1,2,3")};
        req.metrics = {"t_bar", "p_suc", "r_bar"};
    } else if (name == "data-distance") {
        base.L_max = 3;
        req.axes = {parse_axis("n=200:800:10"), parse_axis("d2=200,250,300")};
        req.metrics = {"r_bar", "l_t_hours", "d_f_bits"};
    } else if (name == "data-disk") {
        base.d2 = 200.0;
        req.axes = {parse_axis("n=200:800:10"), parse_axis("r=20,60"), parse_axis("l=1,3")};
        req.metrics = {"r_bar", "l_t_hours", "d_f_bits"};
    } else {
        throw ValidationError("unknown sweep preset '" + std::string(name) + "'");
    }
    req.base = base;
    return req;
}

// Exhaustive integer scan of the element count.  Ties keep the smaller N;
// once the airframe is overweight every larger N is too (weight is monotone
// in N), so flight-metric scans stop there.
struct OptimizeTracePoint {
    int n = 0;
    double value = std::numeric_limits<double>::quiet_NaN();
    bool unflyable = false;
};

struct OptimizeResult {
    std::string metric;
    int best_n = 0;
    double best_value = std::numeric_limits<double>::quiet_NaN();
    bool stopped_at_weight_limit = false;
    std::vector<OptimizeTracePoint> trace;
};

inline OptimizeResult optimize_n(const scenario::ScenarioParams& base, std::string_view metric,
                                 int n_min, int n_max, int step = 1,
                                 analytics::MacForm form = analytics::MacForm::as_printed,
                                 analytics::Method ps_method = analytics::Method::closed_form_consistent) {
    if (n_min < 1) throw ValidationError("optimize_n requires n_min >= 1");
    if (n_max < n_min) throw ValidationError("optimize_n requires n_max >= n_min");
    if (step < 1) throw ValidationError("optimize_n requires step >= 1");
    bool known = false;
    for (const std::string& c : metric_names()) known = known || metric == c;
    if (!known) throw ValidationError("unknown metric '" + std::string(metric) + "'");
    const bool flight_metric = metric == "l_t_hours" || metric == "d_f_bits";

    OptimizeResult res;
    res.metric = std::string(metric);
    bool found = false;
    for (int n = n_min; n <= n_max; n += step) {
        scenario::ScenarioParams p = base;
        p.N = n;
        const PointMetrics pm = compute_point(p, form, ps_method);
        const double v = pm.by_name(metric);
        res.trace.push_back({n, v, pm.unflyable});
        if (pm.unflyable && flight_metric) {
            res.stopped_at_weight_limit = true;
            break;
        }
        if (std::isfinite(v) && (!found || v > res.best_value)) {
            found = true;
            res.best_n = n;
            res.best_value = v;
        }
    }
    if (!found)
        throw ModelError("optimize_n found no scoreable point in [" + std::to_string(n_min) +
                         ", " + std::to_string(n_max) + "]");
    return res;
}

// Side-by-side table of the closed forms against simulation on the
// moment-matched channel.  The simulation draws the same per-round gain law
// the formulas integrate, so any systematic gap is a transcription problem
// in a formula, not channel-model error.  Three analytic columns per row:
// the printed-form algebra, the self-consistent variant, and direct numeric
// integration of the round-success integrand.
struct ValidationRow {
    std::string metric; // "p_s_l", "p_suc" or "t_bar"
    int n = 0;
    double d2 = 0.0;
    int l = 0; // round index for p_s_l rows, 0 otherwise
    double closed_printed = std::numeric_limits<double>::quiet_NaN();
    double closed_consistent = std::numeric_limits<double>::quiet_NaN();
    double numeric = std::numeric_limits<double>::quiet_NaN();
    double mc = std::numeric_limits<double>::quiet_NaN();
    double mc_hw95 = std::numeric_limits<double>::quiet_NaN();
    std::uint64_t mc_trials = 0;
    std::string mc_channel = "gamma";
};

inline std::vector<ValidationRow> validate_report(const scenario::ScenarioParams& base,
                                                  const std::vector<int>& n_values,
                                                  const std::vector<double>& d2_values,
                                                  std::uint64_t trials, std::uint64_t seed) {
    if (trials == 0) throw ValidationError("validate_report requires trials > 0");
    if (n_values.empty() || d2_values.empty())
        throw ValidationError("validate_report requires a non-empty grid");
    const mac::SimOptions opts{mac::ChannelModel::gamma_equivalent, true};

    std::vector<ValidationRow> rows;
    std::uint64_t point_index = 0;
    for (int n : n_values) {
        for (double d2 : d2_values) {
            scenario::ScenarioParams p = base;
            p.N = n;
            p.d2 = d2;
            const std::uint64_t point_seed =
                rng::Stream(seed, "validate-point", point_index).next_u64();
            ++point_index;

            const analytics::MacChain printed = analytics::compute_mac_chain(
                p, analytics::MacForm::as_printed, analytics::Method::closed_form_printed);
            const analytics::MacChain consistent = analytics::compute_mac_chain(
                p, analytics::MacForm::with_arrangement, analytics::Method::closed_form_consistent);
            const analytics::MacChain numeric = analytics::compute_mac_chain(
                p, analytics::MacForm::with_arrangement, analytics::Method::numeric_integration);
            const mac::RoundProfile profile =
                mac::estimate_round_profile(p, p.L_max, trials, point_seed, opts);
            const mac::MacProfile sim = mac::estimate_mac_profile(p, trials, point_seed, opts);

            for (int l = 1; l <= p.L_max; ++l) {
                ValidationRow row;
                row.metric = "p_s_l";
                row.n = n;
                row.d2 = d2;
                row.l = l;
                row.closed_printed = printed.ps[l - 1];
                row.closed_consistent = consistent.ps[l - 1];
                row.numeric = numeric.ps[l - 1];
                row.mc = profile.round_success[l - 1].mean;
                row.mc_hw95 = profile.round_success[l - 1].half_width_95;
                row.mc_trials = trials;
                rows.push_back(std::move(row));
            }
            ValidationRow suc;
            suc.metric = "p_suc";
            suc.n = n;
            suc.d2 = d2;
            suc.closed_printed = printed.mac.p_suc;
            suc.closed_consistent = consistent.mac.p_suc;
            suc.numeric = numeric.mac.p_suc;
            suc.mc = sim.p_suc.mean;
            suc.mc_hw95 = sim.p_suc.half_width_95;
            suc.mc_trials = trials;
            rows.push_back(std::move(suc));
            ValidationRow tb;
            tb.metric = "t_bar";
            tb.n = n;
            tb.d2 = d2;
            tb.closed_printed = printed.mac.t_bar;
            tb.closed_consistent = consistent.mac.t_bar;
            tb.numeric = numeric.mac.t_bar;
            tb.mc = sim.t_bar.mean;
            tb.mc_hw95 = sim.t_bar.half_width_95;
            tb.mc_trials = trials;
            rows.push_back(std::move(tb));
        }
    }
    return rows;
}

inline void write_validation_csv(std::ostream& os, const std::vector<ValidationRow>& rows) {
    os << "metric,n,d2,l,closed_printed,closed_consistent,numeric,mc,mc_hw95,mc_trials,mc_channel\n";
    for (const ValidationRow& r : rows) {
        os << r.metric << "," << r.n << "," << fmt_g9(r.d2) << ",";
        if (r.l > 0) os << r.l;
        os << "," << fmt_g9(r.closed_printed) << "," << fmt_g9(r.closed_consistent) << ","
           << fmt_g9(r.numeric) << "," << fmt_g9(r.mc) << "," << fmt_g9(r.mc_hw95) << ","
           << r.mc_trials << "," << r.mc_channel << "\n";
    }
}

} // namespace uavris::sweep
