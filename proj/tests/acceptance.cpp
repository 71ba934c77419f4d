// End-to-end acceptance gates: ten checks with pinned tolerances, one
// PASS/FAIL line each, exit code = number of failures.  Tolerances live
// next to each check; simulation checks use pinned seeds so every run is
// reproducible.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "uavris/analytics.hpp"
#include "uavris/channel.hpp"
#include "uavris/energy.hpp"
#include "uavris/mac_sim.hpp"
#include "uavris/rng.hpp"
#include "uavris/scenario.hpp"
#include "uavris/sweep.hpp"

using namespace uavris;

namespace {

int failures = 0;

void report(int idx, bool ok, const std::string& detail) {
    std::printf("%s criterion %d: %s\n", ok ? "PASS" : "FAIL", idx, detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

void run(int idx, const std::function<std::pair<bool, std::string>()>& check) {
    try {
        const auto [ok, detail] = check();
        report(idx, ok, detail);
    } catch (const std::exception& e) {
        report(idx, false, std::string("exception: ") + e.what());
    }
}

scenario::ScenarioParams at(int n, double d2) {
    scenario::ScenarioParams p = scenario::baseline();
    p.N = n;
    p.d2 = d2;
    return p;
}

std::string fmt(double v) { return sweep::fmt_g9(v); }

// ---- criterion 1: element-level MC vs closed-form coverage ----------------

std::pair<bool, std::string> check_coverage_adjudication() {
    const std::vector<int> ns = {200, 400, 600, 800};
    const std::vector<double> d2s = {200.0, 250.0, 300.0};
    const std::uint64_t trials = 1000000;

    const auto start = std::chrono::steady_clock::now();
    const auto grid =
        mac::estimate_coverage_grid_element(scenario::baseline(), ns, d2s, trials, 20260819);
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    double max_diff = 0.0;
    int worst_n = 0;
    double worst_d2 = 0.0;
    for (size_t a = 0; a < ns.size(); ++a)
        for (size_t b = 0; b < d2s.size(); ++b) {
            const double closed = analytics::coverage(at(ns[a], d2s[b])).probability;
            const double diff = std::abs(grid[a][b].mean - closed);
            if (diff > max_diff) {
                max_diff = diff;
                worst_n = ns[a];
                worst_d2 = d2s[b];
            }
        }

    // The moment match discards the order-N term of the combined mean power,
    // so the exact simulated law sits slightly to the right of the fitted
    // gamma law. Fold that known deficit back into the closed form to show
    // how much of the worst-cell gap it alone explains.
    scenario::ScenarioParams worst = at(worst_n, worst_d2);
    const channel::EquivalentChannel ch = channel::equivalent_channel(worst);
    const double base = analytics::coverage(worst).probability;
    worst.gamma_t_db +=
        10.0 * std::log10(1.0 + (1.0 - ch.omega_tilde) / (worst_n * ch.omega_tilde));
    const double predicted_shift = analytics::coverage(worst).probability - base;

    const bool ok = max_diff < 0.01 && seconds < 600.0;
    return {ok, "12-point element-level grid at 1e6 trials: max |mc - closed| = " +
                    fmt(max_diff) + " (< 0.01) at " + std::to_string(worst_n) +
                    " elements / " + fmt(worst_d2) +
                    " m (dropped mean-power term alone predicts " + fmt(predicted_shift) +
                    "), " + fmt(seconds) + " s (< 600)"};
}

// ---- criterion 2: first-round identities -----------------------------------

std::pair<bool, std::string> check_first_round_identities() {
    double worst_quad = 0.0, worst_cons = 0.0, worst_cc = 0.0;
    bool tbar_ok = true;
    for (int n : {200, 400, 800})
        for (double d2 : {200.0, 250.0, 300.0}) {
            scenario::ScenarioParams p = at(n, d2);
            const double pc = analytics::coverage(p).probability;
            worst_quad = std::max(
                worst_quad,
                std::abs(analytics::round_success(p, 1, analytics::Method::numeric_integration)
                             .probability -
                         pc));
            worst_cons = std::max(
                worst_cons,
                std::abs(analytics::round_success(p, 1, analytics::Method::closed_form_consistent)
                             .probability -
                         pc));
            worst_cc = std::max(worst_cc,
                                std::abs(analytics::coverage_cc(p, 1).probability - pc));
            p.L_max = 1;
            std::vector<double> ps = {pc}, pcv = {pc};
            tbar_ok = tbar_ok &&
                      analytics::avg_transmissions(p, ps, pcv, analytics::MacForm::as_printed) ==
                          1.0 &&
                      analytics::avg_transmissions(p, ps, pcv,
                                                   analytics::MacForm::with_arrangement) == 1.0;
        }
    const bool ok = worst_quad <= 1e-10 && worst_cons <= 1e-10 && worst_cc <= 1e-12 && tbar_ok;
    return {ok, "first-round checks over 9 points: |integration - coverage| = " + fmt(worst_quad) +
                    " (<= 1e-10), |consistent - coverage| = " + fmt(worst_cons) +
                    " (<= 1e-10), |cc(1) - coverage| = " + fmt(worst_cc) +
                    " (<= 1e-12), single-round t_bar exact = " + (tbar_ok ? "yes" : "no")};
}

// ---- criterion 3: round-success telescoping --------------------------------

std::pair<bool, std::string> check_telescoping() {
    double worst = 0.0;
    for (int n : {200, 350, 500, 650, 800})
        for (double d2 : {200.0, 250.0, 300.0}) {
            const scenario::ScenarioParams p = at(n, d2);
            double sum = 0.0;
            for (int l = 1; l <= 3; ++l)
                sum += analytics::round_success(p, l, analytics::Method::numeric_integration)
                           .probability;
            worst = std::max(worst,
                             std::abs(sum - analytics::coverage_cc(p, 3).probability));
        }
    return {worst < 1e-6, "|sum of 3 integrated round-success terms - 3-round coverage| over a "
                          "5x3 grid: max = " +
                              fmt(worst) + " (< 1e-6)"};
}

// ---- criterion 4: retransmission range extension ----------------------------

std::pair<bool, std::string> check_range_extension() {
    const auto coverage_at = [](double d2, int l) {
        scenario::ScenarioParams p = at(400, d2);
        return analytics::coverage_cc(p, l).probability;
    };
    const auto bisect_d2_for = [&](int l) {
        double lo = 50.0, hi = 1000.0; // coverage decreasing in d2
        for (int it = 0; it < 80 && hi - lo > 1e-6; ++it) {
            const double mid = 0.5 * (lo + hi);
            (coverage_at(mid, l) >= 0.9 ? lo : hi) = mid;
        }
        return 0.5 * (lo + hi);
    };
    const double d2_1 = bisect_d2_for(1);
    const double d2_3 = bisect_d2_for(3);
    const double ratio = d2_3 / (2.0 * d2_1);
    const bool ok = std::abs(ratio - 1.0) <= 0.20;
    return {ok, "0.9-coverage distance: single round " + fmt(d2_1) + " m, three rounds " +
                    fmt(d2_3) + " m, ratio to doubling = " + fmt(ratio) + " (within 1 +- 0.20)"};
}

// ---- criterion 5: throughput ordering and saturation ------------------------

std::pair<bool, std::string> check_throughput_ordering() {
    const auto r_bar = [](int n, double d2, int l) {
        scenario::ScenarioParams p = at(n, d2);
        p.L_max = l;
        return analytics::compute_mac_chain(p, analytics::MacForm::as_printed,
                                            analytics::Method::closed_form_consistent)
            .mac.r_bar;
    };
    bool order_ok = true;
    double min_gain = 1e300;
    for (int n : {300, 350, 400, 450, 500}) {
        const double gain = r_bar(n, 250.0, 3) - r_bar(n, 250.0, 1);
        min_gain = std::min(min_gain, gain);
        order_ok = order_ok && gain >= 0.0;
    }
    bool sat_ok = true;
    double worst_ratio = 1.0;
    for (int l = 1; l <= 3; ++l) {
        const double ratio = r_bar(800, 250.0, l) / r_bar(650, 250.0, l);
        if (std::abs(ratio - 1.0) > std::abs(worst_ratio - 1.0)) worst_ratio = ratio;
        sat_ok = sat_ok && ratio >= 0.99 && ratio <= 1.01;
    }
    return {order_ok && sat_ok,
            "three-round throughput >= single-round for N in {300..500} (min gain " +
                fmt(min_gain) + " bit/s); saturation ratio r(800)/r(650) worst = " +
                fmt(worst_ratio) + " (in [0.99, 1.01])"};
}

// ---- criterion 6: flight lifetime anchors and monotonicity ------------------

std::pair<bool, std::string> check_lifetime() {
    const auto minutes = [](int n, double speed) {
        scenario::ScenarioParams p = scenario::baseline();
        p.N = n;
        p.speed_kmh = speed;
        return energy::energy_breakdown(p).lifetime_hours * 60.0;
    };
    const double m50 = minutes(50, 0.0);
    const double m400 = minutes(400, 0.0);
    bool mono = true;
    double prev = minutes(50, 0.0);
    for (int n = 100; n <= 800; n += 50) {
        const double cur = minutes(n, 0.0);
        mono = mono && cur < prev;
        prev = cur;
    }
    prev = minutes(400, 0.0);
    for (int s = 10; s <= 50; s += 10) { // overweight beyond ~54 km/h at 400 elements
        const double cur = minutes(400, static_cast<double>(s));
        mono = mono && cur < prev;
        prev = cur;
    }
    const bool ok = std::abs(m50 - 21.3) <= 0.1 && std::abs(m400 - 12.4) <= 0.1 && mono;
    return {ok, "hover lifetime: 50 elements " + fmt(m50) + " min (21.3 +- 0.1), 400 elements " +
                    fmt(m400) + " min (12.4 +- 0.1), decreasing in count and speed = " +
                    (mono ? "yes" : "no")};
}

// ---- criterion 7: data-per-flight curve structure ---------------------------

std::vector<double> data_curve(double d2, double r_disk, int l) {
    std::vector<double> out;
    for (int n = 200; n <= 800; n += 10) {
        scenario::ScenarioParams p = scenario::baseline();
        p.N = n;
        p.d2 = d2;
        p.R = r_disk;
        p.L_max = l;
        const analytics::MacChain chain = analytics::compute_mac_chain(
            p, analytics::MacForm::as_printed, analytics::Method::closed_form_consistent);
        out.push_back(energy::data_per_flight_bits(p, chain.mac.r_bar));
    }
    return out;
}

std::vector<double> smooth3(const std::vector<double>& v) {
    std::vector<double> s(v.size());
    s.front() = v.front();
    s.back() = v.back();
    for (size_t i = 1; i + 1 < v.size(); ++i) s[i] = (v[i - 1] + v[i] + v[i + 1]) / 3.0;
    return s;
}

// Rounding the gamma shape to an integer leaves a low-amplitude sawtooth on
// the steep flank of the curve, and one 3-point pass damps it but cannot
// remove it on a step-10 grid. A local maximum therefore counts as a peak
// only when its prominence (height above the higher of the two flanking
// saddles) clears 2% of the curve's dynamic range: measured ripple stays
// below 0.8% of range while the shallowest genuine peak clears 4.9%.
constexpr double kPeakProminenceShare = 0.02;

struct PeakCount {
    int material = 0;
    double absorbed_share = 0.0; // largest suppressed prominence / range
};

PeakCount count_material_maxima(const std::vector<double>& s) {
    const double hi = *std::max_element(s.begin(), s.end());
    const double lo = *std::min_element(s.begin(), s.end());
    const double range = hi - lo;
    PeakCount out;
    if (range <= 0.0) return out;
    for (size_t i = 1; i + 1 < s.size(); ++i) {
        if (!(s[i] > s[i - 1] && s[i] > s[i + 1])) continue;
        double saddle_l = s[i];
        for (size_t j = i; j-- > 0;) {
            saddle_l = std::min(saddle_l, s[j]);
            if (s[j] >= s[i]) break;
        }
        double saddle_r = s[i];
        for (size_t j = i + 1; j < s.size(); ++j) {
            saddle_r = std::min(saddle_r, s[j]);
            if (s[j] >= s[i]) break;
        }
        const double share = (s[i] - std::max(saddle_l, saddle_r)) / range;
        if (share >= kPeakProminenceShare)
            ++out.material;
        else
            out.absorbed_share = std::max(out.absorbed_share, share);
    }
    return out;
}

std::pair<bool, std::string> check_data_per_flight_structure() {
    bool ok = true;
    std::string detail = "smoothed data-per-flight over N in 200..800: ";
    int prev_arg = -1;
    for (double d2 : {200.0, 250.0, 300.0}) {
        const std::vector<double> s = smooth3(data_curve(d2, 20.0, 3));
        const PeakCount peaks = count_material_maxima(s);
        const int arg =
            static_cast<int>(std::max_element(s.begin(), s.end()) - s.begin());
        const bool interior = arg > 0 && arg + 1 < static_cast<int>(s.size());
        ok = ok && peaks.material == 1 && interior && arg >= prev_arg;
        detail += "d2=" + fmt(d2) + ": " + std::to_string(peaks.material) +
                  " peak at N=" + std::to_string(200 + 10 * arg) +
                  " (absorbed ripple " + fmt(peaks.absorbed_share) + " of range); ";
        prev_arg = arg;
    }
    for (double r_disk : {20.0, 60.0}) {
        const std::vector<double> s3 = smooth3(data_curve(200.0, r_disk, 3));
        const std::vector<double> s1 = smooth3(data_curve(200.0, r_disk, 1));
        const double max3 = *std::max_element(s3.begin(), s3.end());
        const double max1 = *std::max_element(s1.begin(), s1.end());
        ok = ok && max3 >= max1;
        detail += "disk " + fmt(r_disk) + " m: max(3 rounds)/max(1 round) = " +
                  fmt(max3 / max1) + " (>= 1); ";
    }
    return {ok, detail};
}

// ---- criterion 8: validation report through the CLI -------------------------

std::pair<bool, std::string> check_validation_report() {
    const std::string out = "acceptance_validate.csv";
    const std::string cmd = std::string(UAVRIS_CLI_PATH) +
                            " validate --n 400 --d2 200,250,300 --trials 1000000 --seed 3" +
                            " --out " + out + " > acceptance_validate.log 2>&1";
    if (std::system(cmd.c_str()) != 0) return {false, "validate verb exited nonzero"};

    std::ifstream in(out);
    if (!in) return {false, "validate verb produced no output file"};
    std::string line;
    if (!std::getline(in, line) || line.empty()) return {false, "validation report is empty"};

    int gated = 0;
    double worst_excess = -1e300;
    std::string worst_row = "none";
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (cells.size() < 11) return {false, "malformed report row: " + line};
        const std::string& metric = cells[0];
        if (metric != "p_s_l" && metric != "p_suc") continue; // t_bar rows are informational
        const double numeric = std::stod(cells[6]);
        const double mc = std::stod(cells[7]);
        const double hw = std::stod(cells[8]);
        const double trials = std::stod(cells[9]);
        // Wald half-width degenerates to 0 on zero-hit cells; the rule-of-three
        // bound 3.69/trials is the matching 95% resolution floor.
        const double gate = hw + 3.69 / trials;
        const double excess = std::abs(numeric - mc) - gate;
        if (excess > worst_excess) {
            worst_excess = excess;
            worst_row = metric + " at d2=" + cells[2] +
                        (cells[3].empty() ? "" : " round " + cells[3]);
        }
        ++gated;
    }
    const bool ok = gated == 12 && worst_excess <= 0.0;
    return {ok, "validation report: " + std::to_string(gated) +
                    " gated rows at 1e6 trials, tightest margin " + fmt(-worst_excess) +
                    " at " + worst_row + " (|numeric - mc| <= half-width + 3.69/trials)"};
}

// ---- criterion 9: sampler moments -------------------------------------------

std::pair<bool, std::string> check_samplers() {
    const std::uint64_t n = 1000000;
    bool ok = true;
    std::string detail = "1e6-draw sampler checks: ";

    const double targets_c1[] = {0.24249961258080194535, 0.44638996589653450705,
                                 0.69777465796400798201, 0.89338313704408522159};
    const double targets_c2[] = {0.030001549676792218597, 0.1072200682069309859,
                                 0.30222534203599201799, 0.64264674518236591137};
    const double kappas[] = {0.5, 1.0, 2.0, 5.0};
    double worst_sigma = 0.0;
    for (int k = 0; k < 4; ++k) {
        double sum_c = 0.0, sum_c_sq = 0.0, sum_c2 = 0.0, sum_c2_sq = 0.0;
        for (std::uint64_t i = 0; i < n; ++i) {
            rng::Stream rs(90001, "acceptance-vm", i * 4 + static_cast<std::uint64_t>(k));
            const channel::CosSin cs = channel::sample_von_mises_cossin(rs, kappas[k]);
            const double c2 = cs.c * cs.c - cs.s * cs.s;
            sum_c += cs.c;
            sum_c_sq += cs.c * cs.c;
            sum_c2 += c2;
            sum_c2_sq += c2 * c2;
        }
        const double nn = static_cast<double>(n);
        const double mean_c = sum_c / nn;
        const double se_c = std::sqrt((sum_c_sq / nn - mean_c * mean_c) / nn);
        const double mean_c2 = sum_c2 / nn;
        const double se_c2 = std::sqrt((sum_c2_sq / nn - mean_c2 * mean_c2) / nn);
        const double dev_c = std::abs(mean_c - targets_c1[k]) / se_c;
        const double dev_c2 = std::abs(mean_c2 - targets_c2[k]) / se_c2;
        worst_sigma = std::max({worst_sigma, dev_c, dev_c2});
        ok = ok && dev_c <= 4.0 && dev_c2 <= 4.0;
    }
    detail += "circular moments worst dev " + fmt(worst_sigma) + " sigma (<= 4); ";

    double sum_p = 0.0, sum_p_sq = 0.0;
    for (std::uint64_t i = 0; i < n; ++i) {
        rng::Stream rs(90002, "acceptance-nak", i);
        const double a = channel::sample_nakagami(rs, 3.0, 1.0);
        sum_p += a * a;
        sum_p_sq += a * a * a * a;
    }
    const double nn = static_cast<double>(n);
    const double mean_p = sum_p / nn;
    const double se_p = std::sqrt((sum_p_sq / nn - mean_p * mean_p) / nn);
    const double dev_p = std::abs(mean_p - 1.0) / se_p;
    ok = ok && dev_p <= 4.0;
    detail += "fading power dev " + fmt(dev_p) + " sigma (<= 4); ";

    const channel::DiskGeometry geom = channel::geometry_of(scenario::baseline());
    std::vector<double> u(n);
    for (std::uint64_t i = 0; i < n; ++i) {
        rng::Stream rs(90003, "acceptance-d1", i);
        const double d1 = channel::sample_sensor_distance(rs, geom);
        u[i] = (d1 * d1 - geom.h * geom.h) / (geom.R * geom.R);
    }
    std::sort(u.begin(), u.end());
    double ks = 0.0;
    for (std::uint64_t i = 0; i < n; ++i) {
        const double lo = static_cast<double>(i) / nn;
        const double hi = static_cast<double>(i + 1) / nn;
        ks = std::max({ks, std::abs(u[i] - lo), std::abs(u[i] - hi)});
    }
    ok = ok && ks < 0.002;
    detail += "squared-distance uniformity KS = " + fmt(ks) + " (< 0.002)";
    return {ok, detail};
}

// ---- criterion 10: byte-identical sweep reruns ------------------------------

std::pair<bool, std::string> check_determinism() {
    const auto run_once = [](const std::string& out) {
        const std::string cmd = std::string(UAVRIS_CLI_PATH) +
                                " sweep --grid n=300:400:50 --grid d2=200,250" +
                                " --metrics p_c,p_suc --trials 5000 --seed 77" +
                                " --mc-channel element --out " + out +
                                " > acceptance_sweep.log 2>&1";
        return std::system(cmd.c_str()) == 0;
    };
    if (!run_once("acceptance_sweep_a.csv") || !run_once("acceptance_sweep_b.csv"))
        return {false, "sweep verb exited nonzero"};
    std::ifstream fa("acceptance_sweep_a.csv"), fb("acceptance_sweep_b.csv");
    if (!fa || !fb) return {false, "sweep verb produced no output file"};
    std::stringstream sa, sb;
    sa << fa.rdbuf();
    sb << fb.rdbuf();
    const bool same = !sa.str().empty() && sa.str() == sb.str();
    return {same, "two element-channel sweep runs with one seed: " +
                      std::to_string(sa.str().size()) + " bytes, byte-identical = " +
                      (same ? "yes" : "no")};
}

} // namespace

int main() {
    run(1, check_coverage_adjudication);
    run(2, check_first_round_identities);
    run(3, check_telescoping);
    run(4, check_range_extension);
    run(5, check_throughput_ordering);
    run(6, check_lifetime);
    run(7, check_data_per_flight_structure);
    run(8, check_validation_report);
    run(9, check_samplers);
    run(10, check_determinism);
    std::printf("%d of 10 criteria failed\n", failures);
    return failures;
}
