// Command line front end: grid sweeps, element-count optimization, and the
// closed-form-vs-simulation validation table, all emitted as CSV.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "uavris/analytics.hpp"
#include "uavris/energy.hpp"
#include "uavris/errors.hpp"
#include "uavris/mac_sim.hpp"
#include "uavris/scenario.hpp"
#include "uavris/sweep.hpp"

namespace {

using uavris::ValidationError;

uavris::scenario::ScenarioParams load_base(const std::string& scenario_path) {
    if (scenario_path.empty()) return uavris::scenario::baseline();
    return uavris::scenario::load_scenario(scenario_path);
}

std::vector<std::string> split_list(const std::string& csv) {
    std::vector<std::string> out;
    size_t start = 0;
    while (start <= csv.size()) {
        const size_t comma = csv.find(',', start);
        const std::string tok =
            csv.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
        if (!tok.empty()) out.push_back(tok);
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

template <typename Fn>
void with_output(const std::string& path, Fn&& fn) {
    if (path.empty()) {
        fn(std::cout);
        return;
    }
    std::ofstream os(path);
    if (!os) throw ValidationError("cannot open output file '" + path + "'");
    fn(os);
}

uavris::mac::ChannelModel parse_channel(const std::string& name) {
    if (name == "element") return uavris::mac::ChannelModel::element;
    if (name == "gamma") return uavris::mac::ChannelModel::gamma_equivalent;
    throw ValidationError("--mc-channel must be 'element' or 'gamma'");
}

uavris::analytics::MacForm parse_mac_form(const std::string& name) {
    if (name == "printed") return uavris::analytics::MacForm::as_printed;
    if (name == "arrangement") return uavris::analytics::MacForm::with_arrangement;
    throw ValidationError("--mac-form must be 'printed' or 'arrangement'");
}

uavris::analytics::Method parse_ps_method(const std::string& name) {
    if (name == "consistent") return uavris::analytics::Method::closed_form_consistent;
    if (name == "printed") return uavris::analytics::Method::closed_form_printed;
    if (name == "numeric") return uavris::analytics::Method::numeric_integration;
    throw ValidationError("--ps-method must be 'consistent', 'printed' or 'numeric'");
}

void check_format(const std::string& format) {
    if (format != "csv") throw ValidationError("--format only supports 'csv'");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Coverage, MAC and energy toolkit for a drone-carried reflective relay"};
    app.require_subcommand(1);

    // ---- sweep ----
    std::string sw_scenario, sw_preset, sw_metrics, sw_out, sw_format = "csv";
    std::string sw_channel = "element", sw_mac_form = "printed", sw_ps_method = "consistent";
    std::vector<std::string> sw_grid;
    std::uint64_t sw_trials = 0, sw_seed = 1;
    auto* sweep_cmd = app.add_subcommand("sweep", "evaluate metrics over a parameter grid");
    sweep_cmd->add_option("--scenario", sw_scenario, "scenario file (key = value lines)");
    sweep_cmd->add_option("--preset", sw_preset, "named sweep (see the presets command)");
    sweep_cmd->add_option("--grid", sw_grid,
                          "axis spec name=start:stop[:step] or name=v1,v2 (repeatable; "
                          "axes: n, d2, r, l, speed)");
    sweep_cmd->add_option("--metrics", sw_metrics,
                          "comma list of p_c,p_c_l,t_bar,p_suc,r_bar,l_t_hours,d_f_bits");
    sweep_cmd->add_option("--trials", sw_trials, "simulation trials per point (0 = analytic only)");
    sweep_cmd->add_option("--seed", sw_seed, "simulation seed");
    sweep_cmd->add_option("--mc-channel", sw_channel, "simulation channel: element or gamma");
    sweep_cmd->add_option("--mac-form", sw_mac_form, "analytic MAC form: printed or arrangement");
    sweep_cmd->add_option("--ps-method", sw_ps_method,
                          "round-success method: consistent, printed or numeric");
    sweep_cmd->add_option("--out", sw_out, "output file (default stdout)");
    sweep_cmd->add_option("--format", sw_format, "output format (csv)");

    // ---- optimize ----
    std::string op_scenario, op_metric = "d_f_bits", op_out;
    std::string op_mac_form = "printed", op_ps_method = "consistent";
    int op_n_min = 1, op_n_max = 2000, op_step = 1;
    auto* optimize_cmd =
        app.add_subcommand("optimize", "scan the element count for the best metric value");
    optimize_cmd->add_option("--scenario", op_scenario, "scenario file");
    optimize_cmd->add_option("--metric", op_metric, "metric to maximize (default d_f_bits)");
    optimize_cmd->add_option("--n-min", op_n_min, "smallest element count");
    optimize_cmd->add_option("--n-max", op_n_max, "largest element count");
    optimize_cmd->add_option("--step", op_step, "element count step");
    optimize_cmd->add_option("--mac-form", op_mac_form, "analytic MAC form: printed or arrangement");
    optimize_cmd->add_option("--ps-method", op_ps_method,
                             "round-success method: consistent, printed or numeric");
    optimize_cmd->add_option("--out", op_out, "write the scan trace as CSV");

    // ---- validate ----
    std::string va_scenario, va_out, va_n = "300,400,500", va_d2 = "200,250,300";
    std::uint64_t va_trials = 200000, va_seed = 1;
    auto* validate_cmd = app.add_subcommand(
        "validate", "compare closed forms against simulation on the matched channel");
    validate_cmd->add_option("--scenario", va_scenario, "scenario file");
    validate_cmd->add_option("--n", va_n, "comma list of element counts");
    validate_cmd->add_option("--d2", va_d2, "comma list of hop distances");
    validate_cmd->add_option("--trials", va_trials, "simulation trials per grid point");
    validate_cmd->add_option("--seed", va_seed, "simulation seed");
    validate_cmd->add_option("--out", va_out, "output file (default stdout)");

    // ---- presets ----
    auto* presets_cmd = app.add_subcommand("presets", "list the named sweeps");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sweep_cmd->parsed()) {
            check_format(sw_format);
            uavris::sweep::SweepRequest req;
            if (!sw_preset.empty()) {
                if (!sw_grid.empty() || !sw_metrics.empty())
                    throw ValidationError("--preset already fixes --grid and --metrics");
                req = uavris::sweep::make_preset_sweep(sw_preset, load_base(sw_scenario));
            } else {
                if (sw_grid.empty())
                    throw ValidationError("sweep needs --preset or at least one --grid axis");
                req.base = load_base(sw_scenario);
                for (const std::string& spec : sw_grid)
                    req.axes.push_back(uavris::sweep::parse_axis(spec));
                req.metrics = split_list(sw_metrics);
            }
            req.mc_trials = sw_trials;
            req.seed = sw_seed;
            req.mc_channel = parse_channel(sw_channel);
            req.mac_form = parse_mac_form(sw_mac_form);
            req.ps_method = parse_ps_method(sw_ps_method);
            const uavris::sweep::SweepResult result = uavris::sweep::run_sweep(req);
            with_output(sw_out, [&](std::ostream& os) { uavris::sweep::write_csv(os, result); });
        } else if (optimize_cmd->parsed()) {
            const uavris::sweep::OptimizeResult res = uavris::sweep::optimize_n(
                load_base(op_scenario), op_metric, op_n_min, op_n_max, op_step,
                parse_mac_form(op_mac_form), parse_ps_method(op_ps_method));
            if (!op_out.empty()) {
                with_output(op_out, [&](std::ostream& os) {
                    os << "n," << res.metric << ",error\n";
                    for (const auto& t : res.trace)
                        os << t.n << "," << uavris::sweep::fmt_g9(t.value) << ","
                           << (t.unflyable ? "unflyable" : "") << "\n";
                });
            }
            std::cout << "metric = " << res.metric << "\n"
                      << "best_n = " << res.best_n << "\n"
                      << "best_value = " << uavris::sweep::fmt_g9(res.best_value) << "\n";
            if (res.stopped_at_weight_limit)
                std::cout << "note = scan stopped at the takeoff weight limit\n";
        } else if (validate_cmd->parsed()) {
            std::vector<int> n_values;
            for (const std::string& tok : split_list(va_n)) n_values.push_back(std::stoi(tok));
            std::vector<double> d2_values;
            for (const std::string& tok : split_list(va_d2)) d2_values.push_back(std::stod(tok));
            const std::vector<uavris::sweep::ValidationRow> rows = uavris::sweep::validate_report(
                load_base(va_scenario), n_values, d2_values, va_trials, va_seed);
            with_output(va_out,
                        [&](std::ostream& os) { uavris::sweep::write_validation_csv(os, rows); });
        } else if (presets_cmd->parsed()) {
            for (const auto& info : uavris::sweep::sweep_presets())
                std::cout << info.name << ": " << info.summary << "\n";
        }
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
