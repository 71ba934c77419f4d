#pragma once

// Scenario definition: one flat record with every knob the analytic chain,
// the simulator and the energy model consume, plus a tiny text loader.
//
// Config files are flat "key = value" lines ('#' starts a comment).  Keys
// match the struct fields exactly.  A "preset = <name>" line loads a named
// baseline first; later keys override individual fields.  Unknown keys are
// rejected so a typo cannot silently fall back to a default.

#include <cctype>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <string_view>

#include "uavris/errors.hpp"

namespace uavris::scenario {

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

struct ScenarioParams {
    // geometry (m)
    double h = 50.0;  // hover height above the disk center
    double R = 20.0;  // sensor disk radius
    double d2 = 200.0; // hop distance to the access point
    double d0 = 1.0;   // path-loss reference distance

    // radio
    double gamma_t_db = 95.0;   // transmit SNR
    double gamma_thr_db = 0.0;  // decode threshold
    double C0_db = -60.0;       // path loss at d0
    double G_db = 0.0;          // combined antenna gain
    int N = 400;                // reflecting elements
    double bandwidth_hz = 125e3;
    double wavelength_m = 0.125;

    // element fading / phase error
    double m = 3.0;     // Nakagami shape
    double Omega = 1.0; // Nakagami spread
    double kappa = 1.0; // Von Mises concentration of the phase error

    // MAC
    int S_sensors = 10;       // contending sensors in the disk
    double rho_access = 0.1;  // per-round access probability
    int L_max = 3;            // chase-combining round budget

    // energy / airframe
    double U_w = 3.25;        // UAV frame weight, kg
    double B_w = 1.35;        // battery weight, kg
    double E_w = 0.00766;     // per-element weight, kg
    double B_c_wh = 180.0;    // battery capacity, Wh
    double T_max_kg = 17.0;   // max takeoff weight, kg
    double speed_kmh = 0.0;   // cruise speed
    double S_max_kmh = 62.0;  // max speed
    double air_density = 1.225;
    double v_air = 2.5;       // headwind speed, m/s
    double C_d = 0.005;       // drag coefficient of the board
    double g = 9.8;
    double P_txrx_w = 1.0;    // relay transceiver power, W
    double P_circ_w = 0.0;    // RIS control circuit power, W

    double gamma_t_lin() const { return db_to_linear(gamma_t_db); }
    double gamma_thr_lin() const { return db_to_linear(gamma_thr_db); }
    double C0_lin() const { return db_to_linear(C0_db); }
    double G_lin() const { return db_to_linear(G_db); }
    double speed_ms() const { return speed_kmh / 3.6; }
};

// The defaults above *are* the baseline preset; keep one authoritative copy.
inline ScenarioParams baseline() { return ScenarioParams{}; }

inline ScenarioParams make_preset(std::string_view name) {
    if (name == "baseline") return baseline();
    throw ValidationError("unknown preset '" + std::string(name) + "'");
}

// Weight budget (kg) of the loaded airframe at the configured speed.  Lives
// here because scenario validation and the energy model must agree on it.
struct WeightBudget {
    double ris_kg = 0.0;   // N * E_w
    double speed_kg = 0.0; // speed-dependent penalty
    double drag_kg = 0.0;  // wind drag on the board, expressed as weight
    double total_kg = 0.0; // U_w + B_w + ris + speed + drag
};

inline WeightBudget weight_budget(const ScenarioParams& p) {
    WeightBudget w;
    w.ris_kg = p.N * p.E_w;
    w.speed_kg = (p.T_max_kg - p.U_w - w.ris_kg) * p.speed_kmh / p.S_max_kmh;
    const double board_area_m2 = p.N * p.wavelength_m * p.wavelength_m / 100.0;
    w.drag_kg = p.air_density * p.v_air * p.v_air * p.C_d * board_area_m2 / (2.0 * p.g);
    w.total_kg = p.U_w + p.B_w + w.ris_kg + w.speed_kg + w.drag_kg;
    return w;
}

inline void validate(const ScenarioParams& p) {
    auto fail = [](const std::string& msg) { throw ValidationError(msg); };
    auto positive = [&](double v, const char* k) {
        if (!(v > 0.0)) fail(std::string(k) + " must be > 0");
    };
    auto non_negative = [&](double v, const char* k) {
        if (!(v >= 0.0)) fail(std::string(k) + " must be >= 0");
    };

    positive(p.h, "h");
    positive(p.R, "R");
    positive(p.d2, "d2");
    positive(p.d0, "d0");
    positive(p.bandwidth_hz, "bandwidth_hz");
    positive(p.wavelength_m, "wavelength_m");
    if (p.N < 1) fail("N must be >= 1");
    if (!(p.m >= 0.5)) fail("m must be >= 0.5");
    positive(p.Omega, "Omega");
    non_negative(p.kappa, "kappa");
    if (p.S_sensors < 1) fail("S_sensors must be >= 1");
    if (!(p.rho_access >= 0.0 && p.rho_access <= 1.0)) fail("rho_access must be in [0, 1]");
    if (p.L_max < 1) fail("L_max must be >= 1");
    non_negative(p.U_w, "U_w");
    non_negative(p.B_w, "B_w");
    non_negative(p.E_w, "E_w");
    positive(p.B_c_wh, "B_c_wh");
    positive(p.T_max_kg, "T_max_kg");
    non_negative(p.speed_kmh, "speed_kmh");
    positive(p.S_max_kmh, "S_max_kmh");
    if (p.speed_kmh > p.S_max_kmh) fail("speed_kmh must not exceed S_max_kmh");
    positive(p.air_density, "air_density");
    non_negative(p.v_air, "v_air");
    non_negative(p.C_d, "C_d");
    positive(p.g, "g");
    non_negative(p.P_txrx_w, "P_txrx_w");
    non_negative(p.P_circ_w, "P_circ_w");

    const WeightBudget w = weight_budget(p);
    if (!(w.total_kg < p.T_max_kg))
        throw UnflyableError("total weight " + std::to_string(w.total_kg) +
                             " kg reaches max takeoff weight " + std::to_string(p.T_max_kg) + " kg");
}

namespace detail {

inline std::string_view trim(std::string_view s) {
    size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

inline double parse_double(std::string_view key, std::string_view value) {
    try {
        size_t pos = 0;
        const std::string v(value);
        const double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing characters");
        return x;
    } catch (const std::exception&) {
        throw ValidationError("key '" + std::string(key) + "': cannot parse '" +
                              std::string(value) + "' as a number");
    }
}

inline int parse_int(std::string_view key, std::string_view value) {
    const double x = parse_double(key, value);
    const int i = static_cast<int>(std::lround(x));
    if (std::fabs(x - i) > 1e-9)
        throw ValidationError("key '" + std::string(key) + "' must be an integer, got '" +
                              std::string(value) + "'");
    return i;
}

using FieldSetter = std::function<void(ScenarioParams&, std::string_view, std::string_view)>;

inline const std::map<std::string, FieldSetter, std::less<>>& field_table() {
    static const std::map<std::string, FieldSetter, std::less<>> table = [] {
        std::map<std::string, FieldSetter, std::less<>> t;
        auto dbl = [&t](const char* key, double ScenarioParams::* member) {
            t[key] = [member](ScenarioParams& p, std::string_view k, std::string_view v) {
                p.*member = parse_double(k, v);
            };
        };
        auto integer = [&t](const char* key, int ScenarioParams::* member) {
            t[key] = [member](ScenarioParams& p, std::string_view k, std::string_view v) {
                p.*member = parse_int(k, v);
            };
        };
        dbl("h", &ScenarioParams::h);
        dbl("R", &ScenarioParams::R);
        dbl("d2", &ScenarioParams::d2);
        dbl("d0", &ScenarioParams::d0);
        dbl("gamma_t_db", &ScenarioParams::gamma_t_db);
        dbl("gamma_thr_db", &ScenarioParams::gamma_thr_db);
        dbl("C0_db", &ScenarioParams::C0_db);
        dbl("G_db", &ScenarioParams::G_db);
        integer("N", &ScenarioParams::N);
        dbl("bandwidth_hz", &ScenarioParams::bandwidth_hz);
        dbl("wavelength_m", &ScenarioParams::wavelength_m);
        dbl("m", &ScenarioParams::m);
        dbl("Omega", &ScenarioParams::Omega);
        dbl("kappa", &ScenarioParams::kappa);
        integer("S_sensors", &ScenarioParams::S_sensors);
        dbl("rho_access", &ScenarioParams::rho_access);
        integer("L_max", &ScenarioParams::L_max);
        dbl("U_w", &ScenarioParams::U_w);
        dbl("B_w", &ScenarioParams::B_w);
        dbl("E_w", &ScenarioParams::E_w);
        dbl("B_c_wh", &ScenarioParams::B_c_wh);
        dbl("T_max_kg", &ScenarioParams::T_max_kg);
        dbl("speed_kmh", &ScenarioParams::speed_kmh);
        dbl("S_max_kmh", &ScenarioParams::S_max_kmh);
        dbl("air_density", &ScenarioParams::air_density);
        dbl("v_air", &ScenarioParams::v_air);
        dbl("C_d", &ScenarioParams::C_d);
        dbl("g", &ScenarioParams::g);
        dbl("P_txrx_w", &ScenarioParams::P_txrx_w);
        dbl("P_circ_w", &ScenarioParams::P_circ_w);
        return t;
    }();
    return table;
}

} // namespace detail

// Parse scenario text.  Later lines override earlier ones; "preset" resets
// the whole record, so it normally comes first.
inline ScenarioParams parse_scenario(std::string_view text) {
    ScenarioParams p = baseline();
    std::istringstream in{std::string(text)};
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line = raw;
        if (const auto hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ValidationError("line " + std::to_string(line_no) +
                                  ": expected 'key = value', got '" + std::string(line) + "'");
        const auto key = detail::trim(line.substr(0, eq));
        const auto value = detail::trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ValidationError("line " + std::to_string(line_no) + ": empty key or value");
        if (key == "preset") {
            p = make_preset(value);
            continue;
        }
        const auto& table = detail::field_table();
        const auto it = table.find(key);
        if (it == table.end())
            throw ValidationError("line " + std::to_string(line_no) + ": unknown key '" +
                                  std::string(key) + "'");
        try {
            it->second(p, key, value);
        } catch (const ValidationError& e) {
            throw ValidationError("line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    validate(p);
    return p;
}

inline ScenarioParams load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open scenario file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str());
}

} // namespace uavris::scenario
