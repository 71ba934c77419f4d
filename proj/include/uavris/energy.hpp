#pragma once

// Rotor-craft energy model: payload-dependent thrust power, hover/cruise
// lifetime on the configured battery, and data delivered per flight.

#include <cmath>
#include <string>

#include "uavris/errors.hpp"
#include "uavris/scenario.hpp"

namespace uavris::energy {

struct EnergyBreakdown {
    scenario::WeightBudget weight;  // kg components and total
    double thrust_power_w = 0.0;    // rotor power at the loaded weight
    double total_power_w = 0.0;     // thrust + transceiver + control circuits
    double lifetime_hours = 0.0;    // battery capacity / total power
};

// Empirical thrust-power fit, watts as a function of lifted weight in kg.
// Only meaningful above its positive root (~0.243 kg), well below any real
// airframe here.
inline double thrust_power_w(double weight_kg) {
    return 4.0 * weight_kg * weight_kg + 86.0 * weight_kg - 21.2;
}

inline EnergyBreakdown energy_breakdown(const scenario::ScenarioParams& p) {
    EnergyBreakdown e;
    e.weight = scenario::weight_budget(p);
    if (!(e.weight.total_kg < p.T_max_kg))
        throw UnflyableError("total weight " + std::to_string(e.weight.total_kg) +
                             " kg reaches max takeoff weight " + std::to_string(p.T_max_kg) + " kg");
    if (e.weight.speed_kg < 0.0)
        throw UnflyableError("RIS weight leaves no margin for the configured speed");
    e.thrust_power_w = thrust_power_w(e.weight.total_kg);
    if (!(e.thrust_power_w > 0.0))
        throw UnflyableError("weight below the thrust model's validity range");
    e.total_power_w = e.thrust_power_w + p.P_txrx_w + p.P_circ_w;
    e.lifetime_hours = p.B_c_wh / e.total_power_w;
    return e;
}

// Largest element count that keeps the airframe below max takeoff weight at
// zero speed (drag included); anything above is unflyable for any speed.
inline int max_flyable_elements(const scenario::ScenarioParams& p) {
    if (!(p.E_w > 0.0)) return 1 << 24;
    const double drag_per_element =
        p.air_density * p.v_air * p.v_air * p.C_d * p.wavelength_m * p.wavelength_m /
        (100.0 * 2.0 * p.g);
    const double margin = p.T_max_kg - p.U_w - p.B_w;
    return static_cast<int>(std::ceil(margin / (p.E_w + drag_per_element))) - 1;
}

// Bits delivered over one battery charge at the given average throughput.
inline double data_per_flight_bits(const scenario::ScenarioParams& p, double r_bar_bps) {
    const EnergyBreakdown e = energy_breakdown(p);
    return r_bar_bps * e.lifetime_hours * 3600.0;
}

} // namespace uavris::energy
