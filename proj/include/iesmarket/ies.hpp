// Wind-battery integrated energy system device model: feasibility,
// state-of-charge dynamics, throughput degradation, and cost accounting.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "iesmarket/common.hpp"

namespace ies {

struct WindAsset {
    double max_power_mw = 0.0;
    std::vector<double> capacity_factors;   // one per hour, in [0, 1]
    double om_cost_kusd_per_mw_yr = 42.0;

    double available_mw(int t) const { return capacity_factors[t] * max_power_mw; }
    void validate(int horizon_hours = -1) const;
};

struct BatteryDesign {
    double max_power_mw = 0.0;               // charge and discharge limit
    double duration_hr = 0.0;                // storage hours at max power
    double charge_eff = 0.95;
    double discharge_eff = 0.95;
    double degradation_coeff = 1e-4;         // capacity lost per MWh of throughput
    double om_cost_kusd_per_mwh_yr = 25.0;
    double capex_kusd_per_kw = 1.5;

    // Maximum state of charge is exactly duration times power.
    double max_soc_mwh() const { return duration_hr * max_power_mw; }
    bool is_zero() const { return max_power_mw <= 0.0 || duration_hr <= 0.0; }
    void validate() const;
};

struct IesState {
    double soc_mwh = 0.0;
    double throughput_mwh = 0.0;
};

// The five power flows of one operating hour. Identities:
//   wind_used = charge + direct_sale,  total_sale = discharge + direct_sale.
struct HourlyOperation {
    double wind_used_mw = 0.0;
    double charge_mw = 0.0;
    double discharge_mw = 0.0;
    double direct_sale_mw = 0.0;
    double total_sale_mw = 0.0;

    static HourlyOperation from_flows(double wind_used_mw, double charge_mw,
                                      double discharge_mw);
};

struct Violation {
    std::string constraint;
    int hour = -1;
    double residual = 0.0;
};

struct OperationEnvelope {
    double max_wind_mw = 0.0;        // available wind this hour
    double max_charge_mw = 0.0;      // safe even with zero concurrent discharge
    double max_discharge_mw = 0.0;   // limited by power rating and stored energy
    double max_total_sale_mw = 0.0;  // wind plus max discharge
};

struct TrajectoryReport {
    bool ok = true;
    std::optional<Violation> violation;        // first constraint breach
    std::vector<std::string> warnings;         // e.g. simultaneous charge/discharge
    IesState final_state;
    std::vector<IesState> states;              // state after each hour
};

// Remaining usable capacity after a cumulative throughput, MWh. May go
// negative for absurd throughput; callers validate.
double degraded_capacity(const BatteryDesign& design, double throughput_mwh);

// Fixed O&M of the combined system, $/yr.
double om_cost(const WindAsset& wind, const BatteryDesign& design);

// Advance the battery state by one operating hour. Throws
// InfeasibleTransition when the schedule is invalid; never clamps.
IesState soc_step(const IesState& state, const HourlyOperation& op,
                  const BatteryDesign& design, double dt_hr = 1.0);

// Checks an operation against the device limits without applying it.
// Returns the first violated constraint, if any.
std::optional<Violation> check_operation(const IesState& state, const HourlyOperation& op,
                                         const BatteryDesign& design, double wind_avail_mw,
                                         double dt_hr = 1.0);

// Box of operations guaranteed feasible from the given state: any
// (charge, discharge) inside it passes soc_step.
OperationEnvelope feasible_envelope(const IesState& state, double capacity_factor,
                                    const WindAsset& wind, const BatteryDesign& design,
                                    double dt_hr = 1.0);

// Replay a full schedule hour by hour, reporting the first violation or,
// with the periodic flag, checking that the state of charge returns to its
// starting value.
TrajectoryReport validate_trajectory(const std::vector<HourlyOperation>& ops,
                                     const IesState& initial, const BatteryDesign& design,
                                     const WindAsset& wind, bool periodic,
                                     double dt_hr = 1.0);

// Aggregate energy accounting over a schedule, MWh. Holds the identity
// available = sold + curtailed + charge_loss + discharge_loss + soc gain.
struct EnergyBalance {
    double available_mwh = 0.0;
    double sold_mwh = 0.0;
    double curtailed_mwh = 0.0;
    double charge_loss_mwh = 0.0;
    double discharge_loss_mwh = 0.0;
};
EnergyBalance energy_balance(const std::vector<HourlyOperation>& ops, const WindAsset& wind,
                             const BatteryDesign& design, double dt_hr = 1.0,
                             int first_hour = 0);

}  // namespace ies
