// Device model implementation.
#include "iesmarket/ies.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ies {

void WindAsset::validate(int horizon_hours) const {
    if (!(max_power_mw > 0.0)) throw InputError("wind asset: max power must be positive");
    if (horizon_hours >= 0 && static_cast<int>(capacity_factors.size()) != horizon_hours)
        throw InputError("wind asset: capacity factor series length mismatch");
    for (double f : capacity_factors)
        if (!(f >= 0.0 && f <= 1.0)) throw InputError("wind asset: capacity factor outside [0,1]");
}

void BatteryDesign::validate() const {
    if (max_power_mw < 0.0 || duration_hr < 0.0)
        throw InputError("battery design: negative size");
    if (!(charge_eff > 0.0 && charge_eff <= 1.0) || !(discharge_eff > 0.0 && discharge_eff <= 1.0))
        throw InputError("battery design: efficiency outside (0,1]");
    if (degradation_coeff < 0.0) throw InputError("battery design: negative degradation");
}

HourlyOperation HourlyOperation::from_flows(double wind_used_mw, double charge_mw,
                                            double discharge_mw) {
    HourlyOperation op;
    op.wind_used_mw = wind_used_mw;
    op.charge_mw = charge_mw;
    op.discharge_mw = discharge_mw;
    op.direct_sale_mw = wind_used_mw - charge_mw;
    op.total_sale_mw = op.direct_sale_mw + discharge_mw;
    return op;
}

double degraded_capacity(const BatteryDesign& design, double throughput_mwh) {
    return design.max_soc_mwh() - design.degradation_coeff * throughput_mwh;
}

double om_cost(const WindAsset& wind, const BatteryDesign& design) {
    double kusd = wind.om_cost_kusd_per_mw_yr * wind.max_power_mw +
                  design.om_cost_kusd_per_mwh_yr * design.max_soc_mwh();
    return kusd * 1e3;
}

std::optional<Violation> check_operation(const IesState& state, const HourlyOperation& op,
                                         const BatteryDesign& design, double wind_avail_mw,
                                         double dt_hr) {
    auto bad = [](std::string what, double residual) {
        return Violation{std::move(what), -1, residual};
    };
    if (op.wind_used_mw < -kPowerTolMw || op.charge_mw < -kPowerTolMw ||
        op.discharge_mw < -kPowerTolMw || op.direct_sale_mw < -kPowerTolMw ||
        op.total_sale_mw < -kPowerTolMw)
        return bad("flow nonnegativity",
                   std::min({op.wind_used_mw, op.charge_mw, op.discharge_mw,
                             op.direct_sale_mw, op.total_sale_mw}));
    double split = op.wind_used_mw - op.charge_mw - op.direct_sale_mw;
    if (std::fabs(split) > kPowerTolMw) return bad("wind split identity", split);
    double mix = op.total_sale_mw - op.discharge_mw - op.direct_sale_mw;
    if (std::fabs(mix) > kPowerTolMw) return bad("total sale identity", mix);
    if (op.charge_mw > design.max_power_mw + kPowerTolMw)
        return bad("charge power limit", op.charge_mw - design.max_power_mw);
    if (op.discharge_mw > design.max_power_mw + kPowerTolMw)
        return bad("discharge power limit", op.discharge_mw - design.max_power_mw);
    if (op.wind_used_mw > wind_avail_mw + kPowerTolMw)
        return bad("wind availability", op.wind_used_mw - wind_avail_mw);

    double soc_next = state.soc_mwh +
                      (design.charge_eff * op.charge_mw - op.discharge_mw / design.discharge_eff) * dt_hr;
    double thr_next = state.throughput_mwh + 0.5 * (op.charge_mw + op.discharge_mw) * dt_hr;
    if (soc_next < -kFeasTolMwh) return bad("soc lower bound", soc_next);
    double cap = degraded_capacity(design, thr_next);
    if (soc_next > cap + kFeasTolMwh) return bad("soc upper bound", soc_next - cap);
    return std::nullopt;
}

IesState soc_step(const IesState& state, const HourlyOperation& op,
                  const BatteryDesign& design, double dt_hr) {
    // Wind availability is not known here; validate_trajectory checks it.
    auto v = check_operation(state, op, design,
                             std::numeric_limits<double>::infinity(), dt_hr);
    if (v) throw InfeasibleTransition("soc_step: " + v->constraint +
                                      " violated (residual " + std::to_string(v->residual) + ")");
    IesState next;
    next.soc_mwh = state.soc_mwh +
                   (design.charge_eff * op.charge_mw - op.discharge_mw / design.discharge_eff) * dt_hr;
    next.throughput_mwh = state.throughput_mwh + 0.5 * (op.charge_mw + op.discharge_mw) * dt_hr;
    return next;
}

OperationEnvelope feasible_envelope(const IesState& state, double capacity_factor,
                                    const WindAsset& wind, const BatteryDesign& design,
                                    double dt_hr) {
    OperationEnvelope env;
    env.max_wind_mw = capacity_factor * wind.max_power_mw;
    env.max_discharge_mw =
        std::max(0.0, std::min(design.max_power_mw,
                               state.soc_mwh * design.discharge_eff / dt_hr));
    // Charging headroom accounts for the capacity the charge itself wears away.
    double headroom =
        degraded_capacity(design, state.throughput_mwh) - state.soc_mwh;
    double wear_rate = design.charge_eff + 0.5 * design.degradation_coeff;
    double charge_cap = headroom > 0.0 ? headroom / (wear_rate * dt_hr) : 0.0;
    env.max_charge_mw =
        std::max(0.0, std::min({design.max_power_mw, env.max_wind_mw, charge_cap}));
    env.max_total_sale_mw = env.max_wind_mw + env.max_discharge_mw;
    return env;
}

TrajectoryReport validate_trajectory(const std::vector<HourlyOperation>& ops,
                                     const IesState& initial, const BatteryDesign& design,
                                     const WindAsset& wind, bool periodic, double dt_hr) {
    TrajectoryReport report;
    if (ops.size() > wind.capacity_factors.size())
        throw InputError("validate_trajectory: schedule longer than capacity factor series");
    report.states.reserve(ops.size());
    IesState state = initial;
    for (size_t t = 0; t < ops.size(); ++t) {
        const HourlyOperation& op = ops[t];
        auto v = check_operation(state, op, design, wind.available_mw(static_cast<int>(t)), dt_hr);
        if (v) {
            v->hour = static_cast<int>(t);
            report.ok = false;
            report.violation = v;
            report.final_state = state;
            return report;
        }
        if (op.charge_mw > kPowerTolMw && op.discharge_mw > kPowerTolMw)
            report.warnings.push_back("simultaneous charge/discharge at hour " + std::to_string(t));
        state.soc_mwh += (design.charge_eff * op.charge_mw -
                          op.discharge_mw / design.discharge_eff) * dt_hr;
        state.throughput_mwh += 0.5 * (op.charge_mw + op.discharge_mw) * dt_hr;
        report.states.push_back(state);
    }
    report.final_state = state;
    if (periodic && std::fabs(state.soc_mwh - initial.soc_mwh) > kFeasTolMwh) {
        report.ok = false;
        report.violation = Violation{"periodic soc", static_cast<int>(ops.size()) - 1,
                                     state.soc_mwh - initial.soc_mwh};
    }
    return report;
}

EnergyBalance energy_balance(const std::vector<HourlyOperation>& ops, const WindAsset& wind,
                             const BatteryDesign& design, double dt_hr, int first_hour) {
    EnergyBalance eb;
    for (size_t t = 0; t < ops.size(); ++t) {
        const HourlyOperation& op = ops[t];
        double avail = wind.available_mw(first_hour + static_cast<int>(t));
        eb.available_mwh += avail * dt_hr;
        eb.sold_mwh += op.total_sale_mw * dt_hr;
        eb.curtailed_mwh += (avail - op.wind_used_mw) * dt_hr;
        eb.charge_loss_mwh += (1.0 - design.charge_eff) * op.charge_mw * dt_hr;
        eb.discharge_loss_mwh +=
            op.discharge_mw * (1.0 - design.discharge_eff) / design.discharge_eff * dt_hr;
    }
    return eb;
}

}  // namespace ies
