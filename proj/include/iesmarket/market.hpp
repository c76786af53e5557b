// Miniature production cost model: DC network, day-ahead unit commitment,
// real-time economic dispatch with locational prices from duals, and the
// rolling-horizon loop coupling the market with the IES bidder.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "iesmarket/bidder.hpp"
#include "iesmarket/ies.hpp"
#include "iesmarket/lp.hpp"

namespace ies {

struct Bus {
    std::string id;
    std::string load_column;  // empty when the bus carries no load
};

struct Line {
    std::string id;
    int from_bus = 0, to_bus = 0;
    double susceptance_pu = 0.0;
    double limit_mw = 0.0;
};

struct CostSegment {
    double width_mw = 0.0;
    double price_usd_per_mwh = 0.0;
};

struct ThermalUnit {
    std::string id;
    int bus = 0;
    double pmin_mw = 0.0, pmax_mw = 0.0;
    double ramp_mw_per_hr = 0.0;
    int min_up_hr = 1, min_down_hr = 1;
    double startup_cost_usd = 0.0;
    double no_load_cost_usd_per_hr = 0.0;
    std::vector<CostSegment> segments;  // convex ladder spanning [0, pmax]
    bool init_on = false;
    int init_hours = 1;       // time already spent in the initial state
    double init_power_mw = 0.0;
};

struct RenewableUnit {
    std::string id;
    int bus = 0;
    double max_power_mw = 0.0;
    std::string cf_column;
};

struct NetworkCase {
    std::string name;
    double base_mva = 100.0;
    int reference_bus = 0;
    int ies_bus = 0;
    std::vector<Bus> buses;
    std::vector<Line> lines;
    std::vector<ThermalUnit> units;
    std::vector<RenewableUnit> renewables;
    int horizon_hours = 0;
    std::vector<std::vector<double>> bus_load_mw;   // [bus][hour], empty column = zeros
    std::vector<std::vector<double>> renewable_cf;  // [renewable][hour]
    std::vector<double> ies_wind_cf;                // IES wind profile

    double load_at(int bus, int hour) const {
        return bus_load_mw[bus].empty() ? 0.0 : bus_load_mw[bus][hour];
    }
    void validate() const;  // throws InputError naming the offending element
};

struct MarketSettings {
    double mip_gap = 0.01;
    double shed_penalty_usd_per_mwh = 10000.0;
    double price_cap_usd_per_mwh = 10000.0;
    int da_lookahead_hours = 12;
    bool ies_visible_in_da = false;
    long uc_node_budget = 20000;
    std::string dump_lp_dir;
};

struct UnitInitial {
    bool on = false;
    int hours = 1;
    double power_mw = 0.0;
};

// Day-ahead commitment for the 24 hours of one day.
struct Commitment {
    int day = 0;
    lp::Status status = lp::Status::Infeasible;
    double mip_gap = 0.0;
    long nodes = 0;
    long iterations = 0;
    std::vector<std::vector<uint8_t>> on;        // [unit][hour 0..23]
    std::vector<std::vector<uint8_t>> startup;   // derived from status changes
    std::vector<std::vector<uint8_t>> shutdown;
};

struct MarketOutcome {
    int hour = 0;
    std::vector<double> lmp_usd_per_mwh;  // per bus, duals of the balance rows
    std::vector<double> unit_mw;          // per thermal unit
    std::vector<double> renewable_mw;     // per renewable unit
    std::vector<double> flow_mw;          // per line
    std::vector<double> shed_mw;          // per bus
    double ies_cleared_mw = 0.0;
    double dispatch_cost_usd = 0.0;
};

struct MarketLog {
    std::vector<MarketOutcome> outcomes;
    std::vector<HourlyOperation> ies_ops;
    std::vector<IesState> ies_states;       // state after each hour
    std::vector<double> settlement_usd;     // lmp at the IES bus x cleared x dt
    std::vector<double> shortfall_mw;
    std::vector<std::vector<uint8_t>> committed;  // [unit][simulated hour]
    std::vector<BidCurve> bid_curves;             // audit trail, one per hour
    std::vector<std::string> notes;
    int first_hour = 0;
    int ies_bus = 0;

    int span_hours() const { return static_cast<int>(outcomes.size()); }
    double total_settlement_usd() const;
    PriceSeries ies_bus_prices() const;
};

enum class SimMode { TiZeroCost, TvBidding, WindOnlyTi, WindOnlyTv };

SimMode parse_sim_mode(const std::string& name);
std::string sim_mode_name(SimMode mode);

// Cost-minimizing commitment for `day` (24 hours plus lookahead), honoring
// minimum up/down times, ramps, startup costs, and DC flow limits. Load
// shedding at the penalty price keeps the problem feasible.
Commitment day_ahead_uc(const NetworkCase& net, int day,
                        const std::vector<double>& ies_offer_mw,
                        const std::vector<UnitInitial>& initial,
                        const MarketSettings& settings);

// Single-hour dispatch with the commitment fixed. The IES participates
// through its bid curve; pass nullptr for a no-IES counterfactual.
MarketOutcome real_time_dispatch(const NetworkCase& net, int hour,
                                 const std::vector<uint8_t>& on_units,
                                 const BidCurve* ies_bid, const MarketSettings& settings);

struct SimOptions {
    MarketSettings market;
    BiddingOptions bidding;
    int scenario_count = 10;
    int bid_window_hr = 4;
    double fallback_price_usd_per_mwh = 20.0;
    int start_hour = 0;
};

// Rolling double loop: commit each day, then bid/clear/track each hour.
MarketLog run_simulation(const NetworkCase& net, const WindAsset& wind,
                         const BatteryDesign& design, SimMode mode, int span_hours,
                         const SimOptions& options = {});

}  // namespace ies
