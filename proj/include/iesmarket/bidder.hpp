// Time-variant bid construction: backcast price scenarios, the two-stage
// stochastic bidding program, monotone bid-curve extraction, and
// post-clearing dispatch tracking.
#pragma once

#include <vector>

#include "iesmarket/ies.hpp"
#include "iesmarket/lp.hpp"
#include "iesmarket/price_taker.hpp"

namespace ies {

struct InsufficientHistory : Error {
    using Error::Error;
};

// Equally weighted price scenarios over a short lookahead window.
struct ScenarioSet {
    std::vector<std::vector<double>> prices;  // [scenario][window hour]

    int count() const { return static_cast<int>(prices.size()); }
    int window() const { return prices.empty() ? 0 : static_cast<int>(prices[0].size()); }
};

// Scenario i replays the prices observed at the same hours of day on the
// i-th preceding day. Throws InsufficientHistory when fewer than
// `n_scenarios` full days precede t0.
ScenarioSet backcast(const PriceSeries& history, int t0, int window_hr, int n_scenarios);

// Monotone price/quantity offer for one hour, anchored at (0 $/MWh, 0 MW).
// Prices strictly increase, cumulative power never decreases.
struct BidCurve {
    int hour = 0;
    std::vector<std::pair<double, double>> points;  // (price, cumulative MW)

    double max_power_mw() const { return points.empty() ? 0.0 : points.back().second; }
    // Cumulative power offered at or below the given price.
    double offered_at(double price_usd_per_mwh) const;
    void validate() const;
};

struct BidPlan {
    std::vector<std::vector<HourlyOperation>> ops;  // [scenario][window hour]
    std::vector<std::vector<double>> offered_mw;    // p^RT per scenario and hour
    double expected_revenue_usd = 0.0;
};

struct BiddingOptions {
    double dt_hr = 1.0;
    double terminal_soc_value_usd_per_mwh = 0.0;  // value of energy left at window end
};

// Expected-revenue maximization across the scenario set from a shared
// initial state, with offers forced monotone in the scenario price.
BidPlan solve_bidding(const IesState& state, const std::vector<double>& wind_window_cf,
                      const ScenarioSet& scenarios, const BatteryDesign& design,
                      const WindAsset& wind, const BiddingOptions& options = {});

// Breakpoints for one window hour: scenario (price, power) pairs sorted by
// price, equal prices merged by maximum power. Throws Error when the plan
// breaches monotonicity beyond tolerance (a solver bug, not a data error).
BidCurve to_bid_curve(const BidPlan& plan, const ScenarioSet& scenarios, int window_hour,
                      int hour_stamp);

struct TrackResult {
    HourlyOperation op;
    double shortfall_mw = 0.0;  // cleared power the device could not deliver
};

// Feasible operation meeting the cleared power: wind serves first, then
// battery discharge; surplus wind charges up to the envelope, rest curtails.
TrackResult track_dispatch(const IesState& state, double cleared_mw, double capacity_factor,
                           const BatteryDesign& design, const WindAsset& wind,
                           double dt_hr = 1.0);

}  // namespace ies
