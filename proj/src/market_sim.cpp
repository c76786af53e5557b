// Rolling-horizon co-simulation: commit each day, then bid, clear, and
// track the IES dispatch hour by hour.
#include <algorithm>
#include <cmath>

#include "iesmarket/market.hpp"

namespace ies {

namespace {

// Backcast with graceful startup: while history is shorter than the
// scenario count, missing days recycle the observed ones so the diurnal
// shape survives; with no history at all a flat price stands in.
ScenarioSet backcast_or_flat(const PriceSeries& realized, int t0, int window, int n,
                             double flat_price, bool* padded) {
    ScenarioSet set;
    int avail = std::min(n, t0 / 24);
    if (avail > 0) set = backcast(realized, t0, window, avail);
    *padded = avail < n;
    for (int i = avail; i < n; ++i) {
        if (avail > 0) set.prices.push_back(set.prices[i % avail]);
        else set.prices.emplace_back(window, flat_price);
    }
    return set;
}

std::vector<UnitInitial> case_initials(const NetworkCase& net) {
    std::vector<UnitInitial> init;
    init.reserve(net.units.size());
    for (const auto& u : net.units)
        init.push_back({u.init_on, u.init_hours, u.init_on ? u.init_power_mw : 0.0});
    return init;
}

}  // namespace

MarketLog run_simulation(const NetworkCase& net, const WindAsset& wind,
                         const BatteryDesign& design, SimMode mode, int span_hours,
                         const SimOptions& options) {
    net.validate();
    wind.validate();
    design.validate();
    const bool wind_only = mode == SimMode::WindOnlyTi || mode == SimMode::WindOnlyTv;
    if (wind_only && !design.is_zero())
        throw InputError("run_simulation: wind-only modes require a zero battery");
    const bool time_variant = mode == SimMode::TvBidding || mode == SimMode::WindOnlyTv;
    if (options.start_hour % 24 != 0)
        throw InputError("run_simulation: start hour must align with a day boundary");
    const int start = options.start_hour;
    if (span_hours < 0 || start + span_hours > net.horizon_hours)
        throw InputError("run_simulation: span exceeds the case horizon");
    if (static_cast<int>(wind.capacity_factors.size()) < net.horizon_hours)
        throw InputError("run_simulation: wind series shorter than the case horizon");

    MarketLog log;
    log.first_hour = start;
    log.ies_bus = net.ies_bus;
    log.committed.assign(net.units.size(), {});
    if (span_hours == 0) return log;

    MarketLog partial;  // filled on failure for diagnostics
    std::vector<UnitInitial> init = case_initials(net);
    IesState state;
    PriceSeries realized;  // LMP history at the IES bus, indexed from `start`
    bool padded_note = false;

    const int end = start + span_hours;
    for (int day_start = start; day_start < end; day_start += 24) {
        const int day = day_start / 24;
        // Forecast offer for the commitment problem: wind only, no battery.
        const int uc_hours =
            std::min(24 + options.market.da_lookahead_hours, net.horizon_hours - day_start);
        std::vector<double> forecast(uc_hours, 0.0);
        for (int h = 0; h < uc_hours; ++h)
            forecast[h] = wind.available_mw(day_start + h);
        Commitment com;
        try {
            com = day_ahead_uc(net, day, forecast, init, options.market);
        } catch (const Error& e) {
            log.notes.push_back(std::string("aborted in day-ahead commitment: ") + e.what());
            return log;
        }
        if (com.status == lp::Status::GapLimit)
            log.notes.push_back("day " + std::to_string(day) +
                                ": commitment stopped at gap " + std::to_string(com.mip_gap));

        const int day_hours = std::min(24, end - day_start);
        for (int k = 0; k < day_hours; ++k) {
            const int hour = day_start + k;
            const double cf = wind.capacity_factors[hour];

            BidCurve curve;
            curve.hour = hour;
            if (time_variant) {
                const int window = std::min(options.bid_window_hr, net.horizon_hours - hour);
                std::vector<double> wind_window(window);
                for (int j = 0; j < window; ++j)
                    wind_window[j] = wind.capacity_factors[hour + j];
                bool padded = false;
                ScenarioSet scen =
                    backcast_or_flat(realized, hour - start, window, options.scenario_count,
                                     options.fallback_price_usd_per_mwh, &padded);
                if (padded && !padded_note) {
                    log.notes.push_back(
                        "backcast scenarios padded until " +
                        std::to_string(options.scenario_count) +
                        " days of price history accumulate");
                    padded_note = true;
                }
                BidPlan plan;
                try {
                    plan = solve_bidding(state, wind_window, scen, design, wind,
                                         options.bidding);
                } catch (const Error& e) {
                    log.notes.push_back(std::string("aborted in bidding: ") + e.what());
                    return log;
                }
                curve = to_bid_curve(plan, scen, 0, hour);
            } else {
                auto env = feasible_envelope(state, cf, wind, design);
                curve.points = {{0.0, env.max_total_sale_mw}};
            }

            std::vector<uint8_t> on_now(net.units.size());
            for (size_t g = 0; g < net.units.size(); ++g) on_now[g] = com.on[g][k];
            MarketOutcome out;
            try {
                out = real_time_dispatch(net, hour, on_now, &curve, options.market);
            } catch (const Error& e) {
                log.notes.push_back(std::string("aborted in dispatch: ") + e.what());
                return log;
            }

            TrackResult track =
                track_dispatch(state, out.ies_cleared_mw, cf, design, wind);
            state = soc_step(state, track.op, design);

            double lmp = out.lmp_usd_per_mwh[net.ies_bus];
            log.settlement_usd.push_back(lmp * out.ies_cleared_mw * 1.0);
            log.shortfall_mw.push_back(track.shortfall_mw);
            log.ies_ops.push_back(track.op);
            log.ies_states.push_back(state);
            realized.usd_per_mwh.push_back(lmp);
            for (size_t g = 0; g < net.units.size(); ++g)
                log.committed[g].push_back(com.on[g][k]);
            log.bid_curves.push_back(std::move(curve));
            log.outcomes.push_back(std::move(out));
        }

        // Terminal conditions feed the next day's commitment.
        const int committed_hours = std::min(24, net.horizon_hours - day_start);
        if (day_hours == committed_hours) {
            for (size_t g = 0; g < net.units.size(); ++g) {
                int last = committed_hours - 1;
                bool on = com.on[g][last];
                int run = 0;
                for (int h = last; h >= 0 && (com.on[g][h] != 0) == on; --h) ++run;
                if (run == committed_hours && (init[g].on == on)) run += init[g].hours;
                double power = on ? log.outcomes.back().unit_mw[g] : 0.0;
                init[g] = {on, run, power};
            }
        }
    }
    return log;
}

}  // namespace ies
