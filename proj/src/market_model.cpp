// Network case validation, day-ahead unit commitment, and real-time
// economic dispatch with locational prices from the balance duals.
#include <algorithm>
#include <cmath>
#include <numeric>

#include "iesmarket/market.hpp"

namespace ies {

namespace {

void require(bool ok, const std::string& what) {
    if (!ok) throw InputError(what);
}

}  // namespace

void NetworkCase::validate() const {
    require(!buses.empty(), "case: no buses");
    require(reference_bus >= 0 && reference_bus < static_cast<int>(buses.size()),
            "case: reference bus out of range");
    require(ies_bus >= 0 && ies_bus < static_cast<int>(buses.size()),
            "case: ies bus out of range");
    require(horizon_hours > 0, "case: empty horizon");
    for (const auto& l : lines) {
        require(l.from_bus >= 0 && l.from_bus < static_cast<int>(buses.size()) &&
                    l.to_bus >= 0 && l.to_bus < static_cast<int>(buses.size()),
                "line " + l.id + ": endpoint out of range");
        require(l.from_bus != l.to_bus, "line " + l.id + ": self loop");
        require(l.susceptance_pu > 0.0, "line " + l.id + ": susceptance must be positive");
        require(l.limit_mw > 0.0, "line " + l.id + ": flow limit must be positive");
    }
    // Connectivity over the undirected line graph.
    std::vector<int> seen(buses.size(), 0);
    std::vector<int> stack{reference_bus};
    seen[reference_bus] = 1;
    while (!stack.empty()) {
        int b = stack.back();
        stack.pop_back();
        for (const auto& l : lines) {
            int other = -1;
            if (l.from_bus == b) other = l.to_bus;
            else if (l.to_bus == b) other = l.from_bus;
            if (other >= 0 && !seen[other]) {
                seen[other] = 1;
                stack.push_back(other);
            }
        }
    }
    for (size_t b = 0; b < buses.size(); ++b)
        require(seen[b] == 1, "case: bus " + buses[b].id + " is disconnected");

    for (const auto& u : units) {
        require(u.bus >= 0 && u.bus < static_cast<int>(buses.size()),
                "unit " + u.id + ": bus out of range");
        require(u.pmax_mw > 0.0 && u.pmin_mw >= 0.0 && u.pmin_mw <= u.pmax_mw,
                "unit " + u.id + ": bad power range");
        require(u.min_up_hr >= 1 && u.min_down_hr >= 1,
                "unit " + u.id + ": up/down times must be at least one hour");
        require(!u.segments.empty(), "unit " + u.id + ": no cost segments");
        double width = 0.0, last_price = -lp::kInf;
        for (const auto& s : u.segments) {
            require(s.width_mw > 0.0, "unit " + u.id + ": empty cost segment");
            require(s.price_usd_per_mwh >= last_price,
                    "unit " + u.id + ": cost curve is not convex");
            last_price = s.price_usd_per_mwh;
            width += s.width_mw;
        }
        require(width >= u.pmax_mw - 1e-6, "unit " + u.id + ": segments do not cover pmax");
    }
    require(static_cast<int>(bus_load_mw.size()) == static_cast<int>(buses.size()),
            "case: load table size mismatch");
    for (size_t b = 0; b < buses.size(); ++b)
        require(bus_load_mw[b].empty() ||
                    static_cast<int>(bus_load_mw[b].size()) == horizon_hours,
                "case: load series length mismatch at bus " + buses[b].id);
    require(static_cast<int>(renewable_cf.size()) == static_cast<int>(renewables.size()),
            "case: capacity factor table size mismatch");
    for (size_t r = 0; r < renewables.size(); ++r) {
        require(static_cast<int>(renewable_cf[r].size()) == horizon_hours,
                "case: capacity factor series length mismatch for " + renewables[r].id);
        for (double f : renewable_cf[r])
            require(f >= 0.0 && f <= 1.0, "case: capacity factor outside [0,1]");
    }
    require(static_cast<int>(ies_wind_cf.size()) == horizon_hours,
            "case: ies wind series length mismatch");
}

SimMode parse_sim_mode(const std::string& name) {
    if (name == "ti" || name == "ti_zero_cost") return SimMode::TiZeroCost;
    if (name == "tv" || name == "tv_bidding" || name == "mo") return SimMode::TvBidding;
    if (name == "wind-only-ti" || name == "wind_only_ti") return SimMode::WindOnlyTi;
    if (name == "wind-only-tv" || name == "wind_only_tv") return SimMode::WindOnlyTv;
    throw InputError("unknown simulation mode: " + name);
}

std::string sim_mode_name(SimMode mode) {
    switch (mode) {
        case SimMode::TiZeroCost: return "ti_zero_cost";
        case SimMode::TvBidding: return "tv_bidding";
        case SimMode::WindOnlyTi: return "wind_only_ti";
        case SimMode::WindOnlyTv: return "wind_only_tv";
    }
    return "?";
}

double MarketLog::total_settlement_usd() const {
    double s = 0.0;
    for (double x : settlement_usd) s += x;
    return s;
}

PriceSeries MarketLog::ies_bus_prices() const {
    PriceSeries p;
    p.bus = "ies";
    p.usd_per_mwh.reserve(outcomes.size());
    for (const auto& o : outcomes) p.usd_per_mwh.push_back(o.lmp_usd_per_mwh[ies_bus]);
    return p;
}

namespace {

// Shared network block: per-hour dispatch variables and the balance rows.
// Returns the index of each bus balance row so duals can be read back.
struct HourBlock {
    std::vector<int> unit_p;        // thermal dispatch vars
    std::vector<int> renew;         // renewable dispatch vars
    std::vector<int> flow;          // line flow vars
    std::vector<int> shed;          // per bus
    std::vector<int> balance_row;   // per bus
    std::vector<int> ies_seg;       // IES offer segments
};

// Adds dispatch-side variables and rows for a single hour. `on_value`
// supplies the commitment status: a fixed 0/1 for dispatch problems or a
// variable index (>= 0) for commitment problems via `unit_u`.
HourBlock add_hour_block(lp::LinearModel& m, const NetworkCase& net, int hour,
                         const std::vector<int>* unit_u,
                         const std::vector<uint8_t>* on_fixed, const BidCurve* ies_bid,
                         double ies_da_offer_mw, const MarketSettings& settings) {
    const int nb = static_cast<int>(net.buses.size());
    HourBlock blk;
    blk.shed.resize(nb);
    blk.balance_row.resize(nb);
    std::vector<std::vector<std::pair<int, double>>> balance(nb);

    // Thermal units.
    for (size_t g = 0; g < net.units.size(); ++g) {
        const ThermalUnit& un = net.units[g];
        bool single = un.segments.size() == 1;
        bool committed_out = on_fixed && !(*on_fixed)[g];
        if (committed_out) {
            blk.unit_p.push_back(-1);
            continue;
        }
        double lo = on_fixed ? un.pmin_mw : 0.0;
        double hi = on_fixed ? un.pmax_mw : lp::kInf;
        int p = m.add_variable("p_" + un.id, lo, hi,
                               single ? un.segments[0].price_usd_per_mwh : 0.0);
        blk.unit_p.push_back(p);
        balance[un.bus].emplace_back(p, 1.0);
        if (!single) {
            std::vector<std::pair<int, double>> tie{{p, 1.0}};
            for (size_t k = 0; k < un.segments.size(); ++k) {
                int s = m.add_variable("ps_" + un.id, 0.0, un.segments[k].width_mw,
                                       un.segments[k].price_usd_per_mwh);
                tie.emplace_back(s, -1.0);
            }
            m.add_row(lp::Sense::Equal, 0.0, std::move(tie));
        }
        if (unit_u) {
            int u = (*unit_u)[g];
            m.add_row(lp::Sense::LessEqual, 0.0, {{p, 1.0}, {u, -un.pmax_mw}});
            m.add_row(lp::Sense::GreaterEqual, 0.0, {{p, 1.0}, {u, -un.pmin_mw}});
        }
    }

    // Renewables bid zero marginal cost; curtailment is free.
    for (size_t r = 0; r < net.renewables.size(); ++r) {
        const RenewableUnit& ru = net.renewables[r];
        double avail = net.renewable_cf[r][hour] * ru.max_power_mw;
        int v = m.add_variable("r_" + ru.id, 0.0, avail, 0.0);
        blk.renew.push_back(v);
        balance[ru.bus].emplace_back(v, 1.0);
    }

    // IES participation: either a forecast block (day-ahead) or a bid curve.
    if (ies_bid) {
        double prev = 0.0;
        for (const auto& [price, cum] : ies_bid->points) {
            double width = cum - prev;
            prev = cum;
            if (width <= kPowerTolMw) continue;
            int s = m.add_variable("ies_seg", 0.0, width, price);
            blk.ies_seg.push_back(s);
            balance[net.ies_bus].emplace_back(s, 1.0);
        }
    } else if (ies_da_offer_mw > 0.0) {
        int s = m.add_variable("ies_da", 0.0, ies_da_offer_mw, 0.0);
        blk.ies_seg.push_back(s);
        balance[net.ies_bus].emplace_back(s, 1.0);
    }

    // DC power flow with a fixed reference angle.
    std::vector<int> theta(nb);
    for (int b = 0; b < nb; ++b) {
        bool ref = b == net.reference_bus;
        theta[b] = m.add_variable("th", ref ? 0.0 : -lp::kInf, ref ? 0.0 : lp::kInf, 0.0);
    }
    for (const auto& l : net.lines) {
        int f = m.add_variable("f_" + l.id, -l.limit_mw, l.limit_mw, 0.0);
        blk.flow.push_back(f);
        double b_mw = l.susceptance_pu * net.base_mva;
        m.add_row(lp::Sense::Equal, 0.0,
                  {{f, 1.0}, {theta[l.from_bus], -b_mw}, {theta[l.to_bus], b_mw}});
        balance[l.from_bus].emplace_back(f, -1.0);
        balance[l.to_bus].emplace_back(f, 1.0);
    }

    // Relief valves on both sides keep every instance feasible.
    for (int b = 0; b < nb; ++b) {
        double load = net.load_at(b, hour);
        blk.shed[b] = m.add_variable("shed", 0.0, std::max(0.0, load),
                                     settings.shed_penalty_usd_per_mwh);
        balance[b].emplace_back(blk.shed[b], 1.0);
        int dump = m.add_variable("dump", 0.0, lp::kInf, settings.shed_penalty_usd_per_mwh);
        balance[b].emplace_back(dump, -1.0);
        blk.balance_row[b] =
            m.add_row(lp::Sense::Equal, load, std::move(balance[b]),
                      "bal_b" + std::to_string(b));
    }
    return blk;
}

}  // namespace

Commitment day_ahead_uc(const NetworkCase& net, int day,
                        const std::vector<double>& ies_offer_mw,
                        const std::vector<UnitInitial>& initial,
                        const MarketSettings& settings) {
    const int G = static_cast<int>(net.units.size());
    if (static_cast<int>(initial.size()) != G)
        throw InputError("day_ahead_uc: initial condition size mismatch");
    const int start = 24 * day;
    if (start >= net.horizon_hours) throw InputError("day_ahead_uc: day beyond horizon");
    const int H = std::min(24 + settings.da_lookahead_hours, net.horizon_hours - start);
    const int commit_hours = std::min(24, net.horizon_hours - start);

    lp::LinearModel m;
    m.sense = lp::Objective::Minimize;

    // Commitment variables with boundary obligations from the initial state.
    std::vector<std::vector<int>> u(G), v(G);
    for (int g = 0; g < G; ++g) {
        const ThermalUnit& un = net.units[g];
        const UnitInitial& in = initial[g];
        for (int h = 0; h < H; ++h) {
            double lo = 0.0, hi = 1.0;
            if (in.on && in.hours < un.min_up_hr && h < un.min_up_hr - in.hours) lo = 1.0;
            if (!in.on && in.hours < un.min_down_hr && h < un.min_down_hr - in.hours) hi = 0.0;
            u[g].push_back(m.add_variable("u_" + un.id, lo, hi, un.no_load_cost_usd_per_hr,
                                          true));
            v[g].push_back(m.add_variable("v_" + un.id, 0.0, 1.0, un.startup_cost_usd));
        }
    }

    std::vector<HourBlock> blocks;
    for (int h = 0; h < H; ++h) {
        std::vector<int> u_hour(G);
        for (int g = 0; g < G; ++g) u_hour[g] = u[g][h];
        double ies_mw = h < static_cast<int>(ies_offer_mw.size()) ? ies_offer_mw[h] : 0.0;
        blocks.push_back(add_hour_block(m, net, start + h, &u_hour, nullptr, nullptr,
                                        settings.ies_visible_in_da ? ies_mw : 0.0,
                                        settings));
    }

    for (int g = 0; g < G; ++g) {
        const ThermalUnit& un = net.units[g];
        const UnitInitial& in = initial[g];
        double u0 = in.on ? 1.0 : 0.0;
        double su = std::max(un.pmin_mw, un.ramp_mw_per_hr);
        bool need_ramp = un.ramp_mw_per_hr > 0.0 && un.ramp_mw_per_hr < un.pmax_mw;
        for (int h = 0; h < H; ++h) {
            // Startup indicator, with the standard tightening v_h <= 1 - u_{h-1}.
            if (h == 0) {
                m.add_row(lp::Sense::GreaterEqual, -u0, {{v[g][h], 1.0}, {u[g][h], -1.0}});
                m.add_row(lp::Sense::LessEqual, 1.0 - u0, {{v[g][h], 1.0}});
            } else {
                m.add_row(lp::Sense::GreaterEqual, 0.0,
                          {{v[g][h], 1.0}, {u[g][h], -1.0}, {u[g][h - 1], 1.0}});
                m.add_row(lp::Sense::LessEqual, 1.0,
                          {{v[g][h], 1.0}, {u[g][h - 1], 1.0}});
            }
            // Minimum up/down windows.
            {
                std::vector<std::pair<int, double>> c{{u[g][h], -1.0}};
                for (int k = std::max(0, h - un.min_up_hr + 1); k <= h; ++k)
                    c.emplace_back(v[g][k], 1.0);
                m.add_row(lp::Sense::LessEqual, 0.0, std::move(c));
            }
            {
                std::vector<std::pair<int, double>> c;
                for (int k = std::max(0, h - un.min_down_hr + 1); k <= h; ++k)
                    c.emplace_back(v[g][k], 1.0);
                int hd = h - un.min_down_hr;
                double rhs = 1.0;
                if (hd >= 0) c.emplace_back(u[g][hd], 1.0);
                else rhs = 1.0 - u0;
                m.add_row(lp::Sense::LessEqual, rhs, std::move(c));
            }
            if (need_ramp) {
                int p = blocks[h].unit_p[g];
                double ru = un.ramp_mw_per_hr;
                if (h == 0) {
                    m.add_row(lp::Sense::LessEqual, in.power_mw + ru * u0,
                              {{p, 1.0}, {v[g][0], -su}});
                    m.add_row(lp::Sense::LessEqual, su * u0 - in.power_mw,
                              {{p, -1.0}, {u[g][0], su - ru}, {v[g][0], -su}});
                } else {
                    int pp = blocks[h - 1].unit_p[g];
                    m.add_row(lp::Sense::LessEqual, 0.0,
                              {{p, 1.0}, {pp, -1.0}, {u[g][h - 1], -ru}, {v[g][h], -su}});
                    // Shutdown ramp with the indicator substituted out:
                    // p_{h-1} - p_h <= RD u_h + SD (u_{h-1} - u_h + v_h)
                    m.add_row(lp::Sense::LessEqual, 0.0,
                              {{pp, 1.0}, {p, -1.0}, {u[g][h], su - ru},
                               {u[g][h - 1], -su}, {v[g][h], -su}});
                }
            }
        }
    }

    lp::SolverSettings st;
    st.rel_gap = settings.mip_gap;
    st.max_nodes = settings.uc_node_budget;
    if (!settings.dump_lp_dir.empty())
        st.dump_lp_path = settings.dump_lp_dir + "/uc_day" + std::to_string(day) + ".lp";
    lp::Solution sol = lp::solve_milp(m, st);
    if (sol.status != lp::Status::Optimal && sol.status != lp::Status::GapLimit)
        throw SolverError("day_ahead_uc: commitment solve failed for day " +
                          std::to_string(day));

    Commitment com;
    com.day = day;
    com.status = sol.status;
    com.mip_gap = sol.mip_gap;
    com.nodes = sol.nodes;
    com.iterations = sol.iterations;
    com.on.assign(G, std::vector<uint8_t>(commit_hours, 0));
    com.startup.assign(G, std::vector<uint8_t>(commit_hours, 0));
    com.shutdown.assign(G, std::vector<uint8_t>(commit_hours, 0));
    for (int g = 0; g < G; ++g) {
        int prev = initial[g].on ? 1 : 0;
        for (int h = 0; h < commit_hours; ++h) {
            int on = sol.primal[u[g][h]] > 0.5 ? 1 : 0;
            com.on[g][h] = static_cast<uint8_t>(on);
            com.startup[g][h] = static_cast<uint8_t>(on && !prev);
            com.shutdown[g][h] = static_cast<uint8_t>(!on && prev);
            prev = on;
        }
    }
    return com;
}

MarketOutcome real_time_dispatch(const NetworkCase& net, int hour,
                                 const std::vector<uint8_t>& on_units,
                                 const BidCurve* ies_bid, const MarketSettings& settings) {
    if (hour < 0 || hour >= net.horizon_hours)
        throw InputError("real_time_dispatch: hour beyond horizon");
    if (on_units.size() != net.units.size())
        throw InputError("real_time_dispatch: commitment size mismatch");
    if (ies_bid) ies_bid->validate();

    lp::LinearModel m;
    m.sense = lp::Objective::Minimize;
    HourBlock blk =
        add_hour_block(m, net, hour, nullptr, &on_units, ies_bid, 0.0, settings);

    lp::SolverSettings st;
    if (!settings.dump_lp_dir.empty())
        st.dump_lp_path = settings.dump_lp_dir + "/rt_hour" + std::to_string(hour) + ".lp";
    lp::Solution sol = lp::solve_lp(m, st);
    if (sol.status != lp::Status::Optimal)
        throw SolverError("real_time_dispatch: dispatch failed at hour " +
                          std::to_string(hour));

    MarketOutcome out;
    out.hour = hour;
    out.dispatch_cost_usd = sol.objective;
    const int nb = static_cast<int>(net.buses.size());
    out.lmp_usd_per_mwh.resize(nb);
    for (int b = 0; b < nb; ++b)
        out.lmp_usd_per_mwh[b] =
            std::min(sol.duals[blk.balance_row[b]], settings.price_cap_usd_per_mwh);
    out.unit_mw.resize(net.units.size(), 0.0);
    for (size_t g = 0; g < net.units.size(); ++g)
        if (blk.unit_p[g] >= 0) out.unit_mw[g] = sol.primal[blk.unit_p[g]];
    out.renewable_mw.resize(net.renewables.size(), 0.0);
    for (size_t r = 0; r < net.renewables.size(); ++r)
        out.renewable_mw[r] = sol.primal[blk.renew[r]];
    out.flow_mw.resize(net.lines.size(), 0.0);
    for (size_t l = 0; l < net.lines.size(); ++l) out.flow_mw[l] = sol.primal[blk.flow[l]];
    out.shed_mw.resize(nb, 0.0);
    for (int b = 0; b < nb; ++b) out.shed_mw[b] = sol.primal[blk.shed[b]];
    out.ies_cleared_mw = 0.0;
    for (int s : blk.ies_seg) out.ies_cleared_mw += sol.primal[s];
    return out;
}

}  // namespace ies
