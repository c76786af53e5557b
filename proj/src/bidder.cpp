// Bidding implementation.
#include "iesmarket/bidder.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ies {

ScenarioSet backcast(const PriceSeries& history, int t0, int window_hr, int n_scenarios) {
    if (window_hr < 1 || n_scenarios < 1) throw InputError("backcast: bad window or count");
    ScenarioSet set;
    if (t0 - 24 * n_scenarios < 0)
        throw InsufficientHistory("backcast: needs " + std::to_string(n_scenarios) +
                                  " days of history before hour " + std::to_string(t0));
    for (int i = 1; i <= n_scenarios; ++i) {
        std::vector<double> scen(window_hr);
        for (int k = 0; k < window_hr; ++k) {
            int idx = t0 - 24 * i + k;
            if (idx < 0 || idx >= history.size())
                throw InsufficientHistory("backcast: index out of range");
            scen[k] = history[idx];
        }
        set.prices.push_back(std::move(scen));
    }
    return set;
}

double BidCurve::offered_at(double price_usd_per_mwh) const {
    double power = 0.0;
    for (const auto& [p, q] : points) {
        if (p <= price_usd_per_mwh + 1e-9) power = q;
        else break;
    }
    return power;
}

void BidCurve::validate() const {
    if (points.empty()) throw InputError("bid curve: no points");
    if (std::fabs(points.front().first) > 1e-12 && points.front().first < 0.0)
        throw InputError("bid curve: negative anchor price");
    for (size_t k = 1; k < points.size(); ++k) {
        if (points[k].first <= points[k - 1].first)
            throw InputError("bid curve: prices not strictly increasing");
        if (points[k].second < points[k - 1].second - kPowerTolMw)
            throw InputError("bid curve: power decreases with price");
    }
}

BidPlan solve_bidding(const IesState& state, const std::vector<double>& wind_window_cf,
                      const ScenarioSet& scenarios, const BatteryDesign& design,
                      const WindAsset& wind, const BiddingOptions& options) {
    const int n = scenarios.count();
    const int K = scenarios.window();
    if (n < 1) throw InputError("solve_bidding: empty scenario set");
    if (static_cast<int>(wind_window_cf.size()) < K)
        throw InputError("solve_bidding: wind window shorter than scenario window");
    const double dt = options.dt_hr;
    const double w = 1.0 / n;
    const bool battery = !design.is_zero();
    const double sbar = design.max_soc_mwh();
    const double delta = design.degradation_coeff;

    lp::LinearModel m;
    m.sense = lp::Objective::Maximize;
    // Variable blocks per (scenario, window hour).
    auto idx3 = [&](int i, int k) { return i * K + k; };
    std::vector<int> pw(n * K), p(n * K), c, d, soc, thr;
    if (battery) {
        c.resize(n * K);
        d.resize(n * K);
        soc.resize(n * K);
        thr.resize(n * K);
    }
    for (int i = 0; i < n; ++i) {
        for (int k = 0; k < K; ++k) {
            double avail = wind_window_cf[k] * wind.max_power_mw;
            pw[idx3(i, k)] = m.add_variable("pw", 0.0, avail, 0.0);
            p[idx3(i, k)] = m.add_variable("p", 0.0, lp::kInf,
                                           w * scenarios.prices[i][k] * dt);
            if (battery) {
                c[idx3(i, k)] = m.add_variable("c", 0.0, design.max_power_mw, 0.0);
                d[idx3(i, k)] = m.add_variable("d", 0.0, design.max_power_mw, 0.0);
                double term = k == K - 1 ? w * options.terminal_soc_value_usd_per_mwh : 0.0;
                soc[idx3(i, k)] = m.add_variable("S", 0.0, lp::kInf, term);
                thr[idx3(i, k)] = m.add_variable("E", 0.0, lp::kInf, 0.0);
            }
        }
    }

    for (int i = 0; i < n; ++i) {
        for (int k = 0; k < K; ++k) {
            int t = idx3(i, k);
            if (battery) {
                // p = pw - c + d  (output identity through the splitter/mixer)
                m.add_row(lp::Sense::Equal, 0.0,
                          {{p[t], 1.0}, {pw[t], -1.0}, {c[t], 1.0}, {d[t], -1.0}});
                m.add_row(lp::Sense::LessEqual, 0.0, {{c[t], 1.0}, {pw[t], -1.0}});
                std::vector<std::pair<int, double>> soc_row{
                    {soc[t], 1.0}, {c[t], -design.charge_eff * dt},
                    {d[t], dt / design.discharge_eff}};
                std::vector<std::pair<int, double>> thr_row{
                    {thr[t], 1.0}, {c[t], -0.5 * dt}, {d[t], -0.5 * dt}};
                double soc_rhs = 0.0, thr_rhs = 0.0;
                if (k > 0) {
                    soc_row.emplace_back(soc[idx3(i, k - 1)], -1.0);
                    thr_row.emplace_back(thr[idx3(i, k - 1)], -1.0);
                } else {
                    soc_rhs = state.soc_mwh;
                    thr_rhs = state.throughput_mwh;
                }
                m.add_row(lp::Sense::Equal, soc_rhs, std::move(soc_row));
                m.add_row(lp::Sense::Equal, thr_rhs, std::move(thr_row));
                m.add_row(lp::Sense::LessEqual, sbar, {{soc[t], 1.0}, {thr[t], delta}});
            } else {
                m.add_row(lp::Sense::Equal, 0.0, {{p[t], 1.0}, {pw[t], -1.0}});
            }
        }
    }

    // Market rule: offered power non-decreasing in the scenario price.
    // Scenarios are grouped by equal price; members of a lower-price group
    // sit below a bridge variable that sits below every member of the next.
    for (int k = 0; k < K; ++k) {
        std::vector<int> order(n);
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](int a, int b) {
            if (scenarios.prices[a][k] != scenarios.prices[b][k])
                return scenarios.prices[a][k] < scenarios.prices[b][k];
            return a < b;
        });
        std::vector<std::vector<int>> groups;
        for (int i : order) {
            if (groups.empty() ||
                scenarios.prices[groups.back().front()][k] != scenarios.prices[i][k])
                groups.push_back({i});
            else
                groups.back().push_back(i);
        }
        for (size_t g = 0; g + 1 < groups.size(); ++g) {
            if (groups[g].size() == 1 && groups[g + 1].size() == 1) {
                m.add_row(lp::Sense::LessEqual, 0.0,
                          {{p[idx3(groups[g][0], k)], 1.0},
                           {p[idx3(groups[g + 1][0], k)], -1.0}});
                continue;
            }
            int bridge = m.add_variable("bridge", 0.0, lp::kInf, 0.0);
            for (int i : groups[g])
                m.add_row(lp::Sense::LessEqual, 0.0, {{p[idx3(i, k)], 1.0}, {bridge, -1.0}});
            for (int i : groups[g + 1])
                m.add_row(lp::Sense::LessEqual, 0.0, {{bridge, 1.0}, {p[idx3(i, k)], -1.0}});
        }
    }

    lp::Solution sol = lp::solve_lp(m);
    if (sol.status != lp::Status::Optimal)
        throw SolverError("solve_bidding: stochastic program did not solve");

    BidPlan plan;
    plan.ops.assign(n, {});
    plan.offered_mw.assign(n, std::vector<double>(K, 0.0));
    double terminal_credit = 0.0;
    for (int i = 0; i < n; ++i) {
        plan.ops[i].reserve(K);
        for (int k = 0; k < K; ++k) {
            int t = idx3(i, k);
            double pwv = std::max(0.0, sol.primal[pw[t]]);
            double cv = battery ? std::max(0.0, sol.primal[c[t]]) : 0.0;
            double dv = battery ? std::max(0.0, sol.primal[d[t]]) : 0.0;
            if (cv > pwv) cv = pwv;
            plan.ops[i].push_back(HourlyOperation::from_flows(pwv, cv, dv));
            plan.offered_mw[i][k] = plan.ops[i].back().total_sale_mw;
        }
        if (battery)
            terminal_credit += w * options.terminal_soc_value_usd_per_mwh *
                               sol.primal[soc[idx3(i, K - 1)]];
    }
    plan.expected_revenue_usd = sol.objective - terminal_credit;
    return plan;
}

BidCurve to_bid_curve(const BidPlan& plan, const ScenarioSet& scenarios, int window_hour,
                      int hour_stamp) {
    const int n = scenarios.count();
    if (window_hour < 0 || window_hour >= scenarios.window())
        throw InputError("to_bid_curve: window hour out of range");
    std::vector<std::pair<double, double>> pairs;
    pairs.reserve(n);
    for (int i = 0; i < n; ++i)
        pairs.emplace_back(scenarios.prices[i][window_hour],
                           plan.offered_mw[i][window_hour]);
    std::sort(pairs.begin(), pairs.end());

    BidCurve curve;
    curve.hour = hour_stamp;
    curve.points.emplace_back(0.0, 0.0);
    double running = 0.0;
    for (size_t a = 0; a < pairs.size();) {
        size_t b = a;
        double power = 0.0;
        while (b < pairs.size() && pairs[b].first == pairs[a].first) {
            power = std::max(power, pairs[b].second);
            ++b;
        }
        double price = pairs[a].first;
        if (power < running - kPowerTolMw)
            throw Error("to_bid_curve: offered power decreases with price");
        power = std::max(power, running);
        if (price <= 0.0) {
            // Power offered at non-positive prices folds into the zero anchor.
            curve.points.front().second = std::max(curve.points.front().second, power);
        } else if (power > running + kPowerTolMw) {
            curve.points.emplace_back(price, power);
        }
        running = std::max(running, power);
        a = b;
    }
    // The anchor may have absorbed power; keep cumulative powers consistent.
    double floor_power = curve.points.front().second;
    for (auto& [price, q] : curve.points) q = std::max(q, floor_power);
    curve.validate();
    return curve;
}

TrackResult track_dispatch(const IesState& state, double cleared_mw, double capacity_factor,
                           const BatteryDesign& design, const WindAsset& wind,
                           double dt_hr) {
    TrackResult res;
    double target = std::max(0.0, cleared_mw);
    auto env = feasible_envelope(state, capacity_factor, wind, design, dt_hr);
    double serve_wind = std::min(target, env.max_wind_mw);
    double deficit = target - serve_wind;
    double discharge = std::min(deficit, env.max_discharge_mw);
    res.shortfall_mw = deficit - discharge;
    double surplus = env.max_wind_mw - serve_wind;
    double charge = discharge > 0.0 ? 0.0 : std::min(surplus, env.max_charge_mw);
    res.op = HourlyOperation::from_flows(serve_wind + charge, charge, discharge);
    return res;
}

}  // namespace ies
