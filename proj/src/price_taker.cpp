// Price-taker model builder and result extraction.
#include "iesmarket/price_taker.hpp"

#include <cmath>

namespace ies {

double npv_factor(double discount_rate, int lifetime_years) {
    if (!(discount_rate > 0.0)) throw InputError("npv_factor: discount rate must be positive");
    if (lifetime_years < 1) throw InputError("npv_factor: lifetime must be at least one year");
    double growth = std::pow(1.0 + discount_rate, lifetime_years);
    return (growth - 1.0) / (discount_rate * growth);
}

double FinanceParams::npv_factor() const {
    return ies::npv_factor(discount_rate, lifetime_years);
}

double revenue(const PriceSeries& prices, const std::vector<HourlyOperation>& schedule,
               double incentive_usd_per_mwh, double dt_hr) {
    if (prices.size() != static_cast<int>(schedule.size()))
        throw InputError("revenue: price series and schedule lengths differ");
    double total = 0.0;
    for (int t = 0; t < prices.size(); ++t)
        total += (prices[t] + incentive_usd_per_mwh) * schedule[t].total_sale_mw * dt_hr;
    return total;
}

namespace {

constexpr double kUsdPerKusd = 1e3;
constexpr double kUsdPerKusdPerKw = 1e6;  // k$/kW on a MW rating

struct PtVars {
    std::vector<int> pw, c, d, soc, thr;
    int pbar = -1, sbar = -1;
};

}  // namespace

PtResult pt_optimize(const PriceSeries& prices, const WindAsset& wind,
                     const BatteryBounds& bounds, const FinanceParams& finance,
                     const std::optional<BatteryDesign>& fixed_design,
                     const PtOptions& options) {
    const int T = prices.size();
    if (T == 0) throw InputError("pt_optimize: empty price series");
    wind.validate();
    if (static_cast<int>(wind.capacity_factors.size()) < T)
        throw InputError("pt_optimize: capacity factor series shorter than prices");
    const double dt = options.dt_hr;
    const double phi = finance.npv_factor();
    const double eps = finance.incentive_usd_per_mwh;

    const bool sizing = !fixed_design.has_value();
    BatteryDesign proto = sizing ? bounds.prototype : *fixed_design;
    proto.validate();
    if (sizing && (bounds.power_max_mw < bounds.power_min_mw ||
                   bounds.duration_max_hr < bounds.duration_min_hr ||
                   bounds.power_min_mw < 0.0 || bounds.duration_min_hr < 0.0))
        throw InputError("pt_optimize: contradictory sizing bounds");
    const bool battery = sizing ? bounds.power_max_mw > 0.0 && bounds.duration_max_hr > 0.0
                                : !proto.is_zero();

    lp::LinearModel m;
    m.sense = lp::Objective::Maximize;
    PtVars v;
    v.pw.resize(T);
    if (battery) {
        v.c.resize(T);
        v.d.resize(T);
        v.soc.resize(T);
        v.thr.resize(T);
    }

    const double pbar_fixed = battery && !sizing ? proto.max_power_mw : 0.0;
    const double sbar_fixed = battery && !sizing ? proto.max_soc_mwh() : 0.0;
    const double delta = proto.degradation_coeff;

    for (int t = 0; t < T; ++t) {
        double price_term = phi * (prices[t] + eps) * dt;
        v.pw[t] = m.add_variable("pw" + std::to_string(t), 0.0, wind.available_mw(t), price_term);
        if (battery) {
            double chi = sizing ? lp::kInf : pbar_fixed;
            v.c[t] = m.add_variable("c" + std::to_string(t), 0.0, chi, -price_term);
            v.d[t] = m.add_variable("d" + std::to_string(t), 0.0, chi, price_term);
            double shi = sizing ? lp::kInf : sbar_fixed;
            bool pinned = options.periodic_soc && t == T - 1;
            v.soc[t] = m.add_variable("S" + std::to_string(t), 0.0, pinned ? 0.0 : shi, 0.0);
            v.thr[t] = m.add_variable("E" + std::to_string(t), 0.0, lp::kInf, 0.0);
        }
    }
    if (battery && sizing) {
        v.pbar = m.add_variable("Pbar", bounds.power_min_mw, bounds.power_max_mw,
                                -proto.capex_kusd_per_kw * kUsdPerKusdPerKw);
        v.sbar = m.add_variable("Sbar", 0.0, lp::kInf,
                                -phi * proto.om_cost_kusd_per_mwh_yr * kUsdPerKusd);
    }

    if (battery) {
        for (int t = 0; t < T; ++t) {
            // State-of-charge and throughput balances.
            std::vector<std::pair<int, double>> soc_row{{v.soc[t], 1.0},
                                                        {v.c[t], -proto.charge_eff * dt},
                                                        {v.d[t], dt / proto.discharge_eff}};
            std::vector<std::pair<int, double>> thr_row{{v.thr[t], 1.0},
                                                        {v.c[t], -0.5 * dt},
                                                        {v.d[t], -0.5 * dt}};
            if (t > 0) {
                soc_row.emplace_back(v.soc[t - 1], -1.0);
                thr_row.emplace_back(v.thr[t - 1], -1.0);
            }
            m.add_row(lp::Sense::Equal, 0.0, std::move(soc_row));
            m.add_row(lp::Sense::Equal, 0.0, std::move(thr_row));
            // Degraded capacity bound.
            if (sizing) {
                m.add_row(lp::Sense::LessEqual, 0.0,
                          {{v.soc[t], 1.0}, {v.thr[t], delta}, {v.sbar, -1.0}});
                m.add_row(lp::Sense::LessEqual, 0.0, {{v.c[t], 1.0}, {v.pbar, -1.0}});
                m.add_row(lp::Sense::LessEqual, 0.0, {{v.d[t], 1.0}, {v.pbar, -1.0}});
            } else {
                m.add_row(lp::Sense::LessEqual, sbar_fixed,
                          {{v.soc[t], 1.0}, {v.thr[t], delta}});
            }
            // Charging draws from wind only.
            m.add_row(lp::Sense::LessEqual, 0.0, {{v.c[t], 1.0}, {v.pw[t], -1.0}});
        }
        if (sizing) {
            m.add_row(lp::Sense::LessEqual, 0.0,
                      {{v.sbar, 1.0}, {v.pbar, -bounds.duration_max_hr}});
            m.add_row(lp::Sense::GreaterEqual, 0.0,
                      {{v.sbar, 1.0}, {v.pbar, -bounds.duration_min_hr}});
        }
    }

    // Constant objective parts: wind O&M always, battery costs when pinned.
    double offset = -phi * wind.om_cost_kusd_per_mw_yr * wind.max_power_mw * kUsdPerKusd;
    if (battery && !sizing) {
        offset -= phi * proto.om_cost_kusd_per_mwh_yr * sbar_fixed * kUsdPerKusd;
        offset -= proto.capex_kusd_per_kw * pbar_fixed * kUsdPerKusdPerKw;
    }

    lp::SolverSettings st;
    st.dump_lp_path = options.dump_lp_path;
    lp::Solution sol = lp::solve_lp(m, st);

    PtResult result;
    result.status = sol.status;
    result.lp_iterations = sol.iterations;
    if (sol.status != lp::Status::Optimal) return result;

    result.design = proto;
    if (sizing) {
        double pbar = battery ? std::max(0.0, sol.primal[v.pbar]) : 0.0;
        double sbar = battery ? std::max(0.0, sol.primal[v.sbar]) : 0.0;
        result.design.max_power_mw = pbar;
        result.design.duration_hr = pbar > 1e-9 ? sbar / pbar : 0.0;
    }

    result.schedule.reserve(T);
    for (int t = 0; t < T; ++t) {
        double pw = std::max(0.0, sol.primal[v.pw[t]]);
        double c = battery ? std::max(0.0, sol.primal[v.c[t]]) : 0.0;
        double d = battery ? std::max(0.0, sol.primal[v.d[t]]) : 0.0;
        if (c > pw) c = pw;  // strip solver round-off
        result.schedule.push_back(HourlyOperation::from_flows(pw, c, d));
    }
    result.revenue_usd = revenue(prices, result.schedule, eps, dt);
    result.om_usd_per_yr = om_cost(wind, result.design);
    result.capex_usd = result.design.capex_kusd_per_kw * result.design.max_power_mw *
                       kUsdPerKusdPerKw;
    result.npv_usd = phi * (result.revenue_usd - result.om_usd_per_yr) - result.capex_usd;
    result.objective_usd = sol.objective + offset;
    return result;
}

DominanceReport pt_upper_bound_check(const PriceSeries& prices, const BatteryDesign& design,
                                     const WindAsset& wind,
                                     const std::vector<HourlyOperation>& realized_ops,
                                     const FinanceParams& finance, double dt_hr) {
    PtOptions opt;
    opt.dt_hr = dt_hr;
    opt.periodic_soc = false;  // any causal trace must be dominated
    BatteryBounds bounds;
    bounds.prototype = design;
    PtResult pt = pt_optimize(prices, wind, bounds, finance, design, opt);
    if (pt.status != lp::Status::Optimal)
        throw SolverError("pt_upper_bound_check: price-taker solve failed");
    DominanceReport rep;
    rep.pt_revenue_usd = pt.revenue_usd;
    rep.realized_revenue_usd =
        revenue(prices, realized_ops, finance.incentive_usd_per_mwh, dt_hr);
    rep.gap_usd = rep.pt_revenue_usd - rep.realized_revenue_usd;
    return rep;
}

}  // namespace ies
