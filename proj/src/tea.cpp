// Techno-economic summaries and the design sweep driver.
#include "iesmarket/tea.hpp"

#include <atomic>
#include <cmath>
#include <thread>

namespace ies {

namespace {

constexpr double kGwhPerMwh = 1e-3;
constexpr double kMusdPerUsd = 1e-6;

void fill_energy(TeaSummary& s, const std::vector<HourlyOperation>& ops,
                 const WindAsset& wind, const BatteryDesign& design, int first_hour,
                 double soc_gain_mwh) {
    EnergyBalance eb = energy_balance(ops, wind, design, 1.0, first_hour);
    s.available_gwh = eb.available_mwh * kGwhPerMwh;
    s.sold_gwh = eb.sold_mwh * kGwhPerMwh;
    s.curtailment_gwh = eb.curtailed_mwh * kGwhPerMwh;
    s.battery_loss_gwh = (eb.charge_loss_mwh + eb.discharge_loss_mwh) * kGwhPerMwh;
    s.soc_gain_gwh = soc_gain_mwh * kGwhPerMwh;
}

void fill_prices(TeaSummary& s, const std::vector<double>& lmp,
                 const std::vector<double>& sold_mw, const std::vector<double>* load_mw,
                 double revenue_usd, const TeaOptions& opt) {
    const int T = static_cast<int>(lmp.size());
    s.span_hours = T;
    s.histogram_edges = opt.histogram_edges;
    s.histogram_counts.assign(opt.histogram_edges.size() + 1, 0);
    double sum = 0.0, wsum = 0.0, wtot = 0.0, sold_mwh = 0.0;
    for (int t = 0; t < T; ++t) {
        sum += lmp[t];
        if (load_mw) {
            wsum += lmp[t] * (*load_mw)[t];
            wtot += (*load_mw)[t];
        }
        sold_mwh += sold_mw[t];
        size_t bucket = 0;
        while (bucket < opt.histogram_edges.size() && lmp[t] >= opt.histogram_edges[bucket])
            ++bucket;
        s.histogram_counts[bucket]++;
        if (lmp[t] >= opt.high_lmp_threshold) {
            s.high_lmp_hours++;
            s.high_lmp_sold_gwh += sold_mw[t] * kGwhPerMwh;
        }
    }
    s.lmp_bus_time_avg = T > 0 ? sum / T : 0.0;
    s.lmp_bus_load_wtd = (load_mw && wtot > 0.0) ? wsum / wtot : s.lmp_bus_time_avg;
    if (sold_mwh > kPowerTolMw)
        s.lmp_received = revenue_usd / sold_mwh;
}

void fill_economics(TeaSummary& s, double revenue_usd, const WindAsset& wind,
                    const BatteryDesign& design, const FinanceParams& finance,
                    const TeaOptions& opt) {
    double scale = 1.0;
    if (opt.annualize_short_spans && s.span_hours < opt.hours_per_year && s.span_hours > 0) {
        scale = static_cast<double>(opt.hours_per_year) / s.span_hours;
        s.annualized = true;
    }
    s.annualization_scale = scale;
    double annual_revenue = revenue_usd * scale;
    double om = om_cost(wind, design);
    double capex = design.capex_kusd_per_kw * design.max_power_mw * 1e6;
    double phi = finance.npv_factor();
    s.revenue_musd = annual_revenue * kMusdPerUsd;
    s.om_musd_per_yr = om * kMusdPerUsd;
    s.capex_musd = capex * kMusdPerUsd;
    s.npv_musd = (phi * (annual_revenue - om) - capex) * kMusdPerUsd;
    s.battery_duration_hr = design.duration_hr;
    s.battery_power_ratio =
        wind.max_power_mw > 0.0 ? design.max_power_mw / wind.max_power_mw : 0.0;
}

}  // namespace

TeaSummary summarize(const PtResult& pt, const PriceSeries& prices, const WindAsset& wind,
                     const FinanceParams& finance, const TeaOptions& options) {
    TeaSummary s;
    s.mode = "pt";
    double soc_gain = 0.0;
    for (const auto& op : pt.schedule)
        soc_gain += pt.design.charge_eff * op.charge_mw -
                    op.discharge_mw / pt.design.discharge_eff;
    fill_energy(s, pt.schedule, wind, pt.design, 0, soc_gain);
    std::vector<double> sold(pt.schedule.size());
    for (size_t t = 0; t < pt.schedule.size(); ++t) sold[t] = pt.schedule[t].total_sale_mw;
    fill_prices(s, prices.usd_per_mwh, sold, nullptr, pt.revenue_usd, options);
    fill_economics(s, pt.revenue_usd, wind, pt.design, finance, options);
    return s;
}

TeaSummary summarize(const MarketLog& log, const BatteryDesign& design,
                     const WindAsset& wind, const FinanceParams& finance,
                     const TeaOptions& options) {
    TeaSummary s;
    s.mode = "mo";
    double soc_gain = log.ies_states.empty() ? 0.0 : log.ies_states.back().soc_mwh;
    fill_energy(s, log.ies_ops, wind, design, log.first_hour, soc_gain);
    PriceSeries lmp = log.ies_bus_prices();
    std::vector<double> sold(log.ies_ops.size()), load(log.outcomes.size());
    for (size_t t = 0; t < log.ies_ops.size(); ++t) sold[t] = log.ies_ops[t].total_sale_mw;
    // Served system load equals total generation in the lossless DC model.
    for (size_t t = 0; t < log.outcomes.size(); ++t) {
        double total = log.outcomes[t].ies_cleared_mw;
        for (double p : log.outcomes[t].unit_mw) total += p;
        for (double p : log.outcomes[t].renewable_mw) total += p;
        load[t] = total;
    }
    fill_prices(s, lmp.usd_per_mwh, sold, &load, log.total_settlement_usd(), options);
    fill_economics(s, log.total_settlement_usd(), wind, design, finance, options);
    return s;
}

TeaComparison compare(const TeaSummary& pt, const TeaSummary& mo) {
    TeaComparison c;
    double mo_rev = mo.revenue_musd;
    c.revenue_ratio = mo_rev != 0.0 ? pt.revenue_musd / mo_rev : 0.0;
    c.revenue_overestimate_pct =
        mo_rev != 0.0 ? 100.0 * (pt.revenue_musd - mo_rev) / std::fabs(mo_rev) : 0.0;
    c.npv_gap_musd = pt.npv_musd - mo.npv_musd;
    c.curtailment_gap_gwh = mo.curtailment_gwh - pt.curtailment_gwh;
    if (pt.lmp_received && mo.lmp_received)
        c.received_lmp_gap = *pt.lmp_received - *mo.lmp_received;
    return c;
}

const SweepCell* SweepGrid::find(const std::string& mode, double ratio,
                                 double duration) const {
    for (const auto& c : cells)
        if (c.mode == mode && std::fabs(c.power_ratio - ratio) < 1e-9 &&
            std::fabs(c.duration_hr - duration) < 1e-9)
            return &c;
    return nullptr;
}

SweepGrid sweep(const NetworkCase& net, const WindAsset& wind,
                const BatteryDesign& prototype, const FinanceParams& finance,
                const SweepSpec& spec, const SimOptions& sim_options,
                const PriceSeries* pt_prices, const TeaOptions& tea) {
    SweepGrid grid;
    grid.spec = spec;

    // Price signal for the price-taker cells: realized prices of a
    // wind-only time-invariant run when none is supplied.
    PriceSeries reference;
    bool need_pt = false;
    for (const auto& mode : spec.modes) need_pt = need_pt || mode == "pt";
    if (need_pt) {
        if (pt_prices) {
            reference = *pt_prices;
        } else {
            BatteryDesign none = prototype;
            none.max_power_mw = 0.0;
            none.duration_hr = 0.0;
            MarketLog base = run_simulation(net, wind, none, SimMode::WindOnlyTi,
                                            spec.span_hours, sim_options);
            if (base.span_hours() < spec.span_hours)
                throw SolverError("sweep: reference simulation failed");
            reference = base.ies_bus_prices();
        }
        if (reference.size() < spec.span_hours)
            throw InputError("sweep: price series shorter than the sweep span");
        reference.usd_per_mwh.resize(spec.span_hours);
    }

    for (const auto& mode : spec.modes)
        for (double dur : spec.durations_hr)
            for (double ratio : spec.power_ratios) {
                SweepCell cell;
                cell.mode = mode;
                cell.power_ratio = ratio;
                cell.duration_hr = dur;
                grid.cells.push_back(cell);
            }

    std::atomic<size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            size_t i = next.fetch_add(1);
            if (i >= grid.cells.size()) return;
            SweepCell& cell = grid.cells[i];
            BatteryDesign design = prototype;
            design.max_power_mw = cell.power_ratio * wind.max_power_mw;
            design.duration_hr = cell.duration_hr;
            try {
                if (cell.mode == "pt") {
                    BatteryBounds bounds;
                    bounds.prototype = design;
                    PtOptions po;
                    PtResult pt = pt_optimize(reference, wind, bounds, finance, design, po);
                    if (pt.status != lp::Status::Optimal)
                        throw SolverError("price-taker solve failed");
                    cell.summary = summarize(pt, reference, wind, finance, tea);
                } else if (cell.mode == "mo") {
                    MarketLog log = run_simulation(net, wind, design, SimMode::TvBidding,
                                                   spec.span_hours, sim_options);
                    if (log.span_hours() < spec.span_hours)
                        throw SolverError(log.notes.empty() ? "simulation aborted"
                                                            : log.notes.back());
                    cell.summary = summarize(log, design, wind, finance, tea);
                    cell.summary.mode = "mo";
                } else {
                    throw InputError("unknown sweep mode: " + cell.mode);
                }
                cell.summary.battery_power_ratio = cell.power_ratio;
                cell.summary.battery_duration_hr = cell.duration_hr;
                cell.ok = true;
            } catch (const std::exception& e) {
                cell.ok = false;
                cell.error = e.what();
            }
        }
    };
    int jobs = std::max(1, spec.jobs);
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    return grid;
}

}  // namespace ies
