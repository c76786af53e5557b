// Techno-economic summarization, price-taker vs market comparison, and
// the battery design sweep.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "iesmarket/market.hpp"
#include "iesmarket/price_taker.hpp"

namespace ies {

struct TeaOptions {
    // Bucket edges; counts cover (-inf,e0), [e0,e1), ..., [e_last,inf).
    std::vector<double> histogram_edges = {0.0, 5.0, 15.0, 25.0, 100.0};
    double high_lmp_threshold = 100.0;
    int hours_per_year = 8784;
    bool annualize_short_spans = true;
};

struct TeaSummary {
    std::string mode;
    double battery_duration_hr = 0.0;
    double battery_power_ratio = 0.0;  // battery power over wind power

    // Energy accounting over the span, GWh.
    double available_gwh = 0.0;
    double sold_gwh = 0.0;
    double curtailment_gwh = 0.0;
    double battery_loss_gwh = 0.0;
    double soc_gain_gwh = 0.0;  // terminal minus initial stored energy

    // Economics. Revenue and NPV are annualized when the span is short.
    double revenue_musd = 0.0;
    double om_musd_per_yr = 0.0;
    double capex_musd = 0.0;
    double npv_musd = 0.0;

    // Price statistics at the IES bus.
    double lmp_bus_time_avg = 0.0;
    double lmp_bus_load_wtd = 0.0;  // equals the time average when no load data
    std::optional<double> lmp_received;  // revenue per MWh sold; absent if nothing sold
    int high_lmp_hours = 0;
    double high_lmp_sold_gwh = 0.0;
    std::vector<double> histogram_edges;
    std::vector<int> histogram_counts;

    int span_hours = 0;
    bool annualized = false;
    double annualization_scale = 1.0;
};

TeaSummary summarize(const PtResult& pt, const PriceSeries& prices, const WindAsset& wind,
                     const FinanceParams& finance, const TeaOptions& options = {});
TeaSummary summarize(const MarketLog& log, const BatteryDesign& design,
                     const WindAsset& wind, const FinanceParams& finance,
                     const TeaOptions& options = {});

struct TeaComparison {
    double revenue_ratio = 0.0;            // pt over mo
    double revenue_overestimate_pct = 0.0; // 100 (pt - mo) / mo
    double npv_gap_musd = 0.0;             // pt minus mo
    double curtailment_gap_gwh = 0.0;      // mo minus pt
    double received_lmp_gap = 0.0;         // pt minus mo, when both defined
};

TeaComparison compare(const TeaSummary& pt, const TeaSummary& mo);

struct SweepSpec {
    std::vector<double> power_ratios = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
    std::vector<double> durations_hr = {2.0, 4.0, 6.0, 8.0, 10.0};
    std::vector<std::string> modes = {"pt", "mo"};
    int span_hours = 168;
    int jobs = 1;
};

struct SweepCell {
    std::string mode;
    double power_ratio = 0.0;
    double duration_hr = 0.0;
    bool ok = false;
    std::string error;
    TeaSummary summary;
};

struct SweepGrid {
    SweepSpec spec;
    std::vector<SweepCell> cells;  // mode, then duration, then ratio (ratio fastest)

    const SweepCell* find(const std::string& mode, double ratio, double duration) const;
};

// Evaluate each design under each mode. "pt" cells run the price-taker on
// `pt_prices` (generated from a wind-only time-invariant run when absent);
// "mo" cells run the time-variant market simulation. Per-cell failures are
// recorded and the sweep continues.
SweepGrid sweep(const NetworkCase& net, const WindAsset& wind,
                const BatteryDesign& prototype, const FinanceParams& finance,
                const SweepSpec& spec, const SimOptions& sim_options,
                const PriceSeries* pt_prices = nullptr, const TeaOptions& tea = {});

}  // namespace ies
