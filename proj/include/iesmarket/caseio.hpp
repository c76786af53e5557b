// File formats: network case directories, price series, market logs,
// price-taker results, sweep grids, and the run configuration.
// All formats are documented field by field in docs/formats.md.
#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "iesmarket/market.hpp"
#include "iesmarket/price_taker.hpp"
#include "iesmarket/tea.hpp"

namespace ies {

// --- network case directory ------------------------------------------------

NetworkCase load_case(const std::filesystem::path& dir);
void save_case(const NetworkCase& net, const std::filesystem::path& dir);

// --- price series ------------------------------------------------------------

PriceSeries load_prices(const std::filesystem::path& csv);
void save_prices(const PriceSeries& prices, const std::filesystem::path& csv);

// --- market log --------------------------------------------------------------

void save_log(const MarketLog& log, const NetworkCase& net,
              const std::filesystem::path& dir);
MarketLog load_log(const std::filesystem::path& dir);

// --- price-taker result ------------------------------------------------------

void save_pt_result(const PtResult& pt, const PriceSeries& prices,
                    const std::filesystem::path& dir);

// --- tea summaries and sweeps ------------------------------------------------

std::string tea_summary_json(const TeaSummary& s);
void save_summary(const TeaSummary& s, const std::filesystem::path& file);
void save_sweep(const SweepGrid& grid, const std::filesystem::path& dir);

// --- bid curve audit log -------------------------------------------------------

void save_bid_curves(const std::vector<BidCurve>& curves, const std::filesystem::path& csv);

// --- run configuration ---------------------------------------------------------

struct RunConfig {
    std::string case_dir = "cases/desk5";
    std::string mode = "tv";
    int span_hours = -1;  // -1 means the full case horizon
    unsigned seed = 1;
    std::string out_dir = "out";
    int jobs = 1;
    double dt_hr = 1.0;

    FinanceParams finance;        // r = 0.05, N = 30, eps = 1e-3
    BatteryDesign battery;        // efficiencies 0.95, delta = 1e-4
    double wind_max_power_mw = 80.0;
    double wind_om_kusd_per_mw_yr = 42.0;

    MarketSettings market;        // mip gap 0.01, shed penalty 10000
    int scenario_count = 10;
    int bid_window_hr = 4;
    double terminal_soc_value_usd_per_mwh = 0.0;
    double fallback_price_usd_per_mwh = 20.0;

    SimOptions sim_options() const;
    WindAsset wind_asset(const NetworkCase& net) const;
};

// Parses a JSON config. Unknown keys are rejected with their path.
RunConfig load_config(const std::filesystem::path& file);
RunConfig parse_config_json(const std::string& text, const std::string& origin);
std::string config_json(const RunConfig& cfg);

// Stable hash of the canonical config serialization, for run manifests.
uint64_t config_hash(const RunConfig& cfg);
void write_run_manifest(const RunConfig& cfg, const std::filesystem::path& out_dir);

}  // namespace ies
