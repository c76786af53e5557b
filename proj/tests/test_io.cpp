// Persistence tests: case round trips, schema errors, prices, logs,
// configuration defaults, and run manifests.
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "iesmarket/caseio.hpp"
#include "iesmarket/desk_case.hpp"

using namespace ies;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& tag) {
    fs::path p = fs::temp_directory_path() / ("iesmarket_test_" + tag);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), {});
}

}  // namespace

TEST_CASE("case round trip is byte identical") {
    NetworkCase net = desk_case();
    fs::path a = temp_dir("case_a"), b = temp_dir("case_b");
    save_case(net, a);
    NetworkCase loaded = load_case(a);
    save_case(loaded, b);
    for (const char* f :
         {"manifest.json", "buses.csv", "lines.csv", "generators.csv", "timeseries.csv"}) {
        CHECK_MESSAGE(slurp(a / f) == slurp(b / f), f);
    }
    CHECK(loaded.units.size() == net.units.size());
    CHECK(loaded.ies_wind_cf == net.ies_wind_cf);
    CHECK(loaded.units[0].segments.size() == net.units[0].segments.size());
}

TEST_CASE("checked-in bundled case matches the generator") {
    fs::path repo_case = fs::path(IES_SOURCE_DIR) / "cases" / "desk5";
    if (!fs::exists(repo_case / "manifest.json")) return;  // not generated yet
    fs::path fresh = temp_dir("case_repo");
    save_case(desk_case(), fresh);
    for (const char* f :
         {"manifest.json", "buses.csv", "lines.csv", "generators.csv", "timeseries.csv"}) {
        CHECK_MESSAGE(slurp(repo_case / f) == slurp(fresh / f), f);
    }
}

TEST_CASE("disconnected bus is reported by name") {
    NetworkCase net = desk_case();
    net.lines.pop_back();  // drops the only tie to B5
    fs::path dir = temp_dir("case_disc");
    save_case(net, dir);
    try {
        load_case(dir);
        FAIL("expected a validation error");
    } catch (const InputError& e) {
        CHECK(std::string(e.what()).find("B5") != std::string::npos);
        CHECK(std::string(e.what()).find("disconnected") != std::string::npos);
    }
}

TEST_CASE("short timeseries is a length error") {
    fs::path dir = temp_dir("case_short");
    save_case(desk_case(), dir);
    // Drop the last line of the timeseries.
    std::string text = slurp(dir / "timeseries.csv");
    size_t cut = text.rfind('\n', text.size() - 2);
    std::ofstream(dir / "timeseries.csv", std::ios::binary)
        << text.substr(0, cut + 1);
    try {
        load_case(dir);
        FAIL("expected a length error");
    } catch (const InputError& e) {
        CHECK(std::string(e.what()).find("8784") != std::string::npos);
    }
}

TEST_CASE("malformed numbers carry file, line, and column context") {
    fs::path dir = temp_dir("case_badnum");
    save_case(desk_case(), dir);
    std::string text = slurp(dir / "lines.csv");
    size_t pos = text.find("250");
    text.replace(pos, 3, "2x5");
    std::ofstream(dir / "lines.csv", std::ios::binary) << text;
    try {
        load_case(dir);
        FAIL("expected a parse error");
    } catch (const InputError& e) {
        std::string what = e.what();
        CHECK(what.find("lines.csv") != std::string::npos);
        CHECK(what.find(":2:") != std::string::npos);  // first data row
    }
}

TEST_CASE("price series round trip and ordering checks") {
    PriceSeries p;
    p.usd_per_mwh = {12.5, -3.25, 0.0, 101.875};
    fs::path file = temp_dir("prices") / "p.csv";
    save_prices(p, file);
    PriceSeries q = load_prices(file);
    CHECK(q.usd_per_mwh == p.usd_per_mwh);

    std::ofstream(file) << "hour,lmp_usd_per_mwh\n1,10\n2,20\n";
    CHECK_THROWS_AS(load_prices(file), InputError);
}

TEST_CASE("config defaults match the documented constants") {
    RunConfig cfg = parse_config_json("{}", "inline");
    CHECK(cfg.finance.discount_rate == 0.05);
    CHECK(cfg.finance.lifetime_years == 30);
    CHECK(cfg.finance.incentive_usd_per_mwh == 1e-3);
    CHECK(cfg.battery.degradation_coeff == 1e-4);
    CHECK(cfg.battery.charge_eff == 0.95);
    CHECK(cfg.battery.discharge_eff == 0.95);
    CHECK(cfg.dt_hr == 1.0);
    CHECK(cfg.market.mip_gap == 0.01);
    CHECK(cfg.market.shed_penalty_usd_per_mwh == 10000.0);
    CHECK(cfg.market.price_cap_usd_per_mwh == 10000.0);
    CHECK(cfg.scenario_count == 10);
    CHECK(cfg.bid_window_hr == 4);
    CHECK(cfg.wind_om_kusd_per_mw_yr == 42.0);
    CHECK(cfg.market.ies_visible_in_da == false);
}

TEST_CASE("unknown config keys are rejected with their path") {
    CHECK_THROWS_AS(parse_config_json("{\"bogus\": 1}", "inline"), InputError);
    try {
        parse_config_json("{\"finance\": {\"rate\": 0.05}}", "inline");
        FAIL("expected rejection");
    } catch (const InputError& e) {
        CHECK(std::string(e.what()).find("finance.rate") != std::string::npos);
    }
}

TEST_CASE("config serialization is stable under round trip") {
    RunConfig cfg = parse_config_json("{\"span_hours\": 336, \"seed\": 7}", "inline");
    std::string text = config_json(cfg);
    RunConfig again = parse_config_json(text, "inline");
    CHECK(config_hash(cfg) == config_hash(again));
    CHECK(again.span_hours == 336);
    CHECK(again.seed == 7u);
}

TEST_CASE("market log round trips through disk") {
    NetworkCase net = desk_case();
    WindAsset wind = desk_case_wind(net);
    BatteryDesign bat;
    bat.max_power_mw = 18.0;
    bat.duration_hr = 2.0;
    MarketLog log = run_simulation(net, wind, bat, SimMode::TiZeroCost, 24);
    REQUIRE(log.span_hours() == 24);
    fs::path dir = temp_dir("log");
    save_log(log, net, dir);
    MarketLog loaded = load_log(dir);
    REQUIRE(loaded.span_hours() == log.span_hours());
    CHECK(loaded.settlement_usd == log.settlement_usd);
    CHECK(loaded.ies_bus == log.ies_bus);
    for (int t = 0; t < log.span_hours(); ++t) {
        CHECK(loaded.outcomes[t].lmp_usd_per_mwh == log.outcomes[t].lmp_usd_per_mwh);
        CHECK(loaded.outcomes[t].flow_mw == log.outcomes[t].flow_mw);
        CHECK(loaded.ies_ops[t].total_sale_mw == log.ies_ops[t].total_sale_mw);
        CHECK(loaded.ies_states[t].soc_mwh == log.ies_states[t].soc_mwh);
    }
    // Summaries built from the two logs agree exactly.
    FinanceParams fin;
    TeaSummary a = summarize(log, bat, wind, fin);
    TeaSummary b = summarize(loaded, bat, wind, fin);
    CHECK(a.revenue_musd == b.revenue_musd);
    CHECK(a.sold_gwh == b.sold_gwh);
    CHECK(a.curtailment_gwh == b.curtailment_gwh);
}

TEST_CASE("run manifest records the config hash") {
    RunConfig cfg;
    fs::path dir = temp_dir("manifest");
    write_run_manifest(cfg, dir);
    std::string text = slurp(dir / "run_manifest.json");
    CHECK(text.find("config_hash") != std::string::npos);
    CHECK(text.find("iesmarket") != std::string::npos);
}

TEST_CASE("pt result files are written") {
    PriceSeries prices;
    prices.usd_per_mwh = {0.0, 100.0};
    WindAsset wind;
    wind.max_power_mw = 100.0;
    wind.capacity_factors = {1.0, 0.0};
    BatteryDesign bat;
    bat.max_power_mw = 100.0;
    bat.duration_hr = 1.0;
    BatteryBounds bounds;
    bounds.prototype = bat;
    FinanceParams fin;
    PtResult pt = pt_optimize(prices, wind, bounds, fin, bat);
    REQUIRE(pt.status == lp::Status::Optimal);
    fs::path dir = temp_dir("ptout");
    save_pt_result(pt, prices, dir);
    CHECK(fs::exists(dir / "result.json"));
    std::string sched = slurp(dir / "schedule.csv");
    CHECK(sched.find("hour,lmp_usd_per_mwh") == 0);
    // Header plus one row per hour.
    CHECK(std::count(sched.begin(), sched.end(), '\n') == 3);
}

TEST_CASE("bid curve audit log") {
    BidCurve c;
    c.hour = 5;
    c.points = {{0.0, 0.0}, {12.0, 30.0}};
    fs::path file = temp_dir("bids") / "curves.csv";
    save_bid_curves({c}, file);
    std::string text = slurp(file);
    CHECK(text.find("5,0,0") != std::string::npos);
    CHECK(text.find("5,12,30") != std::string::npos);
}
