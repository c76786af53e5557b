// Command-line entry points: validate, pt-optimize, simulate, sweep,
// report, and make-case.
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "iesmarket/caseio.hpp"
#include "iesmarket/desk_case.hpp"
#include "iesmarket/market.hpp"
#include "iesmarket/price_taker.hpp"
#include "iesmarket/tea.hpp"

namespace fs = std::filesystem;
using namespace ies;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitSolver = 2;

// Span strings: plain hours, or day/week/year suffixes ("36h", "7d", "2w",
// "1y", "full").
int parse_span(const std::string& text, int horizon) {
    if (text.empty() || text == "full") return horizon;
    char suffix = text.back();
    std::string digits = std::isalpha(static_cast<unsigned char>(suffix))
                             ? text.substr(0, text.size() - 1)
                             : text;
    int value = std::stoi(digits);
    switch (suffix) {
        case 'd': return value * 24;
        case 'w': return value * 24 * 7;
        case 'y': return horizon;
        case 'h':
        default: return value;
    }
}

RunConfig make_config(const std::string& config_path) {
    RunConfig cfg;
    if (!config_path.empty()) cfg = load_config(config_path);
    if (const char* env = std::getenv("IESMARKET_OUT_DIR")) cfg.out_dir = env;
    if (const char* env = std::getenv("IESMARKET_JOBS")) cfg.jobs = std::atoi(env);
    return cfg;
}

PriceSeries reference_prices(const NetworkCase& net, const RunConfig& cfg, int span,
                             const std::string& prices_csv) {
    if (!prices_csv.empty()) {
        PriceSeries p = load_prices(prices_csv);
        if (p.size() < span)
            throw InputError("price series shorter than the requested span");
        p.usd_per_mwh.resize(span);
        return p;
    }
    // The time-invariant wind-only run sets the reference signal.
    BatteryDesign none;
    WindAsset wind = cfg.wind_asset(net);
    MarketLog base = run_simulation(net, wind, none, SimMode::WindOnlyTi, span,
                                    cfg.sim_options());
    if (base.span_hours() < span)
        throw SolverError("reference simulation aborted: " +
                          (base.notes.empty() ? std::string("unknown") : base.notes.back()));
    return base.ies_bus_prices();
}

int cmd_validate(const std::string& case_dir) {
    try {
        NetworkCase net = load_case(case_dir);
        std::cout << "case '" << net.name << "': " << net.buses.size() << " buses, "
                  << net.lines.size() << " lines, " << net.units.size()
                  << " thermal units, " << net.renewables.size() << " renewables, "
                  << net.horizon_hours << " hours\n";
        std::cout << "validation: ok\n";
        return kExitOk;
    } catch (const InputError& e) {
        std::cerr << "validation failed: " << e.what() << "\n";
        return kExitInput;
    }
}

int cmd_make_case(const std::string& out_dir) {
    NetworkCase net = desk_case();
    save_case(net, out_dir);
    std::cout << "wrote bundled case to " << out_dir << "\n";
    return kExitOk;
}

int cmd_pt_optimize(const RunConfig& cfg, const std::string& span_text,
                    const std::string& prices_csv, bool co_optimize) {
    NetworkCase net = load_case(cfg.case_dir);
    int span = parse_span(span_text, net.horizon_hours);
    WindAsset wind = cfg.wind_asset(net);
    wind.capacity_factors.resize(span);
    PriceSeries prices = reference_prices(net, cfg, span, prices_csv);

    BatteryBounds bounds;
    bounds.prototype = cfg.battery;
    std::optional<BatteryDesign> fixed;
    if (co_optimize) {
        bounds.power_max_mw = wind.max_power_mw;  // up to a unit power ratio
        bounds.duration_max_hr = 10.0;
    } else {
        fixed = cfg.battery;
    }
    PtOptions po;
    po.dt_hr = cfg.dt_hr;
    if (!cfg.market.dump_lp_dir.empty())
        po.dump_lp_path = cfg.market.dump_lp_dir + "/pt.lp";
    PtResult pt = pt_optimize(prices, wind, bounds, cfg.finance, fixed, po);
    if (pt.status != lp::Status::Optimal) {
        std::cerr << "price-taker solve failed\n";
        return kExitSolver;
    }
    fs::path out = fs::path(cfg.out_dir) / "pt";
    save_pt_result(pt, prices, out);
    save_prices(prices, out / "prices.csv");
    TeaSummary s = summarize(pt, prices, wind, cfg.finance);
    save_summary(s, out / "summary.json");
    write_run_manifest(cfg, out);
    std::cout << "battery " << pt.design.max_power_mw << " MW x "
              << pt.design.duration_hr << " h, revenue " << pt.revenue_usd / 1e6
              << " M$, npv " << pt.npv_usd / 1e6 << " M$\n"
              << "results in " << out.string() << "\n";
    return kExitOk;
}

int cmd_simulate(const RunConfig& cfg, const std::string& mode_text,
                 const std::string& span_text) {
    NetworkCase net = load_case(cfg.case_dir);
    int span = parse_span(span_text, net.horizon_hours);
    SimMode mode = parse_sim_mode(mode_text.empty() ? cfg.mode : mode_text);
    WindAsset wind = cfg.wind_asset(net);
    BatteryDesign design = cfg.battery;
    if (mode == SimMode::WindOnlyTi || mode == SimMode::WindOnlyTv) {
        design.max_power_mw = 0.0;
        design.duration_hr = 0.0;
    }
    MarketLog log = run_simulation(net, wind, design, mode, span, cfg.sim_options());
    fs::path out = fs::path(cfg.out_dir) / ("sim_" + sim_mode_name(mode));
    save_log(log, net, out);
    TeaSummary s = summarize(log, design, wind, cfg.finance);
    s.mode = sim_mode_name(mode);
    save_summary(s, out / "tea_summary.json");
    write_run_manifest(cfg, out);
    if (log.span_hours() < span) {
        std::cerr << "simulation aborted after " << log.span_hours() << " hours: "
                  << (log.notes.empty() ? std::string("unknown") : log.notes.back())
                  << "\n";
        return kExitSolver;
    }
    std::cout << "simulated " << log.span_hours() << " hours, settlement "
              << log.total_settlement_usd() / 1e6 << " M$, results in " << out.string()
              << "\n";
    return kExitOk;
}

int cmd_sweep(const RunConfig& cfg, const std::string& span_text,
              const std::string& modes_text, const std::string& grid_text,
              const std::string& prices_csv) {
    NetworkCase net = load_case(cfg.case_dir);
    int span = parse_span(span_text, net.horizon_hours);
    WindAsset wind = cfg.wind_asset(net);

    SweepSpec spec;
    spec.span_hours = span;
    spec.jobs = cfg.jobs;
    spec.modes.clear();
    for (size_t pos = 0; pos < modes_text.size();) {
        size_t comma = modes_text.find(',', pos);
        spec.modes.push_back(modes_text.substr(
            pos, comma == std::string::npos ? std::string::npos : comma - pos));
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    if (grid_text == "coarse") {
        spec.power_ratios = {0.1, 0.5, 1.0};
        spec.durations_hr = {2.0, 10.0};
    }  // "paper" keeps the full 10x5 grid

    PriceSeries prices;
    const PriceSeries* prices_ptr = nullptr;
    bool needs_pt = false;
    for (const auto& m : spec.modes) needs_pt = needs_pt || m == "pt";
    if (needs_pt) {
        prices = reference_prices(net, cfg, span, prices_csv);
        prices_ptr = &prices;
    }

    SweepGrid grid = sweep(net, wind, cfg.battery, cfg.finance, spec, cfg.sim_options(),
                           prices_ptr);
    fs::path out = fs::path(cfg.out_dir) / "sweep";
    save_sweep(grid, out);
    write_run_manifest(cfg, out);
    int failures = 0;
    for (const auto& c : grid.cells)
        if (!c.ok) ++failures;
    std::cout << "sweep: " << grid.cells.size() << " cells, " << failures
              << " failures, results in " << out.string() << "\n";
    return failures == 0 ? kExitOk : kExitSolver;
}

int cmd_report(const RunConfig& cfg, const std::string& log_dir) {
    MarketLog log = load_log(log_dir);
    NetworkCase net = load_case(cfg.case_dir);
    WindAsset wind = cfg.wind_asset(net);
    TeaSummary s = summarize(log, cfg.battery, wind, cfg.finance);
    fs::path out = fs::path(cfg.out_dir) / "report";
    fs::create_directories(out);
    save_summary(s, out / "tea_summary.json");
    std::cout << tea_summary_json(s) << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"wind-battery market co-simulation toolkit"};
    app.require_subcommand(1);

    std::string config_path, case_dir, span_text, mode_text, prices_csv, log_dir;
    std::string modes_text = "pt,mo", grid_text = "paper", out_dir;
    int jobs = 0;
    bool co_optimize = false;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "JSON run configuration");
        cmd->add_option("--case", case_dir, "network case directory");
        cmd->add_option("--out", out_dir, "output directory");
        cmd->add_option("--jobs", jobs, "parallel workers for sweeps");
    };

    CLI::App* validate = app.add_subcommand("validate", "check a network case directory");
    validate->add_option("case_dir", case_dir, "network case directory")->required();

    CLI::App* makecase =
        app.add_subcommand("make-case", "write the bundled desk-scale case");
    makecase->add_option("--out", out_dir, "destination directory")->required();

    CLI::App* pt = app.add_subcommand("pt-optimize", "price-taker optimization");
    add_common(pt);
    pt->add_option("--span", span_text, "horizon (e.g. 7d, 336h, full)");
    pt->add_option("--prices", prices_csv, "LMP series CSV (hour,lmp_usd_per_mwh)");
    pt->add_flag("--co-optimize", co_optimize, "size the battery as well");

    CLI::App* sim = app.add_subcommand("simulate", "market co-simulation");
    add_common(sim);
    sim->add_option("--mode", mode_text, "ti|tv|wind-only-ti|wind-only-tv");
    sim->add_option("--span", span_text, "horizon (e.g. 14d, full)");

    CLI::App* sw = app.add_subcommand("sweep", "battery design sweep");
    add_common(sw);
    sw->add_option("--span", span_text, "per-cell horizon (default 7d)");
    sw->add_option("--modes", modes_text, "comma list of pt,mo");
    sw->add_option("--grid", grid_text, "paper|coarse");
    sw->add_option("--prices", prices_csv, "price series for pt cells");

    CLI::App* rep = app.add_subcommand("report", "re-summarize a stored market log");
    add_common(rep);
    rep->add_option("--log", log_dir, "log directory")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (validate->parsed()) return cmd_validate(case_dir);
        if (makecase->parsed()) return cmd_make_case(out_dir);

        RunConfig cfg = make_config(config_path);
        if (!case_dir.empty()) cfg.case_dir = case_dir;
        if (!out_dir.empty()) cfg.out_dir = out_dir;
        if (jobs > 0) cfg.jobs = jobs;

        if (pt->parsed()) return cmd_pt_optimize(cfg, span_text, prices_csv, co_optimize);
        if (sim->parsed()) return cmd_simulate(cfg, mode_text, span_text);
        if (sw->parsed())
            return cmd_sweep(cfg, span_text.empty() ? "7d" : span_text, modes_text,
                             grid_text, prices_csv);
        if (rep->parsed()) return cmd_report(cfg, log_dir);
    } catch (const InputError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInput;
    } catch (const SolverError& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return kExitSolver;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    }
    return kExitInput;
}
