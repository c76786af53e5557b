// CSV/JSON persistence for cases, prices, logs, summaries, and configs.
#include "iesmarket/caseio.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"

namespace ies {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Shortest round-trip representation keeps re-serialization byte-identical.
std::string fmt(double x) {
    char buf[32];
    auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, p);
}

std::string fmt(int x) { return std::to_string(x); }

struct Csv {
    std::string file;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;  // row index 0 = line 2

    int column(const std::string& name, bool required = true) const {
        for (size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return static_cast<int>(i);
        if (required)
            throw InputError(file + ": missing column '" + name + "'");
        return -1;
    }
    const std::string& cell(size_t row, int col) const { return rows[row][col]; }
    std::string where(size_t row, int col) const {
        return file + ":" + std::to_string(row + 2) + ":" + header[col];
    }
    double num(size_t row, int col) const {
        const std::string& s = rows[row][col];
        if (s.empty()) throw InputError(where(row, col) + ": empty numeric field");
        double v = 0.0;
        auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || p != s.data() + s.size())
            throw InputError(where(row, col) + ": bad number '" + s + "'");
        return v;
    }
    double num_or(size_t row, int col, double fallback) const {
        if (col < 0 || rows[row][col].empty()) return fallback;
        return num(row, col);
    }
    int integer(size_t row, int col) const {
        double v = num(row, col);
        if (v != std::floor(v)) throw InputError(where(row, col) + ": expected integer");
        return static_cast<int>(v);
    }
};

Csv read_csv(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path.string());
    Csv csv;
    csv.file = path.string();
    std::string line;
    bool first = true;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> fields;
        size_t pos = 0;
        for (;;) {
            size_t comma = line.find(',', pos);
            fields.push_back(line.substr(pos, comma == std::string::npos
                                                  ? std::string::npos
                                                  : comma - pos));
            if (comma == std::string::npos) break;
            pos = comma + 1;
        }
        if (first) {
            csv.header = std::move(fields);
            first = false;
        } else {
            if (fields.size() != csv.header.size())
                throw InputError(csv.file + ":" + std::to_string(line_no) +
                                 ": expected " + std::to_string(csv.header.size()) +
                                 " fields, found " + std::to_string(fields.size()));
            csv.rows.push_back(std::move(fields));
        }
    }
    if (first) throw InputError(path.string() + ": empty file");
    return csv;
}

void write_lines(const fs::path& path, const std::vector<std::string>& lines) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write " + path.string());
    for (const auto& l : lines) out << l << "\n";
}

json read_json(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw InputError(path.string() + ": " + e.what());
    }
    return j;
}

void write_json(const fs::path& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write " + path.string());
    out << j.dump(2) << "\n";
}

int find_bus(const NetworkCase& net, const std::string& id, const std::string& ctx) {
    for (size_t b = 0; b < net.buses.size(); ++b)
        if (net.buses[b].id == id) return static_cast<int>(b);
    throw InputError(ctx + ": unknown bus '" + id + "'");
}

}  // namespace

NetworkCase load_case(const fs::path& dir) {
    json man = read_json(dir / "manifest.json");
    NetworkCase net;
    try {
        net.name = man.at("name").get<std::string>();
        net.base_mva = man.at("base_mva").get<double>();
        net.horizon_hours = man.at("horizon_hours").get<int>();
    } catch (const json::exception& e) {
        throw InputError(dir.string() + "/manifest.json: " + e.what());
    }
    const json& files = man.at("files");

    Csv buses = read_csv(dir / files.at("buses").get<std::string>());
    int c_bus = buses.column("bus_id"), c_loadcol = buses.column("load_column");
    for (size_t r = 0; r < buses.rows.size(); ++r)
        net.buses.push_back({buses.cell(r, c_bus), buses.cell(r, c_loadcol)});
    net.reference_bus = find_bus(net, man.at("reference_bus").get<std::string>(), "manifest");
    net.ies_bus = find_bus(net, man.at("ies_bus").get<std::string>(), "manifest");

    Csv lines = read_csv(dir / files.at("lines").get<std::string>());
    {
        int c_id = lines.column("line_id"), c_from = lines.column("from_bus");
        int c_to = lines.column("to_bus"), c_b = lines.column("susceptance_pu");
        int c_lim = lines.column("limit_mw");
        for (size_t r = 0; r < lines.rows.size(); ++r) {
            Line l;
            l.id = lines.cell(r, c_id);
            l.from_bus = find_bus(net, lines.cell(r, c_from), lines.where(r, c_from));
            l.to_bus = find_bus(net, lines.cell(r, c_to), lines.where(r, c_to));
            l.susceptance_pu = lines.num(r, c_b);
            l.limit_mw = lines.num(r, c_lim);
            net.lines.push_back(l);
        }
    }

    Csv gens = read_csv(dir / files.at("generators").get<std::string>());
    {
        int c_id = gens.column("unit_id"), c_bus2 = gens.column("bus_id");
        int c_kind = gens.column("kind"), c_pmin = gens.column("pmin_mw");
        int c_pmax = gens.column("pmax_mw"), c_ramp = gens.column("ramp_mw_per_hr");
        int c_up = gens.column("min_up_hr"), c_dn = gens.column("min_down_hr");
        int c_su = gens.column("startup_cost_usd");
        int c_nl = gens.column("no_load_cost_usd_per_hr");
        int c_ion = gens.column("init_on"), c_ih = gens.column("init_hours");
        int c_ip = gens.column("init_power_mw"), c_cf = gens.column("cf_column");
        for (size_t r = 0; r < gens.rows.size(); ++r) {
            const std::string kind = gens.cell(r, c_kind);
            if (kind == "thermal") {
                ThermalUnit u;
                u.id = gens.cell(r, c_id);
                u.bus = find_bus(net, gens.cell(r, c_bus2), gens.where(r, c_bus2));
                u.pmin_mw = gens.num(r, c_pmin);
                u.pmax_mw = gens.num(r, c_pmax);
                u.ramp_mw_per_hr = gens.num(r, c_ramp);
                u.min_up_hr = gens.integer(r, c_up);
                u.min_down_hr = gens.integer(r, c_dn);
                u.startup_cost_usd = gens.num(r, c_su);
                u.no_load_cost_usd_per_hr = gens.num(r, c_nl);
                u.init_on = gens.integer(r, c_ion) != 0;
                u.init_hours = gens.integer(r, c_ih);
                u.init_power_mw = gens.num(r, c_ip);
                for (int k = 1; k <= 4; ++k) {
                    int cw = gens.column("seg" + std::to_string(k) + "_mw", false);
                    int cp = gens.column("seg" + std::to_string(k) + "_usd_per_mwh", false);
                    if (cw < 0 || cp < 0 || gens.cell(r, cw).empty()) break;
                    u.segments.push_back({gens.num(r, cw), gens.num(r, cp)});
                }
                net.units.push_back(std::move(u));
            } else if (kind == "renewable") {
                RenewableUnit u;
                u.id = gens.cell(r, c_id);
                u.bus = find_bus(net, gens.cell(r, c_bus2), gens.where(r, c_bus2));
                u.max_power_mw = gens.num(r, c_pmax);
                u.cf_column = gens.cell(r, c_cf);
                if (u.cf_column.empty())
                    throw InputError(gens.where(r, c_cf) + ": renewable needs a cf column");
                net.renewables.push_back(std::move(u));
            } else {
                throw InputError(gens.where(r, c_kind) + ": unknown kind '" + kind + "'");
            }
        }
    }

    Csv ts = read_csv(dir / files.at("timeseries").get<std::string>());
    if (static_cast<int>(ts.rows.size()) != net.horizon_hours)
        throw InputError(ts.file + ": expected " + std::to_string(net.horizon_hours) +
                         " hourly rows, found " + std::to_string(ts.rows.size()));
    int c_hour = ts.column("hour");
    for (size_t r = 0; r < ts.rows.size(); ++r)
        if (ts.integer(r, c_hour) != static_cast<int>(r))
            throw InputError(ts.where(r, c_hour) + ": hours must start at 0 and increase");
    net.bus_load_mw.resize(net.buses.size());
    for (size_t b = 0; b < net.buses.size(); ++b) {
        if (net.buses[b].load_column.empty()) continue;
        int col = ts.column(net.buses[b].load_column);
        auto& v = net.bus_load_mw[b];
        v.resize(ts.rows.size());
        for (size_t r = 0; r < ts.rows.size(); ++r) v[r] = ts.num(r, col);
    }
    net.renewable_cf.resize(net.renewables.size());
    for (size_t j = 0; j < net.renewables.size(); ++j) {
        int col = ts.column(net.renewables[j].cf_column);
        auto& v = net.renewable_cf[j];
        v.resize(ts.rows.size());
        for (size_t r = 0; r < ts.rows.size(); ++r) v[r] = ts.num(r, col);
    }
    {
        int col = ts.column(man.at("ies_wind_column").get<std::string>());
        net.ies_wind_cf.resize(ts.rows.size());
        for (size_t r = 0; r < ts.rows.size(); ++r) net.ies_wind_cf[r] = ts.num(r, col);
    }
    net.validate();
    return net;
}

void save_case(const NetworkCase& net, const fs::path& dir) {
    fs::create_directories(dir);
    json man;
    man["name"] = net.name;
    man["base_mva"] = net.base_mva;
    man["horizon_hours"] = net.horizon_hours;
    man["reference_bus"] = net.buses[net.reference_bus].id;
    man["ies_bus"] = net.buses[net.ies_bus].id;
    man["ies_wind_column"] = "cf_ies_wind";
    man["files"] = {{"buses", "buses.csv"},
                    {"lines", "lines.csv"},
                    {"generators", "generators.csv"},
                    {"timeseries", "timeseries.csv"}};
    write_json(dir / "manifest.json", man);

    std::vector<std::string> out{"bus_id,load_column"};
    for (const auto& b : net.buses) out.push_back(b.id + "," + b.load_column);
    write_lines(dir / "buses.csv", out);

    out = {"line_id,from_bus,to_bus,susceptance_pu,limit_mw"};
    for (const auto& l : net.lines)
        out.push_back(l.id + "," + net.buses[l.from_bus].id + "," + net.buses[l.to_bus].id +
                      "," + fmt(l.susceptance_pu) + "," + fmt(l.limit_mw));
    write_lines(dir / "lines.csv", out);

    out = {"unit_id,bus_id,kind,pmin_mw,pmax_mw,ramp_mw_per_hr,min_up_hr,min_down_hr,"
           "startup_cost_usd,no_load_cost_usd_per_hr,init_on,init_hours,init_power_mw,"
           "cf_column,seg1_mw,seg1_usd_per_mwh,seg2_mw,seg2_usd_per_mwh,seg3_mw,"
           "seg3_usd_per_mwh,seg4_mw,seg4_usd_per_mwh"};
    for (const auto& u : net.units) {
        std::string row = u.id + "," + net.buses[u.bus].id + ",thermal," + fmt(u.pmin_mw) +
                          "," + fmt(u.pmax_mw) + "," + fmt(u.ramp_mw_per_hr) + "," +
                          fmt(u.min_up_hr) + "," + fmt(u.min_down_hr) + "," +
                          fmt(u.startup_cost_usd) + "," + fmt(u.no_load_cost_usd_per_hr) +
                          "," + fmt(u.init_on ? 1 : 0) + "," + fmt(u.init_hours) + "," +
                          fmt(u.init_power_mw) + ",";
        for (int k = 0; k < 4; ++k) {
            row += ",";
            if (k < static_cast<int>(u.segments.size()))
                row += fmt(u.segments[k].width_mw) + "," +
                       fmt(u.segments[k].price_usd_per_mwh);
            else
                row += ",";
        }
        out.push_back(row);
    }
    for (const auto& u : net.renewables) {
        std::string row = u.id + "," + net.buses[u.bus].id + ",renewable,0," +
                          fmt(u.max_power_mw) + ",0,1,1,0,0,0,1,0," + u.cf_column;
        for (int k = 0; k < 4; ++k) row += ",,";
        out.push_back(row);
    }
    write_lines(dir / "generators.csv", out);

    std::string header = "hour";
    for (const auto& b : net.buses)
        if (!b.load_column.empty()) header += "," + b.load_column;
    for (const auto& r : net.renewables) header += "," + r.cf_column;
    header += ",cf_ies_wind";
    out = {header};
    for (int h = 0; h < net.horizon_hours; ++h) {
        std::string row = fmt(h);
        for (size_t b = 0; b < net.buses.size(); ++b)
            if (!net.buses[b].load_column.empty()) row += "," + fmt(net.bus_load_mw[b][h]);
        for (size_t r = 0; r < net.renewables.size(); ++r)
            row += "," + fmt(net.renewable_cf[r][h]);
        row += "," + fmt(net.ies_wind_cf[h]);
        out.push_back(row);
    }
    write_lines(dir / "timeseries.csv", out);
}

PriceSeries load_prices(const fs::path& csv) {
    Csv c = read_csv(csv);
    int c_hour = c.column("hour"), c_lmp = c.column("lmp_usd_per_mwh");
    PriceSeries p;
    for (size_t r = 0; r < c.rows.size(); ++r) {
        if (c.integer(r, c_hour) != static_cast<int>(r))
            throw InputError(c.where(r, c_hour) + ": hours must start at 0 and increase");
        double v = c.num(r, c_lmp);
        if (!std::isfinite(v)) throw InputError(c.where(r, c_lmp) + ": non-finite price");
        p.usd_per_mwh.push_back(v);
    }
    return p;
}

void save_prices(const PriceSeries& prices, const fs::path& csv) {
    std::vector<std::string> out{"hour,lmp_usd_per_mwh"};
    for (int t = 0; t < prices.size(); ++t)
        out.push_back(fmt(t) + "," + fmt(prices[t]));
    write_lines(csv, out);
}

void save_log(const MarketLog& log, const NetworkCase& net, const fs::path& dir) {
    fs::create_directories(dir);
    json sum;
    sum["first_hour"] = log.first_hour;
    sum["span_hours"] = log.span_hours();
    sum["ies_bus"] = log.ies_bus;
    sum["total_settlement_usd"] = log.total_settlement_usd();
    sum["notes"] = log.notes;
    json ids;
    for (const auto& b : net.buses) ids["buses"].push_back(b.id);
    for (const auto& u : net.units) ids["units"].push_back(u.id);
    for (const auto& r : net.renewables) ids["renewables"].push_back(r.id);
    for (const auto& l : net.lines) ids["lines"].push_back(l.id);
    sum["ids"] = ids;
    write_json(dir / "summary.json", sum);

    std::string header = "hour";
    for (const auto& b : net.buses) header += ",lmp_" + b.id;
    for (const auto& u : net.units) header += ",u_" + u.id;
    for (const auto& u : net.units) header += ",p_" + u.id;
    for (const auto& r : net.renewables) header += ",r_" + r.id;
    for (const auto& l : net.lines) header += ",flow_" + l.id;
    for (const auto& b : net.buses) header += ",shed_" + b.id;
    header += ",ies_cleared_mw,ies_wind_used_mw,ies_charge_mw,ies_discharge_mw,"
              "ies_direct_mw,ies_total_mw,ies_soc_mwh,ies_throughput_mwh,"
              "ies_shortfall_mw,settlement_usd";
    std::vector<std::string> out{header};
    for (int t = 0; t < log.span_hours(); ++t) {
        const MarketOutcome& o = log.outcomes[t];
        std::string row = fmt(o.hour);
        for (double v : o.lmp_usd_per_mwh) row += "," + fmt(v);
        for (size_t g = 0; g < net.units.size(); ++g)
            row += "," + fmt(static_cast<int>(log.committed[g][t]));
        for (double v : o.unit_mw) row += "," + fmt(v);
        for (double v : o.renewable_mw) row += "," + fmt(v);
        for (double v : o.flow_mw) row += "," + fmt(v);
        for (double v : o.shed_mw) row += "," + fmt(v);
        const HourlyOperation& op = log.ies_ops[t];
        row += "," + fmt(o.ies_cleared_mw) + "," + fmt(op.wind_used_mw) + "," +
               fmt(op.charge_mw) + "," + fmt(op.discharge_mw) + "," +
               fmt(op.direct_sale_mw) + "," + fmt(op.total_sale_mw) + "," +
               fmt(log.ies_states[t].soc_mwh) + "," + fmt(log.ies_states[t].throughput_mwh) +
               "," + fmt(log.shortfall_mw[t]) + "," + fmt(log.settlement_usd[t]);
        out.push_back(row);
    }
    write_lines(dir / "log.csv", out);
    if (!log.bid_curves.empty()) save_bid_curves(log.bid_curves, dir / "bids.csv");
}

MarketLog load_log(const fs::path& dir) {
    json sum = read_json(dir / "summary.json");
    MarketLog log;
    log.first_hour = sum.at("first_hour").get<int>();
    log.ies_bus = sum.at("ies_bus").get<int>();
    for (const auto& n : sum.at("notes")) log.notes.push_back(n.get<std::string>());
    std::vector<std::string> buses, units, renews, lines;
    for (const auto& v : sum.at("ids").at("buses")) buses.push_back(v.get<std::string>());
    for (const auto& v : sum.at("ids").at("units")) units.push_back(v.get<std::string>());
    for (const auto& v : sum.at("ids").at("renewables"))
        renews.push_back(v.get<std::string>());
    for (const auto& v : sum.at("ids").at("lines")) lines.push_back(v.get<std::string>());

    Csv c = read_csv(dir / "log.csv");
    log.committed.assign(units.size(), {});
    for (size_t r = 0; r < c.rows.size(); ++r) {
        MarketOutcome o;
        o.hour = c.integer(r, c.column("hour"));
        for (const auto& b : buses)
            o.lmp_usd_per_mwh.push_back(c.num(r, c.column("lmp_" + b)));
        for (size_t g = 0; g < units.size(); ++g)
            log.committed[g].push_back(
                static_cast<uint8_t>(c.integer(r, c.column("u_" + units[g]))));
        for (const auto& u : units) o.unit_mw.push_back(c.num(r, c.column("p_" + u)));
        for (const auto& j : renews) o.renewable_mw.push_back(c.num(r, c.column("r_" + j)));
        for (const auto& l : lines) o.flow_mw.push_back(c.num(r, c.column("flow_" + l)));
        for (const auto& b : buses) o.shed_mw.push_back(c.num(r, c.column("shed_" + b)));
        o.ies_cleared_mw = c.num(r, c.column("ies_cleared_mw"));
        HourlyOperation op;
        op.wind_used_mw = c.num(r, c.column("ies_wind_used_mw"));
        op.charge_mw = c.num(r, c.column("ies_charge_mw"));
        op.discharge_mw = c.num(r, c.column("ies_discharge_mw"));
        op.direct_sale_mw = c.num(r, c.column("ies_direct_mw"));
        op.total_sale_mw = c.num(r, c.column("ies_total_mw"));
        log.ies_ops.push_back(op);
        log.ies_states.push_back({c.num(r, c.column("ies_soc_mwh")),
                                  c.num(r, c.column("ies_throughput_mwh"))});
        log.shortfall_mw.push_back(c.num(r, c.column("ies_shortfall_mw")));
        log.settlement_usd.push_back(c.num(r, c.column("settlement_usd")));
        log.outcomes.push_back(std::move(o));
    }
    return log;
}

void save_pt_result(const PtResult& pt, const PriceSeries& prices, const fs::path& dir) {
    fs::create_directories(dir);
    json j;
    j["status"] = pt.status == lp::Status::Optimal ? "optimal" : "failed";
    j["battery_power_mw"] = pt.design.max_power_mw;
    j["battery_duration_hr"] = pt.design.duration_hr;
    j["battery_max_soc_mwh"] = pt.design.max_soc_mwh();
    j["revenue_usd"] = pt.revenue_usd;
    j["om_usd_per_yr"] = pt.om_usd_per_yr;
    j["capex_usd"] = pt.capex_usd;
    j["npv_usd"] = pt.npv_usd;
    j["objective_usd"] = pt.objective_usd;
    j["horizon_hours"] = static_cast<int>(pt.schedule.size());
    write_json(dir / "result.json", j);

    std::vector<std::string> out{
        "hour,lmp_usd_per_mwh,wind_used_mw,charge_mw,discharge_mw,direct_sale_mw,"
        "total_sale_mw,soc_mwh,throughput_mwh"};
    IesState s;
    for (size_t t = 0; t < pt.schedule.size(); ++t) {
        const HourlyOperation& op = pt.schedule[t];
        s.soc_mwh += pt.design.charge_eff * op.charge_mw -
                     op.discharge_mw / pt.design.discharge_eff;
        s.throughput_mwh += 0.5 * (op.charge_mw + op.discharge_mw);
        out.push_back(fmt(static_cast<int>(t)) + "," + fmt(prices[static_cast<int>(t)]) +
                      "," + fmt(op.wind_used_mw) + "," + fmt(op.charge_mw) + "," +
                      fmt(op.discharge_mw) + "," + fmt(op.direct_sale_mw) + "," +
                      fmt(op.total_sale_mw) + "," + fmt(s.soc_mwh) + "," +
                      fmt(s.throughput_mwh));
    }
    write_lines(dir / "schedule.csv", out);
}

namespace {

json summary_to_json(const TeaSummary& s) {
    json j;
    j["mode"] = s.mode;
    j["battery_duration_hr"] = s.battery_duration_hr;
    j["battery_power_ratio"] = s.battery_power_ratio;
    j["available_gwh"] = s.available_gwh;
    j["sold_gwh"] = s.sold_gwh;
    j["curtailment_gwh"] = s.curtailment_gwh;
    j["battery_loss_gwh"] = s.battery_loss_gwh;
    j["soc_gain_gwh"] = s.soc_gain_gwh;
    j["revenue_musd"] = s.revenue_musd;
    j["om_musd_per_yr"] = s.om_musd_per_yr;
    j["capex_musd"] = s.capex_musd;
    j["npv_musd"] = s.npv_musd;
    j["lmp_bus_time_avg"] = s.lmp_bus_time_avg;
    j["lmp_bus_load_wtd"] = s.lmp_bus_load_wtd;
    if (s.lmp_received) j["lmp_received"] = *s.lmp_received;
    else j["lmp_received"] = nullptr;
    j["high_lmp_hours"] = s.high_lmp_hours;
    j["high_lmp_sold_gwh"] = s.high_lmp_sold_gwh;
    j["histogram_edges"] = s.histogram_edges;
    j["histogram_counts"] = s.histogram_counts;
    j["span_hours"] = s.span_hours;
    j["annualized"] = s.annualized;
    j["annualization_scale"] = s.annualization_scale;
    return j;
}

}  // namespace

std::string tea_summary_json(const TeaSummary& s) { return summary_to_json(s).dump(2); }

void save_summary(const TeaSummary& s, const fs::path& file) {
    write_json(file, summary_to_json(s));
}

void save_sweep(const SweepGrid& grid, const fs::path& dir) {
    fs::create_directories(dir);
    // Long format for plotting.
    std::vector<std::string> longcsv{"mode,power_ratio,duration_hr,metric,value"};
    auto emit = [&](const SweepCell& c, const std::string& metric, double v) {
        longcsv.push_back(c.mode + "," + fmt(c.power_ratio) + "," + fmt(c.duration_hr) +
                          "," + metric + "," + fmt(v));
    };
    json cells = json::array();
    for (const auto& c : grid.cells) {
        json jc;
        jc["mode"] = c.mode;
        jc["power_ratio"] = c.power_ratio;
        jc["duration_hr"] = c.duration_hr;
        jc["ok"] = c.ok;
        if (!c.ok) jc["error"] = c.error;
        else jc["summary"] = summary_to_json(c.summary);
        cells.push_back(jc);
        if (!c.ok) continue;
        emit(c, "npv_musd", c.summary.npv_musd);
        emit(c, "revenue_musd", c.summary.revenue_musd);
        emit(c, "sold_gwh", c.summary.sold_gwh);
        emit(c, "curtailment_gwh", c.summary.curtailment_gwh);
    }
    write_json(dir / "cells.json", {{"span_hours", grid.spec.span_hours},
                                    {"cells", cells}});
    write_lines(dir / "sweep_long.csv", longcsv);

    // One matrix per mode and metric: rows = power ratios, cols = durations.
    for (const auto& mode : grid.spec.modes) {
        for (const std::string metric : {"npv_musd", "revenue_musd"}) {
            std::string header = "power_ratio";
            for (double d : grid.spec.durations_hr) header += ",dur_" + fmt(d) + "h";
            std::vector<std::string> out{header};
            for (double r : grid.spec.power_ratios) {
                std::string row = fmt(r);
                for (double d : grid.spec.durations_hr) {
                    const SweepCell* c = grid.find(mode, r, d);
                    double v = c && c->ok
                                   ? (metric == "npv_musd" ? c->summary.npv_musd
                                                           : c->summary.revenue_musd)
                                   : std::nan("");
                    row += "," + (std::isnan(v) ? std::string("") : fmt(v));
                }
                out.push_back(row);
            }
            write_lines(dir / (mode + "_" + metric + ".csv"), out);
        }
    }
    // Difference grids (pt - mo) when both modes are present.
    bool has_pt = false, has_mo = false;
    for (const auto& m : grid.spec.modes) {
        has_pt = has_pt || m == "pt";
        has_mo = has_mo || m == "mo";
    }
    if (has_pt && has_mo) {
        for (const std::string metric : {"npv_musd", "revenue_musd"}) {
            std::string header = "power_ratio";
            for (double d : grid.spec.durations_hr) header += ",dur_" + fmt(d) + "h";
            std::vector<std::string> out{header};
            for (double r : grid.spec.power_ratios) {
                std::string row = fmt(r);
                for (double d : grid.spec.durations_hr) {
                    const SweepCell* a = grid.find("pt", r, d);
                    const SweepCell* b = grid.find("mo", r, d);
                    if (a && b && a->ok && b->ok) {
                        double va = metric == "npv_musd" ? a->summary.npv_musd
                                                         : a->summary.revenue_musd;
                        double vb = metric == "npv_musd" ? b->summary.npv_musd
                                                         : b->summary.revenue_musd;
                        row += "," + fmt(va - vb);
                    } else {
                        row += ",";
                    }
                }
                out.push_back(row);
            }
            write_lines(dir / ("diff_pt_minus_mo_" + metric + ".csv"), out);
        }
    }
}

void save_bid_curves(const std::vector<BidCurve>& curves, const fs::path& csv) {
    std::vector<std::string> out{"hour,price_usd_per_mwh,power_mw"};
    for (const auto& c : curves)
        for (const auto& [price, power] : c.points)
            out.push_back(fmt(c.hour) + "," + fmt(price) + "," + fmt(power));
    write_lines(csv, out);
}

// --- run configuration -------------------------------------------------------

SimOptions RunConfig::sim_options() const {
    SimOptions o;
    o.market = market;
    o.bidding.dt_hr = dt_hr;
    o.bidding.terminal_soc_value_usd_per_mwh = terminal_soc_value_usd_per_mwh;
    o.scenario_count = scenario_count;
    o.bid_window_hr = bid_window_hr;
    o.fallback_price_usd_per_mwh = fallback_price_usd_per_mwh;
    return o;
}

WindAsset RunConfig::wind_asset(const NetworkCase& net) const {
    WindAsset w;
    w.max_power_mw = wind_max_power_mw;
    w.om_cost_kusd_per_mw_yr = wind_om_kusd_per_mw_yr;
    w.capacity_factors = net.ies_wind_cf;
    return w;
}

namespace {

void reject_unknown(const json& j, const std::vector<std::string>& allowed,
                    const std::string& path) {
    for (const auto& [key, _] : j.items()) {
        bool ok = false;
        for (const auto& a : allowed) ok = ok || a == key;
        if (!ok) throw InputError("config: unknown key '" + path + key + "'");
    }
}

template <typename T>
void fetch(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

RunConfig parse_config_json(const std::string& text, const std::string& origin) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw InputError(origin + ": " + e.what());
    }
    RunConfig cfg;
    reject_unknown(j, {"case_dir", "mode", "span_hours", "seed", "out_dir", "jobs",
                       "dt_hr", "finance", "battery", "wind", "market", "bidding"},
                   "");
    fetch(j, "case_dir", cfg.case_dir);
    fetch(j, "mode", cfg.mode);
    fetch(j, "span_hours", cfg.span_hours);
    fetch(j, "seed", cfg.seed);
    fetch(j, "out_dir", cfg.out_dir);
    fetch(j, "jobs", cfg.jobs);
    fetch(j, "dt_hr", cfg.dt_hr);
    if (j.contains("finance")) {
        const json& f = j["finance"];
        reject_unknown(f, {"discount_rate", "lifetime_years", "incentive_usd_per_mwh"},
                       "finance.");
        fetch(f, "discount_rate", cfg.finance.discount_rate);
        fetch(f, "lifetime_years", cfg.finance.lifetime_years);
        fetch(f, "incentive_usd_per_mwh", cfg.finance.incentive_usd_per_mwh);
    }
    if (j.contains("battery")) {
        const json& b = j["battery"];
        reject_unknown(b, {"power_mw", "duration_hr", "charge_eff", "discharge_eff",
                           "degradation_coeff", "om_cost_kusd_per_mwh_yr",
                           "capex_kusd_per_kw"},
                       "battery.");
        fetch(b, "power_mw", cfg.battery.max_power_mw);
        fetch(b, "duration_hr", cfg.battery.duration_hr);
        fetch(b, "charge_eff", cfg.battery.charge_eff);
        fetch(b, "discharge_eff", cfg.battery.discharge_eff);
        fetch(b, "degradation_coeff", cfg.battery.degradation_coeff);
        fetch(b, "om_cost_kusd_per_mwh_yr", cfg.battery.om_cost_kusd_per_mwh_yr);
        fetch(b, "capex_kusd_per_kw", cfg.battery.capex_kusd_per_kw);
    }
    if (j.contains("wind")) {
        const json& w = j["wind"];
        reject_unknown(w, {"max_power_mw", "om_cost_kusd_per_mw_yr"}, "wind.");
        fetch(w, "max_power_mw", cfg.wind_max_power_mw);
        fetch(w, "om_cost_kusd_per_mw_yr", cfg.wind_om_kusd_per_mw_yr);
    }
    if (j.contains("market")) {
        const json& m = j["market"];
        reject_unknown(m, {"mip_gap", "shed_penalty_usd_per_mwh", "price_cap_usd_per_mwh",
                           "da_lookahead_hours", "ies_visible_in_da", "uc_node_budget"},
                       "market.");
        fetch(m, "mip_gap", cfg.market.mip_gap);
        fetch(m, "shed_penalty_usd_per_mwh", cfg.market.shed_penalty_usd_per_mwh);
        fetch(m, "price_cap_usd_per_mwh", cfg.market.price_cap_usd_per_mwh);
        fetch(m, "da_lookahead_hours", cfg.market.da_lookahead_hours);
        fetch(m, "ies_visible_in_da", cfg.market.ies_visible_in_da);
        fetch(m, "uc_node_budget", cfg.market.uc_node_budget);
    }
    if (j.contains("bidding")) {
        const json& b = j["bidding"];
        reject_unknown(b, {"scenario_count", "window_hours",
                           "terminal_soc_value_usd_per_mwh", "fallback_price_usd_per_mwh"},
                       "bidding.");
        fetch(b, "scenario_count", cfg.scenario_count);
        fetch(b, "window_hours", cfg.bid_window_hr);
        fetch(b, "terminal_soc_value_usd_per_mwh", cfg.terminal_soc_value_usd_per_mwh);
        fetch(b, "fallback_price_usd_per_mwh", cfg.fallback_price_usd_per_mwh);
    }
    return cfg;
}

RunConfig load_config(const fs::path& file) {
    std::ifstream in(file);
    if (!in) throw InputError("cannot open " + file.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config_json(buf.str(), file.string());
}

std::string config_json(const RunConfig& cfg) {
    json j;
    j["case_dir"] = cfg.case_dir;
    j["mode"] = cfg.mode;
    j["span_hours"] = cfg.span_hours;
    j["seed"] = cfg.seed;
    j["out_dir"] = cfg.out_dir;
    j["jobs"] = cfg.jobs;
    j["dt_hr"] = cfg.dt_hr;
    j["finance"] = {{"discount_rate", cfg.finance.discount_rate},
                    {"lifetime_years", cfg.finance.lifetime_years},
                    {"incentive_usd_per_mwh", cfg.finance.incentive_usd_per_mwh}};
    j["battery"] = {{"power_mw", cfg.battery.max_power_mw},
                    {"duration_hr", cfg.battery.duration_hr},
                    {"charge_eff", cfg.battery.charge_eff},
                    {"discharge_eff", cfg.battery.discharge_eff},
                    {"degradation_coeff", cfg.battery.degradation_coeff},
                    {"om_cost_kusd_per_mwh_yr", cfg.battery.om_cost_kusd_per_mwh_yr},
                    {"capex_kusd_per_kw", cfg.battery.capex_kusd_per_kw}};
    j["wind"] = {{"max_power_mw", cfg.wind_max_power_mw},
                 {"om_cost_kusd_per_mw_yr", cfg.wind_om_kusd_per_mw_yr}};
    j["market"] = {{"mip_gap", cfg.market.mip_gap},
                   {"shed_penalty_usd_per_mwh", cfg.market.shed_penalty_usd_per_mwh},
                   {"price_cap_usd_per_mwh", cfg.market.price_cap_usd_per_mwh},
                   {"da_lookahead_hours", cfg.market.da_lookahead_hours},
                   {"ies_visible_in_da", cfg.market.ies_visible_in_da},
                   {"uc_node_budget", cfg.market.uc_node_budget}};
    j["bidding"] = {{"scenario_count", cfg.scenario_count},
                    {"window_hours", cfg.bid_window_hr},
                    {"terminal_soc_value_usd_per_mwh", cfg.terminal_soc_value_usd_per_mwh},
                    {"fallback_price_usd_per_mwh", cfg.fallback_price_usd_per_mwh}};
    return j.dump(2);
}

uint64_t config_hash(const RunConfig& cfg) {
    // FNV-1a over the canonical serialization.
    const std::string s = config_json(cfg);
    uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

void write_run_manifest(const RunConfig& cfg, const fs::path& out_dir) {
    fs::create_directories(out_dir);
    json j;
    j["tool"] = "iesmarket";
    j["version"] = "0.1.0";
    j["seed"] = cfg.seed;
    char hex[32];
    std::snprintf(hex, sizeof(hex), "%016llx",
                  static_cast<unsigned long long>(config_hash(cfg)));
    j["config_hash"] = std::string(hex);
    j["config"] = json::parse(config_json(cfg));
    write_json(out_dir / "run_manifest.json", j);
}

}  // namespace ies
