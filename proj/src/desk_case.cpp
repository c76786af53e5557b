// Bundled case construction. All series are closed-form seeded synthetics
// rounded to three decimals so the on-disk CSVs stay stable.
#include "iesmarket/desk_case.hpp"

#include <cmath>
#include <random>

namespace ies {

namespace {

constexpr int kHours = 8784;  // leap year
constexpr double kPi = 3.14159265358979323846;

double round3(double x) { return std::round(x * 1000.0) / 1000.0; }

// Smooth pseudo-weather: sum of incommensurate sinusoids, deterministic.
double weather_wave(int h, double phase) {
    return 0.5 * std::sin(2.0 * kPi * h / 37.3 + phase) +
           0.3 * std::sin(2.0 * kPi * h / 179.7 + 2.1 * phase) +
           0.2 * std::sin(2.0 * kPi * h / 523.1 + 0.7 * phase);
}

}  // namespace

NetworkCase desk_case() {
    NetworkCase net;
    net.name = "desk5";
    net.base_mva = 100.0;
    net.horizon_hours = kHours;

    net.buses = {{"B1", "load_B1"},
                 {"B2", "load_B2"},
                 {"B3", "load_B3"},
                 {"B4", "load_B4"},
                 {"B5", "load_B5"}};
    net.reference_bus = 0;
    net.ies_bus = 4;

    net.lines = {{"L12", 0, 1, 20.0, 250.0}, {"L13", 0, 2, 20.0, 250.0},
                 {"L23", 1, 2, 15.0, 200.0}, {"L24", 1, 3, 15.0, 150.0},
                 {"L34", 2, 3, 15.0, 150.0}, {"L35", 2, 4, 25.0, 38.0}};

    auto unit = [](std::string id, int bus, double pmin, double pmax, double ramp,
                   int up, int dn, double startup, double noload,
                   std::vector<CostSegment> segs, bool on, int hours, double p0) {
        ThermalUnit u;
        u.id = std::move(id);
        u.bus = bus;
        u.pmin_mw = pmin;
        u.pmax_mw = pmax;
        u.ramp_mw_per_hr = ramp;
        u.min_up_hr = up;
        u.min_down_hr = dn;
        u.startup_cost_usd = startup;
        u.no_load_cost_usd_per_hr = noload;
        u.segments = std::move(segs);
        u.init_on = on;
        u.init_hours = hours;
        u.init_power_mw = p0;
        return u;
    };
    net.units.push_back(unit("base1", 0, 80, 300, 120, 8, 8, 12000, 400,
                             {{150, 14}, {150, 16}}, true, 24, 220));
    net.units.push_back(unit("mid1", 1, 40, 180, 90, 4, 4, 5000, 250,
                             {{90, 20}, {90, 24}}, true, 12, 90));
    net.units.push_back(unit("mid2", 2, 30, 150, 100, 3, 3, 3000, 180,
                             {{75, 27}, {75, 33}}, false, 6, 0));
    net.units.push_back(unit("peak1", 3, 10, 90, 90, 1, 1, 800, 60,
                             {{45, 55}, {45, 85}}, false, 12, 0));
    net.units.push_back(unit("peak2", 1, 5, 60, 60, 1, 1, 400, 30,
                             {{30, 140}, {30, 480}}, false, 24, 0));

    net.renewables.push_back({"solar1", 3, 60.0, "cf_solar1"});

    // Load shape: double daily hump, weekday factor, seasonal swing, noise.
    std::mt19937_64 rng(20200101);
    std::normal_distribution<double> noise(0.0, 1.0);
    const double shares[5] = {0.25, 0.30, 0.25, 0.15, 0.05};
    net.bus_load_mw.assign(5, std::vector<double>(kHours, 0.0));
    net.renewable_cf.assign(1, std::vector<double>(kHours, 0.0));
    net.ies_wind_cf.assign(kHours, 0.0);

    double ar_load = 0.0, ar_wind = 0.0;
    for (int h = 0; h < kHours; ++h) {
        int hod = h % 24;
        int dow = (h / 24) % 7;
        double day_frac = 2.0 * kPi * (h % 24) / 24.0;
        double season = 2.0 * kPi * h / static_cast<double>(kHours);

        double daily = 0.62 + 0.16 * std::sin(day_frac - 2.4) +
                       0.12 * std::sin(2.0 * day_frac - 1.2);
        double weekly = dow >= 5 ? 0.88 : 1.0;
        double seasonal = 1.0 + 0.14 * std::cos(2.0 * season) - 0.05 * std::cos(season);
        ar_load = 0.97 * ar_load + 0.03 * noise(rng);
        double system = 560.0 * daily * weekly * seasonal * (1.0 + 1.1 * ar_load);
        system = std::max(210.0, std::min(745.0, system));
        for (int b = 0; b < 5; ++b) net.bus_load_mw[b][h] = round3(system * shares[b]);

        // Solar: clear-sky bell with weather dips.
        double sun = std::max(0.0, std::sin(kPi * (hod - 6) / 12.0));
        double cloud = 0.75 + 0.25 * weather_wave(h, 1.3);
        net.renewable_cf[0][h] = round3(std::clamp(sun * sun * cloud, 0.0, 1.0));

        // Wind: nocturnal bias plus multi-day weather systems.
        ar_wind = 0.985 * ar_wind + 0.015 * noise(rng);
        double diurnal = 0.52 - 0.16 * std::sin(day_frac - 1.1);
        double wave = 0.38 * weather_wave(h, 4.7);
        double wind = diurnal + wave + 0.9 * ar_wind;
        net.ies_wind_cf[h] = round3(std::clamp(wind, 0.01, 0.98));
    }
    net.validate();
    return net;
}

WindAsset desk_case_wind(const NetworkCase& net) {
    WindAsset w;
    w.max_power_mw = 80.0;
    w.om_cost_kusd_per_mw_yr = 42.0;
    w.capacity_factors = net.ies_wind_cf;
    return w;
}

}  // namespace ies
