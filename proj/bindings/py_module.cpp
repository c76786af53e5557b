// Python bindings for the main operations: device model, solver, price
// taker, bidding, market simulation, and TEA summaries.
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "iesmarket/caseio.hpp"
#include "iesmarket/desk_case.hpp"
#include "iesmarket/market.hpp"
#include "iesmarket/price_taker.hpp"
#include "iesmarket/tea.hpp"

namespace py = pybind11;
using namespace ies;

PYBIND11_MODULE(_core, m) {
    m.doc() = "wind-battery integrated energy system market toolkit";

    py::register_exception<InputError>(m, "InputError");
    py::register_exception<InfeasibleTransition>(m, "InfeasibleTransition");
    py::register_exception<SolverError>(m, "SolverErrorEx");

    // Device model ----------------------------------------------------------
    py::class_<WindAsset>(m, "WindAsset")
        .def(py::init<>())
        .def_readwrite("max_power_mw", &WindAsset::max_power_mw)
        .def_readwrite("capacity_factors", &WindAsset::capacity_factors)
        .def_readwrite("om_cost_kusd_per_mw_yr", &WindAsset::om_cost_kusd_per_mw_yr);

    py::class_<BatteryDesign>(m, "BatteryDesign")
        .def(py::init<>())
        .def_readwrite("max_power_mw", &BatteryDesign::max_power_mw)
        .def_readwrite("duration_hr", &BatteryDesign::duration_hr)
        .def_readwrite("charge_eff", &BatteryDesign::charge_eff)
        .def_readwrite("discharge_eff", &BatteryDesign::discharge_eff)
        .def_readwrite("degradation_coeff", &BatteryDesign::degradation_coeff)
        .def_readwrite("om_cost_kusd_per_mwh_yr", &BatteryDesign::om_cost_kusd_per_mwh_yr)
        .def_readwrite("capex_kusd_per_kw", &BatteryDesign::capex_kusd_per_kw)
        .def("max_soc_mwh", &BatteryDesign::max_soc_mwh);

    py::class_<IesState>(m, "IesState")
        .def(py::init<>())
        .def_readwrite("soc_mwh", &IesState::soc_mwh)
        .def_readwrite("throughput_mwh", &IesState::throughput_mwh);

    py::class_<HourlyOperation>(m, "HourlyOperation")
        .def(py::init<>())
        .def_static("from_flows", &HourlyOperation::from_flows, py::arg("wind_used_mw"),
                    py::arg("charge_mw"), py::arg("discharge_mw"))
        .def_readwrite("wind_used_mw", &HourlyOperation::wind_used_mw)
        .def_readwrite("charge_mw", &HourlyOperation::charge_mw)
        .def_readwrite("discharge_mw", &HourlyOperation::discharge_mw)
        .def_readwrite("direct_sale_mw", &HourlyOperation::direct_sale_mw)
        .def_readwrite("total_sale_mw", &HourlyOperation::total_sale_mw);

    m.def("soc_step", &soc_step, py::arg("state"), py::arg("op"), py::arg("design"),
          py::arg("dt_hr") = 1.0);
    m.def("degraded_capacity", &degraded_capacity);
    m.def("om_cost", &om_cost);
    m.def("npv_factor", &npv_factor, py::arg("discount_rate"), py::arg("lifetime_years"));

    // Linear solver ----------------------------------------------------------
    py::enum_<lp::Sense>(m, "Sense")
        .value("LE", lp::Sense::LessEqual)
        .value("EQ", lp::Sense::Equal)
        .value("GE", lp::Sense::GreaterEqual);
    py::enum_<lp::Status>(m, "Status")
        .value("optimal", lp::Status::Optimal)
        .value("infeasible", lp::Status::Infeasible)
        .value("unbounded", lp::Status::Unbounded)
        .value("gap_limit", lp::Status::GapLimit);

    py::class_<lp::LinearModel>(m, "LinearModel")
        .def(py::init<>())
        .def("maximize", [](lp::LinearModel& mm) { mm.sense = lp::Objective::Maximize; })
        .def("add_variable", &lp::LinearModel::add_variable, py::arg("name"),
             py::arg("lower"), py::arg("upper"), py::arg("objective"),
             py::arg("integral") = false)
        .def("add_row", &lp::LinearModel::add_row, py::arg("sense"), py::arg("rhs"),
             py::arg("coefs"), py::arg("name") = "")
        .def("to_lp_text", &lp::LinearModel::to_lp_text);
    py::class_<lp::Solution>(m, "Solution")
        .def_readonly("status", &lp::Solution::status)
        .def_readonly("objective", &lp::Solution::objective)
        .def_readonly("primal", &lp::Solution::primal)
        .def_readonly("duals", &lp::Solution::duals)
        .def_readonly("mip_gap", &lp::Solution::mip_gap);
    m.def("solve_lp",
          [](const lp::LinearModel& model) { return lp::solve_lp(model); });
    m.def("solve_milp", [](const lp::LinearModel& model, double rel_gap) {
        lp::SolverSettings st;
        st.rel_gap = rel_gap;
        return lp::solve_milp(model, st);
    }, py::arg("model"), py::arg("rel_gap") = 0.01);

    // Price taker -------------------------------------------------------------
    py::class_<PriceSeries>(m, "PriceSeries")
        .def(py::init<>())
        .def_readwrite("usd_per_mwh", &PriceSeries::usd_per_mwh);
    py::class_<FinanceParams>(m, "FinanceParams")
        .def(py::init<>())
        .def_readwrite("discount_rate", &FinanceParams::discount_rate)
        .def_readwrite("lifetime_years", &FinanceParams::lifetime_years)
        .def_readwrite("incentive_usd_per_mwh", &FinanceParams::incentive_usd_per_mwh);
    py::class_<PtResult>(m, "PtResult")
        .def_readonly("status", &PtResult::status)
        .def_readonly("design", &PtResult::design)
        .def_readonly("schedule", &PtResult::schedule)
        .def_readonly("revenue_usd", &PtResult::revenue_usd)
        .def_readonly("om_usd_per_yr", &PtResult::om_usd_per_yr)
        .def_readonly("capex_usd", &PtResult::capex_usd)
        .def_readonly("npv_usd", &PtResult::npv_usd);
    m.def("pt_optimize",
          [](const PriceSeries& prices, const WindAsset& wind, const BatteryDesign& proto,
             const FinanceParams& fin, std::optional<BatteryDesign> fixed,
             double power_max, double duration_max) {
              BatteryBounds bounds;
              bounds.prototype = proto;
              bounds.power_max_mw = power_max;
              bounds.duration_max_hr = duration_max;
              return pt_optimize(prices, wind, bounds, fin, fixed);
          },
          py::arg("prices"), py::arg("wind"), py::arg("prototype"), py::arg("finance"),
          py::arg("fixed_design") = std::nullopt, py::arg("power_max_mw") = 0.0,
          py::arg("duration_max_hr") = 0.0);
    m.def("pt_revenue", &revenue, py::arg("prices"), py::arg("schedule"),
          py::arg("incentive_usd_per_mwh"), py::arg("dt_hr") = 1.0);

    // Market ------------------------------------------------------------------
    py::class_<NetworkCase>(m, "NetworkCase")
        .def_readonly("name", &NetworkCase::name)
        .def_readonly("horizon_hours", &NetworkCase::horizon_hours)
        .def_readonly("ies_bus", &NetworkCase::ies_bus)
        .def_readonly("ies_wind_cf", &NetworkCase::ies_wind_cf)
        .def("validate", &NetworkCase::validate);
    py::enum_<SimMode>(m, "SimMode")
        .value("ti_zero_cost", SimMode::TiZeroCost)
        .value("tv_bidding", SimMode::TvBidding)
        .value("wind_only_ti", SimMode::WindOnlyTi)
        .value("wind_only_tv", SimMode::WindOnlyTv);
    py::class_<MarketLog>(m, "MarketLog")
        .def("span_hours", &MarketLog::span_hours)
        .def("total_settlement_usd", &MarketLog::total_settlement_usd)
        .def("ies_bus_prices", &MarketLog::ies_bus_prices)
        .def_readonly("ies_ops", &MarketLog::ies_ops)
        .def_readonly("settlement_usd", &MarketLog::settlement_usd)
        .def_readonly("notes", &MarketLog::notes);
    m.def("desk_case", &desk_case);
    m.def("desk_case_wind", &desk_case_wind);
    m.def("load_case", &load_case, py::arg("dir"));
    m.def("save_case", &save_case, py::arg("case"), py::arg("dir"));
    m.def("load_prices", &load_prices, py::arg("csv"));
    m.def("run_simulation",
          [](const NetworkCase& net, const WindAsset& wind, const BatteryDesign& design,
             SimMode mode, int span_hours) {
              return run_simulation(net, wind, design, mode, span_hours);
          },
          py::arg("case"), py::arg("wind"), py::arg("design"), py::arg("mode"),
          py::arg("span_hours"));

    // TEA ----------------------------------------------------------------------
    py::class_<TeaSummary>(m, "TeaSummary")
        .def_readonly("mode", &TeaSummary::mode)
        .def_readonly("available_gwh", &TeaSummary::available_gwh)
        .def_readonly("sold_gwh", &TeaSummary::sold_gwh)
        .def_readonly("curtailment_gwh", &TeaSummary::curtailment_gwh)
        .def_readonly("battery_loss_gwh", &TeaSummary::battery_loss_gwh)
        .def_readonly("soc_gain_gwh", &TeaSummary::soc_gain_gwh)
        .def_readonly("revenue_musd", &TeaSummary::revenue_musd)
        .def_readonly("om_musd_per_yr", &TeaSummary::om_musd_per_yr)
        .def_readonly("capex_musd", &TeaSummary::capex_musd)
        .def_readonly("npv_musd", &TeaSummary::npv_musd)
        .def_readonly("lmp_received", &TeaSummary::lmp_received)
        .def_readonly("high_lmp_hours", &TeaSummary::high_lmp_hours)
        .def_readonly("histogram_counts", &TeaSummary::histogram_counts);
    m.def("summarize_pt",
          [](const PtResult& pt, const PriceSeries& prices, const WindAsset& wind,
             const FinanceParams& fin) { return summarize(pt, prices, wind, fin); });
    m.def("summarize_log",
          [](const MarketLog& log, const BatteryDesign& design, const WindAsset& wind,
             const FinanceParams& fin) { return summarize(log, design, wind, fin); });
    m.def("tea_summary_json", &tea_summary_json);
}
