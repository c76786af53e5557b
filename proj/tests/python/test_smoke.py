"""Smoke tests for the python bindings."""
import math

import pytest

import iesmarket as ies


def test_npv_factor():
    assert abs(ies.npv_factor(0.05, 30) - 15.3724) < 1e-4


def test_soc_step_round_trip():
    design = ies.BatteryDesign()
    design.max_power_mw = 100.0
    design.duration_hr = 2.0
    state = ies.IesState()
    op = ies.HourlyOperation.from_flows(100.0, 100.0, 0.0)
    nxt = ies.soc_step(state, op, design)
    assert nxt.soc_mwh == pytest.approx(95.0)
    assert nxt.throughput_mwh == pytest.approx(50.0)
    with pytest.raises(ies.InfeasibleTransition):
        ies.soc_step(state, ies.HourlyOperation.from_flows(0.0, 0.0, 10.0), design)


def test_small_lp():
    m = ies.LinearModel()
    m.maximize()
    x = m.add_variable("x", 0.0, math.inf, 1.0)
    m.add_row(ies.Sense.LE, 3.0, [(x, 1.0)])
    sol = ies.solve_lp(m)
    assert sol.status == ies.Status.optimal
    assert sol.objective == pytest.approx(3.0)
    assert sol.duals[0] == pytest.approx(1.0)


def test_pt_two_hour_toy():
    prices = ies.PriceSeries()
    prices.usd_per_mwh = [0.0, 100.0]
    wind = ies.WindAsset()
    wind.max_power_mw = 100.0
    wind.capacity_factors = [1.0, 0.0]
    bat = ies.BatteryDesign()
    bat.max_power_mw = 100.0
    bat.duration_hr = 1.0
    fin = ies.FinanceParams()
    res = ies.pt_optimize(prices, wind, bat, fin, fixed_design=bat)
    assert res.status == ies.Status.optimal
    assert res.revenue_usd == pytest.approx(100.001 * 90.25, rel=1e-9)


def test_desk_case_short_simulation():
    net = ies.desk_case()
    net.validate()
    wind = ies.desk_case_wind(net)
    bat = ies.BatteryDesign()  # zero size
    log = ies.run_simulation(net, wind, bat, ies.SimMode.wind_only_ti, 24)
    assert log.span_hours() == 24
    summary = ies.summarize_log(log, bat, wind, ies.FinanceParams())
    total = (summary.sold_gwh + summary.curtailment_gwh + summary.battery_loss_gwh
             + summary.soc_gain_gwh)
    assert total == pytest.approx(summary.available_gwh, rel=1e-6)
