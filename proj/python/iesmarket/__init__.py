"""Wind-battery integrated energy system market toolkit."""

from ._core import (  # noqa: F401
    BatteryDesign,
    InfeasibleTransition,
    InputError,
    FinanceParams,
    HourlyOperation,
    IesState,
    LinearModel,
    MarketLog,
    NetworkCase,
    PriceSeries,
    PtResult,
    Sense,
    SimMode,
    Status,
    TeaSummary,
    WindAsset,
    degraded_capacity,
    desk_case,
    desk_case_wind,
    load_case,
    load_prices,
    npv_factor,
    om_cost,
    pt_optimize,
    pt_revenue,
    run_simulation,
    save_case,
    soc_step,
    solve_lp,
    solve_milp,
    summarize_log,
    summarize_pt,
    tea_summary_json,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
