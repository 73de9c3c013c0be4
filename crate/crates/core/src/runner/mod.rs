//! Configuration, figure scenarios, parameter sweeps and CSV export.

mod config;
mod scenarios;
mod sweep;
mod table;

pub use config::{
    beta_state, load_config, write_config, DriveConfig, GeometryConfig, InitialState, NamedState, Observable,
    ScenarioConfig, SweepAxis, SweepConfig, TimeConfig, SWEEPABLE,
};
pub use scenarios::{run_scenario, run_scenario_config, scenario_defaults, SCENARIOS, SMALL_TRANSIENT_OPTIMUM};
pub use sweep::{
    auto_horizon, axis_column, evaluate, sweep, sweep_with_workers, time_grid, transient_peak, worker_count, Extremum,
    SweepPoint, SweepResult, TransientPeak, DEFAULT_STEADY_OUTPUTS,
};
pub use table::{format_float, write_tables, Table};
