//! Configuration-driven sweeps, model-vs-simulation validation and
//! figure data.

mod config;
mod plots;
mod sweep;
mod validate;

pub use config::{
    apply_override, log_grid, Aggregation, Axis, AxisSpec, Grid, Mode, OdeOptions, RankBy, SimOptions, SweepConfig,
    TraceOptions, ValidateOptions, DEFAULT_ROUNDS,
};
pub use plots::{emit_plot_data, plot_tables, Figure, Table};
pub use sweep::{
    ode_point, prepare_trace, run_sweep, run_sweep_with, scenario_name, sim_horizon, write_manifest, write_points_csv,
    write_report, Manifest, PointResult, PreparedTrace, SweepReport,
};
pub use validate::{relative_error, validate_model, Comparison, ErrorStats, ValidationSummary};
