//! Sweeps over (method, scheme, depth, temperature), result tables, figure
//! data, and the command-line front end.

pub mod cli;
mod config;
mod output;
mod sweep;

pub use config::{
    InstanceSource, Method, Start, SweepConfig, DEFAULT_DEPTHS, DEFAULT_STARTS, DEFAULT_TEMPERATURES, THREADS_ENV,
};
pub use output::{
    emit_csv, emit_fig_data, emit_json, fig_panels, fmt_sig, from_json, render_svg, to_csv, to_json, Figure,
    Panel, CSV_HEADER,
};
pub use sweep::{
    grid_points, partial_failure, run_point, run_sweep, PointFailure, SweepPoint, SweepRecord, SweepTable,
    TemperatureTvd,
};
