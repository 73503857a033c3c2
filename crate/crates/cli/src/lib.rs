//! Parameter sweeps over the driven-dissipative pipelines, written as CSV.

pub mod config;
pub mod error;
pub mod sweep;

pub use config::{parse_config, Sweep, SweepConfig, SweepPoint, SweepVariable};
pub use error::CliError;
pub use sweep::{emit_csv, format_csv, run_sweep, run_sweep_with, Row, CSV_HEADER};
