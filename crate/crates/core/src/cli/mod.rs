//! Batch front end: scenario configs, the verification suite and exports.

pub mod checks;
pub mod config;
pub mod report;
pub mod run;

pub use checks::{registry, CheckSpec};
pub use config::{Format, GridConfig, OutputConfig, Scenario, ScenarioConfig};
pub use report::{CheckResult, VerificationReport};
pub use run::{execute, run_plotdata, run_spectrum, run_verify, Command, PlotData, RunOptions, SpectrumTable, DEFAULT_SEED};
