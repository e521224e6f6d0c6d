//! Config-driven sweeps and cross-backend comparisons for `ambec`.

pub mod config;
pub mod run;

pub use config::{CompareSpec, ConfigError, ExperimentConfig, GridSpec, OutputSpec};
pub use run::{
    check, compare_csv, compare_text, presets_text, run_compare, run_sweep, sweep_csv, CompareOutcome, Overrides,
    RunError, Verdict, COMPARE_HEADER, CSV_HEADER,
};
