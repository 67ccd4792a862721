//! Experiment orchestration for `ucblab-core`: configs, seeded parallel
//! replications, slope fits against `ln n`, and file output.

pub mod bounds;
pub mod config;
pub mod error;
pub mod experiment;
pub mod index_table;
pub mod oracle_check;
pub mod output;
pub mod slope;

pub use config::{ArmSpec, ExperimentConfig, Scenario, TargetMode};
pub use error::{HarnessError, Result};
pub use experiment::{run_experiment, RegretCurve};
pub use output::{csv_string, emit_csv};
pub use slope::{fit_slope, SlopeFit};
