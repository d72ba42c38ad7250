//! Scenario files and the `scrap` command line.
//!
//! A run is computed entirely in memory ([`runner::run`]) and only then
//! rendered to files, so a failing run never leaves partial output behind.

// Range checks are written so that NaN fails them.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod output;
pub mod runner;
pub mod scenarios;

pub use config::{OutputFormat, PhysicalPass, QubitInput, ScenarioConfig, ScenarioKind, SurfaceConfig};
pub use error::{RunError, EXIT_CONFIG, EXIT_INTEGRATOR};
pub use output::{format_number, Table};
pub use runner::{run, Metrics, RunOutput, Summary};
pub use scenarios::{bundled, list_scenarios, resolve, SCENARIO_DIR_ENV};

/// Environment variable for the default output directory.
pub const OUT_DIR_ENV: &str = "SCRAP_OUT_DIR";
