//! Scenario configs, named presets, parameter sweeps and result emission for
//! the `nsopo` command line.

pub mod config;
pub mod error;
pub mod output;
pub mod presets;
pub mod run;
pub mod sweep;

pub use config::ScenarioConfig;
pub use error::{HarnessError, Result};
pub use output::{write_run, Format};
pub use presets::{preset, PRESETS};
pub use run::{run, RunResult};
pub use sweep::{sweep, Axis, SweepTable};
