//! Command-line and HTTP front ends for `mfscp-core`.

pub mod commands;
pub mod run;
pub mod service;

pub use commands::{run as run_cli, Cli};
pub use run::{run_solve, SolveConfig, SolveReport, SolveRun, SCHEMA_VERSION};
pub use service::{router, ServiceConfig};
