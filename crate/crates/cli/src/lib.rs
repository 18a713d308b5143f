//! Command-line driver for `warpgeom-core`: run configuration, field and
//! report file formats, and the `verify`, `solve`, `audit` and `report`
//! subcommands.

pub mod commands;
pub mod config;
pub mod error;
pub mod fieldio;
pub mod report;

pub use commands::{build_surface, cmd_audit, cmd_report, cmd_solve, cmd_verify, identity_rows, Options};
pub use config::RunConfig;
pub use error::{CliError, Result};
