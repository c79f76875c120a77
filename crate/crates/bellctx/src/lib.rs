//! File formats, report rendering, a rayon executor and the subcommands of
//! the `bellctx` command-line tool, on top of `bellctx-core`.

pub mod commands;
pub mod error;
pub mod output;
pub mod parallel;
pub mod schema;

pub use error::CliError;
