//! Command-line frontend: argument parsing, input loading, output
//! serialization, benchmarking and differential checking.

pub mod bench;
pub mod cli;
pub mod commands;
pub mod config;
pub mod differential;
pub mod engine;
pub mod error;
pub mod output;

pub use cli::Cli;
pub use commands::execute;
pub use config::{Algo, Format, Mode, RunConfig};
pub use error::CliError;
