//! Configuration parsing and the `price`, `vrf`, `effdim` and `sweep`
//! experiment drivers behind the `vpoqmc` binary.

pub mod commands;
pub mod config;
pub mod error;

pub use commands::{execute, Command, Outcome};
pub use config::ExperimentConfig;
pub use error::CliError;
