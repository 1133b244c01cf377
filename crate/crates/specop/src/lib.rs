//! File formats, parallel drivers and the `specop` command line around
//! [`specop_core`].

pub mod cli;
pub mod error;
pub mod experiment;
pub mod export;
pub mod io;
pub mod manifest;
pub mod parallel;
pub mod pipeline;

pub use error::{CliError, CliResult};
pub use specop_core as core;
