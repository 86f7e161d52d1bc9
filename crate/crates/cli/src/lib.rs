//! Experiments, file formats and the command-line front end for
//! [`wavspec_core`].

pub mod config;
pub mod io;
pub mod report;
pub mod run;
pub mod studies;

pub use config::RunConfig;
pub use run::{run_estimate, OutputOptions};
