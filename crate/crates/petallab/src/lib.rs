//! Command-line laboratory around `petallab-core`: a rayon executor, file
//! formats, JSON reports and the `petallab` command.

pub mod cli;
pub mod config;
pub mod exec;
pub mod io;
pub mod report;

pub use exec::RayonExecutor;
