//! File formats, reports and the command-line driver for `operad-forge-core`.

pub mod cli;
pub mod format;
pub mod report;
pub mod sweeps;
