//! File formats, instance generation, parallel solving and the benchmark
//! runner behind the `jrp` command-line tool.

pub mod bench;
pub mod format;
pub mod generate;
pub mod parallel;

pub use parallel::solve_parallel;
