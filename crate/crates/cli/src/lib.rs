//! Experiment runner for the qcongest simulator: configuration, seeded
//! instance generation, the four run commands, and report emission.

pub mod config;
pub mod gen;
pub mod report;
pub mod runner;

pub use config::{Enforcement, GraphSource, RunConfig};
pub use report::{ApspReport, BenchReport, FindEdgesReport, VerifyReport};
pub use runner::{bench_rounds, run_apsp, run_find_edges, verify_lemmas};
