//! Configuration, orchestration, eigenpair cache and reports for the
//! `turnpoint` verification suites.

pub mod cache;
pub mod config;
pub mod report;
pub mod suite;

pub use cache::DiskCache;
pub use config::{ConfigError, ModelConfig, SuiteConfig, Tolerances};
pub use report::{export, Bound, CheckRecord, Environment, Format, PlotTable, Status, VerificationReport};
pub use suite::{run_suite, RunOptions, Stage};
