//! Experiment driver for the dyadic paraproduct library.
//!
//! Every experiment is a pure function of an [`config::ExperimentConfig`]:
//! each trial derives its own seeded stream from `(seed, trial)`, so reports
//! are bit-stable across runs with equal configuration.

pub mod config;
pub mod ensemble;
pub mod report;
pub mod suites;
