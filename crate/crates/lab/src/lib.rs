//! Std companion to `nw-core`: thread-pool execution, IDX/MNIST ingestion,
//! JSON run configs, CSV and SVG output, and the verification suite behind
//! the `nw` command-line tool.

pub mod config;
pub mod idx;
pub mod mnist;
pub mod report;
pub mod runner;
pub mod verify_suite;

pub use runner::{threads_from_env, RayonRunner, THREADS_ENV};
