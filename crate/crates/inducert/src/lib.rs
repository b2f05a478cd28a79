//! Input/output, Monte Carlo and the command line around `inducert-core`.
//!
//! * [`json`]: certificate and kernel-handle JSON.
//! * [`sampler`]: `W`-random graphs and density estimates with jackknife
//!   errors.
//! * [`config`]: `key = value` run configuration.
//! * [`cli`]: the `inducert` command.

pub mod approx;
pub mod cli;
pub mod config;
pub mod json;
pub mod sampler;

pub use inducert_core as core;
