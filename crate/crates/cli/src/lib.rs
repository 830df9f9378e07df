//! Experiment harness for the `revlb` solver: configuration files, sweep
//! drivers, convergence tables and order fits.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod experiments;
pub mod oracle;
pub mod record;

pub use config::ExperimentConfig;
pub use record::{estimate_order, ConvergenceRecord, ConvergenceRow, OrderFit};
