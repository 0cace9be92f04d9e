//! Batched pure-exploration Gaussian-process bandit optimization.
//!
//! This crate implements black-box maximization over a finite candidate set
//! using GP confidence bounds, organized around batch algorithms that reveal
//! observations only at batch boundaries:
//!
//! * [`kernels`] — squared-exponential and Matérn covariance functions;
//! * [`gp`] — exact posterior inference with incremental factor updates;
//! * [`conf`] — exploration coefficients and UCB/LCB arithmetic;
//! * [`schedule`] — pre-specified batch-length sequences (doubling-exponent,
//!   constant-batch-count, fixed-equal);
//! * [`policy`] — the batched pure-exploration algorithm, its full-posterior
//!   variant, and a sequential GP-UCB baseline;
//! * [`env`] — synthetic benchmark environments with exact regret oracles;
//! * [`diag`] — information-gain computations and elimination-gap bounds;
//! * [`harness`] — multi-trial experiment runner with CSV output.
//!
//! The `gpbpe` binary exposes the harness as a CLI; see the README.

pub mod conf;
pub mod diag;
pub mod env;
pub mod error;
pub mod gp;
pub mod harness;
pub mod kernels;
pub mod policy;
pub mod schedule;
pub mod selftest;

mod chol;
mod util;

pub use conf::{BetaMode, ConfidenceConfig};
pub use env::{Environment, PeakStyle};
pub use error::{Error, Result};
pub use gp::{GPModel, PosteriorTracker};
pub use kernels::{KernelFamily, KernelSpec};
pub use policy::{ActiveDomain, PolicyConfig, PolicyVariant, RunRecord, StepRecord, TieBreak};
pub use schedule::{BatchSchedule, ScheduleKind};
