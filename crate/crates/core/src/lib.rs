//! Age of information for a bufferless single server with preemptive
//! push-out (GI/GI/1/1-PO).
//!
//! The crate has three layers:
//!
//! * [`dist`]: positive-support laws for interarrival and service times,
//!   their moments, sampling, and the pairwise quantities `P(X > S)`,
//!   `E(X ∧ S)` and the partial/conditional means that feed the closed forms.
//! * [`sim`]: a regenerative sample-path simulator that integrates the
//!   relative age `Δ(t)` and the classical age `AoI(t)` exactly over each
//!   departure-to-departure cycle, plus ratio estimators with confidence
//!   intervals.
//! * [`analytic`]: closed-form stationary averages (relative age, age,
//!   cycle length, throughput) and the deterministic/exponential special
//!   cases.
//!
//! The crate is `no_std` and only needs `alloc`.
#![no_std]
#![forbid(unsafe_code)]
// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod analytic;
pub mod dist;
mod error;
pub mod quad;
pub mod sim;
pub mod special;

pub use analytic::AnalyticReport;
pub use dist::{DistributionSpec, Method, OracleConfig, PairQuantities};
pub use error::{Divergence, Error, Result};
pub use sim::{CycleRecord, EstimateWithCI, ModelSpec, SimConfig};
