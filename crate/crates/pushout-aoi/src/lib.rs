//! Validation experiments, file formats and the command-line front end for
//! [`pushout_aoi_core`].
//!
//! * [`harness`] compares simulation against the closed forms for single
//!   models and for load sweeps of the D/M and M/M families.
//! * [`records`] reads and writes the cycle-record CSV.
//! * [`cli`] is the `pushout-aoi` binary.

pub mod cli;
pub mod format;
pub mod harness;
pub mod records;

pub use pushout_aoi_core as core;
