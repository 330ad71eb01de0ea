//! Exact numerical laboratory for Grover-type amplitude amplification when the oracle
//! changes between two query phases.
//!
//! * [`reduced`] evolves the dynamics in the four-dimensional class-symmetric subspace,
//!   exact for any number of items.
//! * [`full`] is the dense state-vector simulator used as a brute-force reference.
//! * [`analytic`] holds the closed-form angles and success probabilities.
//! * [`harness`] certifies the averaged-strategy and query lower-bound statements by
//!   explicit enumeration.
//! * [`sweep`] scans first/second phase query allocations.
//! * [`gridworld`] compiles deterministic grid worlds with two episode lengths into
//!   changing-oracle instances.
//!
//! The simulators and the closed-form engine are generic over [`Real`] (`f32`/`f64`);
//! the aliases below fix the double-precision instantiation used throughout the tools.

pub mod analytic;
pub mod error;
pub mod full;
pub mod gridworld;
pub mod harness;
pub mod linalg;
pub mod reduced;
pub mod scalar;
pub mod sweep;
pub mod types;

pub use error::{Error, Result};
pub use scalar::Real;
pub use types::{clamp_probability, AngleSet, ClassSizes, ItemSet, Oracle, PhaseSchedule, SuccessReport};

pub type ReducedState64 = reduced::ReducedState<f64>;
pub type ReducedTrajectory64 = reduced::ReducedTrajectory<f64>;
pub type FullState64 = full::FullState<f64>;
pub type AngleSet64 = AngleSet<f64>;
pub type SuccessReport64 = SuccessReport<f64>;
pub type Matrix64 = linalg::CMatrix<f64>;
pub type Strategy64 = harness::Strategy<f64>;

pub type ReducedState32 = reduced::ReducedState<f32>;
pub type FullState32 = full::FullState<f32>;
