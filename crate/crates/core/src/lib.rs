//! Branched hyperbolic surfaces with fundamental cycles.
//!
//! The crate evaluates the growth-rate lower bound for the non-deterministic
//! geodesic flow of a branched surface, inverts the exponent-two volume
//! growth of hyperbolic 3-space into explicit upper bounds on branch-curve
//! lengths, and simulates the flow itself by Monte Carlo.

// `!(x > 0.0)` is used on purpose so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bound;
pub mod error;
pub mod hyperbolic;
pub mod report;
pub mod sim;
pub mod surface;

pub use error::{Error, Result};
