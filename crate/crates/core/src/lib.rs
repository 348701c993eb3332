//! Fidelity roofline analysis for NISQ gate-set and machine comparisons.
//!
//! The crate estimates circuit success probability from a circuit's resource
//! profile and a machine's error rates, then maps out the regions of error-rate
//! space in which one machine (or gate set, or topology) beats another.

pub mod circuit;
pub mod exec;
pub mod linalg;
pub mod machines;
pub mod models;
pub mod roofline;
pub mod simulator;
mod solve;

pub use exec::Exec;
