//! Simulation and exact-oracle verification of side-channel leakage in
//! encrypted traffic.
//!
//! Sessions are pushed through a seeded causal chain
//! (application → protocol → encryption → network → observer). From the
//! simulated trajectories the crate estimates the expectation gap Δ̄, the
//! mapping deviation C and the observation ratio ρ, evaluates the resulting
//! leakage lower bounds, and checks every inequality it uses against exact
//! computations on finite channels.

pub mod bounds;
pub mod channel_ops;
pub mod error;
pub mod estimators;
pub mod harness;
pub mod rng;
pub mod trajectory;
pub mod traffic;

pub use error::{Error, Result};
