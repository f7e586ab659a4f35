//! Numerics for the Hermitian two-matrix model with a quartic potential.

pub mod biorthogonal;
pub mod equilibrium;
pub mod error;
pub mod model;
pub mod rh;
pub mod sampler;
pub mod spectral;
pub mod verify;

pub use error::{Error, Result};
