//! Numerical pluripotential theory on flat complex tori of dimension one and two.
//!
//! The crate computes quasi-plurisubharmonic envelopes and their contact sets,
//! Monge-Ampère measures and energies, the Kiselman-Legendre regularization,
//! rotation-invariant weak geodesics and supercanonical envelopes on curves.

pub mod error;
pub mod geometry;
pub mod monge_ampere;
pub mod envelope;
pub mod geodesics;
pub mod regularize;
pub mod supercanonical;

pub use error::{Error, Result};
