//! Discrete fractional Sobolev energies, Coulomb-gauge frames, Wente-type
//! elliptic estimates and Fourier-multiplier operators on the unit disk,
//! together with a randomized harness for estimating the constants in the
//! associated inequalities.

pub mod domain;
pub mod elliptic;
pub mod error;
pub mod frames;
pub mod harness;
pub mod sobolev;
pub mod special;
pub mod spectral;
pub mod sum;

pub use error::{Error, Result};

/// Version string embedded in every report.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
