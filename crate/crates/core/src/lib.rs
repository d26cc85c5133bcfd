//! Exact and numerical tools for exponential sums, characters and Bessel
//! integrals over the Gaussian integers.

pub mod archimedean;
pub mod characters;
pub mod error;
pub mod expsum;
pub mod gauss;
pub mod lab;
pub mod spectral;
pub mod verify;

pub use error::{Error, Result};
pub use gauss::{GIdeal, GaussianInt};

/// Library version, embedded in every report.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
