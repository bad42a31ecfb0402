//! Rokhlin towers, covariant representations and recursive subhomogeneous
//! decompositions for orbit-breaking Cuntz–Pimsner algebras of minimal
//! systems twisted by a line bundle.

pub mod bundle;
pub mod dynsys;
pub mod endo;
pub mod error;
pub mod par;
pub mod pipeline;
pub mod rep;
pub mod sections;
pub mod towers;

pub use error::{Error, Result};
