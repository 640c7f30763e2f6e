//! Exact tools for rational points on symmetric quartic curves and the
//! elliptic curves they cover.

pub mod error;
pub mod chebyshev;
pub mod elliptic;
pub mod exact;
pub mod demjanenko;
pub mod descent;
pub mod dynamics;
pub mod localglobal;
pub mod quartic;

pub use error::{Error, Result};
pub use exact::Rational;
