//! Strongly pseudoconvex handle profiles for rotationally invariant domains
//! in ℂⁿ, with Levi-form and inequality certification.

pub mod cli;
pub mod constructors;
pub mod error;
pub mod levi;
pub mod profiles;
pub mod pseudoconvexity;
mod quadrature;
pub mod smoothing;

pub use error::{Error, Result};
