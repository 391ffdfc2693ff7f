//! Exact equivariant K-theory structure constants for affine Grassmannians.

pub mod cartan;
pub mod conv;
pub mod error;
pub mod kclass;
pub mod laurent;
pub mod positivity;
pub mod qk;
pub mod weyl;

pub use error::{Error, Result};
