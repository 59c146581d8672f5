pub mod chebyshev;
pub mod contfrac;
pub mod diophantine;
pub mod error;
pub mod harness;
pub mod precision;
pub mod sieve;

pub use error::{Error, Result};
