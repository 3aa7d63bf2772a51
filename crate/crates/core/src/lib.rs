//! Arithmetic-statistics toolkit: exact divisor and Hecke-eigenvalue tables,
//! Kloosterman sums, Hankel-type window transforms, and the distribution
//! experiments built on them (progressions mod p, short intervals, and a
//! unit-circle random model).
//!
//! The crate is organized around exact integer computation wherever the
//! quantities are integers (sieves, hyperbola-method summation, eta-product
//! coefficients, Kloosterman sums) and carefully budgeted floating-point
//! quadrature where they are not. Every randomized computation is driven by
//! a counter-based generator, so results are reproducible bit-for-bit for a
//! fixed seed regardless of thread count.

pub mod arith;
pub mod cache;
pub mod error;
pub mod kloosterman;
pub mod progressions;
pub mod random_model;
pub mod rng;
pub mod short_intervals;
pub mod special;
pub mod stats;
pub mod windows;

pub use error::{Error, Result};
