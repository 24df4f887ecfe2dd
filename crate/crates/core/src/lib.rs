//! Smoothed analysis of conic condition numbers on projective caps.
//!
//! This crate holds the pure numerical machinery: points of real projective
//! space represented on the unit sphere, the radial cap integral `I_m(σ)`
//! and the measures built from it, the uniform cap law and the adversarial
//! law whose density has a pole `r^{-β}` at the cap center, concrete conic
//! condition numbers, and evaluators for every tail/expectation bound and
//! auxiliary inequality used to boost uniform bounds to adversarial ones.
//!
//! The crate is `no_std` and only needs `alloc`. Floating point special
//! functions come from `libm`. IO, parallel Monte Carlo, and the CLI live in
//! the `capsmooth` companion crate.
#![no_std]
#![warn(missing_debug_implementations)]
// `Float` supplies f64 math under no_std; it looks unused whenever some crate
// in the graph links std and brings the inherent methods into scope.
#![allow(unused_imports)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod bounds;
pub mod condnum;
pub mod distributions;
mod error;
pub mod geometry;
pub mod quadrature;
pub mod special;
pub mod stats;
pub mod stream;
pub mod volumes;

pub use error::{Error, Result};
