//! Desk-scale numerics around the Riemann zeta function: co-Poisson summation,
//! Sonine functions, the explicit formula and the Nyman-Beurling distance.
//!
//! Everything is double precision. Functions are pure; the only shared state is
//! a handful of lazily built quadrature rule caches.

// Argument guards are written `!(x > 0.0)` on purpose so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod copoisson;
pub mod error;
pub mod explicit;
pub mod nymanbeurling;
pub mod par;
pub mod quad;
pub mod specfun;
pub mod testfn;
pub mod transforms;
pub mod zeros;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// A point `s = σ + iτ` of the complex plane.
pub type ComplexPoint = Complex64;

/// Shorthand constructor for a [`ComplexPoint`].
#[inline]
pub fn cpx(re: f64, im: f64) -> ComplexPoint {
    Complex64::new(re, im)
}

/// Euler's constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
