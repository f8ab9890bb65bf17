//! Numerical core of the reduced Seiberg–Witten verification lab.
//!
//! Everything here is pure computation over `alloc` containers: discretized
//! domains and differential forms ([`grid`]), U(1) gauge fields ([`gauge`]),
//! the four-dimensional equations and their reduction ([`reduction`]), the
//! invariant two-dimensional equations ([`equations`]), Newton solvers
//! ([`solver`]), the deformation complex ([`linearization`]), the symplectic
//! structures on the configuration space ([`symplectic`]) and the curvature
//! identities of the determinant line bundles ([`quillen`]).
//!
//! File formats, reports and the command line live in the `swlab` crate.
//!
//! Float math goes through `num_traits::Float` (backed by `libm`). When std
//! is linked into the build, its inherent methods take precedence and those
//! imports become unused, hence the `allow` attributes on them.

#![no_std]

extern crate alloc;

pub mod banded;
pub mod constants;
pub mod equations;
pub mod error;
pub mod fft;
pub mod gauge;
pub mod grid;
pub mod linalg;
pub mod linearization;
pub mod quillen;
pub mod reduction;
pub mod rng;
pub mod solver;
pub mod symplectic;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;

/// Imaginary unit.
pub const I: C64 = C64::new(0.0, 1.0);
