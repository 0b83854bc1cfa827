//! Consecutive quadratic residue patterns and the curves that govern them.
//!
//! The crate counts runs of quadratic residues modulo a prime, expresses the
//! counts through character sums of the hyperelliptic curves `y^2 = f_T(x)`,
//! and compares normalized trace statistics against Sato-Tate style limiting
//! measures. Everything here is pure computation; prime sweeps over threads,
//! the result cache, and the command line live in the `qrpat` crate.
#![no_std]

extern crate alloc;

pub mod arith;
pub mod curves;
pub mod equidist;
mod error;
pub mod identities;
pub mod measures;
pub mod quad;
pub mod residue;

pub use error::Error;

/// Exact rationals used throughout (coefficients, residuals, j-invariants).
pub type Rational = num_rational::Ratio<i128>;

pub type Result<T> = core::result::Result<T, Error>;
