//! Truncated-Fock-space simulation of number-selective optical parametric
//! oscillation (NSOPO).
//!
//! The crate is organised bottom-up:
//!
//! - [`fock`]: chain, two-mode, density-matrix and three-mode state types.
//! - [`hamiltonians`]: Kerr frequencies, detuning weights and the chain /
//!   two-mode interaction Hamiltonians.
//! - [`propagate`]: Crank–Nicolson and spectral propagators, the Lindblad
//!   integrator and the three-mode pump oracle.
//! - [`observables`]: number distributions, peak analysis, the sinc shaping
//!   envelope, Wigner functions, fidelity and purity.
//! - [`constraints`]: Gaussian-unit material feasibility checks.
//!
//! Time is measured in arbitrary units throughout the dynamical layer; only
//! the products `γτ`, `|Ξ|τ` and `Δτ` matter. The material layer works in
//! Gaussian (CGS) units.

// `!(x > 0.0)` is used on purpose so that NaN fails validation; index loops
// mirror the matrix formulas.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod constraints;
pub mod error;
pub mod fock;
pub mod hamiltonians;
pub mod observables;
pub mod propagate;

pub use error::{Error, Result};

pub use num_complex::Complex64 as C64;

/// Reduced Planck constant, erg·s.
pub const HBAR: f64 = 1.054_571_817e-27;

/// Speed of light in vacuum, cm/s.
pub const C_LIGHT: f64 = 2.997_924_58e10;

/// Sum of `|c|^2` over a slice of amplitudes.
pub(crate) fn norm_sqr(amps: &[C64]) -> f64 {
    amps.iter().map(|c| c.norm_sqr()).sum()
}
