//! Circulant matrices `C = circ_n(d, c_1, …, c_{n−1})` with constant
//! non-negative diagonal `d`, unimodular off-diagonal entries and
//! `CC* = (d² + n − 1)I`.
//!
//! The library covers exact diagonal values, spectral verification, an
//! exhaustive sign-pattern search for Hermitian solutions, number-theoretic
//! admissibility filters for even orders, the analogous problem over `Z_m`,
//! and mutually unbiased bases built from `d = 1` solutions.

pub mod appendix;
pub mod catalog;
pub mod error;
pub mod feasibility;
pub mod generator;
pub mod mub;
pub mod rational;
pub mod ringzm;
pub mod scalar;
pub mod search;
pub mod spectral;

pub use error::{CircError, Result};
pub use generator::CirculantGenerator;
pub use rational::{is_perfect_square, DiagonalValue, Rational};
pub use scalar::{ComplexScalar, Real};

/// Double-precision generator, the default for search and verification.
pub type Generator = CirculantGenerator<f64>;
pub type Generator32 = CirculantGenerator<f32>;
pub type VerificationReport = spectral::VerificationReport<f64>;
/// Double-precision orthonormal basis.
pub type Basis = mub::Basis<f64>;
