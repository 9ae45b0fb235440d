//! Semiclassical renormalization of perturbed transport operators on the torus.
//!
//! The crate is organised bottom-up:
//!
//! - [`lattice`]: analytic symbols stored as finite Fourier lattices, analytic
//!   norms and Diophantine utilities.
//! - [`weyl`]: Weyl quantization on truncated Fourier bases, Moyal products,
//!   commutators and Poisson brackets.
//! - [`trees`]: rooted planar trees indexed by child-count vectors and their
//!   combinatorial coefficients.
//! - [`divisors`]: decorated trees, resonances and the small-divisor
//!   coefficients of the tree expansion.
//! - [`lindstedt`]: the cohomological hierarchy, by direct recursion and by
//!   tree expansion.
//! - [`dynamics`]: unitary and symplectic propagation, conjugation residuals,
//!   spectra and semiclassical measures.
//! - [`harness`]: scenarios, reports and the acceptance battery.
//!
//! Symbol arithmetic is generic over [`Real`]; dense linear algebra runs in
//! `f64`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod divisors;
pub mod dynamics;
pub mod error;
pub mod harness;
pub mod lattice;
pub mod lindstedt;
pub mod scalar;
pub mod trees;
pub mod weyl;

pub use error::{Error, Result};
pub use lattice::{AffineSymbol, FrequencyVector, Idx, Mode, TorusSymbol, Truncation};
pub use scalar::Real;

/// Double-precision symbol, the default for numerical experiments.
pub type Symbol64 = TorusSymbol<f64>;
/// Single-precision symbol.
pub type Symbol32 = TorusSymbol<f32>;
/// Double-precision affine symbol `ω·ξ + p(x, ξ)`.
pub type Affine64 = AffineSymbol<f64>;
/// Complex double.
pub type C64 = num_complex::Complex<f64>;
/// Exact rational used by the combinatorial layer.
pub type Rational = num_rational::BigRational;
