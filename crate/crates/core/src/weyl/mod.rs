//! Weyl quantization on truncated Fourier bases and the Moyal calculus.
//!
//! Conventions. A Fourier weight is `w = (k, η)`; the symplectic pairing is
//! `{w, w'} = k·η' − k'·η`. For single modes
//!
//! - Moyal product: `e_w ♯ e_w' = exp(−i(ħ/2){w, w'}) e_{w+w'}`,
//! - commutator `[a, b]_ħ = (i/ħ)(a♯b − b♯a)`: weight `σ¹_ħ(w, w') = (2/ħ) sin((ħ/2){w, w'})`,
//! - Poisson bracket `∂_ξa·∂_xb − ∂_xa·∂_ξb`: weight `{w, w'}`.
//!
//! The quantization of `a` has matrix entry `(j, k) = â(j − k, ħ(j + k)/2)`
//! in the basis `exp(i j·x)`, so `Op(a)Op(b) = Op(a♯b)` and `Op(e^{ix})` is
//! multiplication by `e^{ix}`.

mod checks;
mod linalg;
mod quantize;

use num_complex::Complex;

use crate::error::Result;
use crate::lattice::{AffineSymbol, Idx, Mode, TorusSymbol, MAX_DIM};
use crate::scalar::Real;

pub use checks::{check_calderon_vaillancourt, check_commutator_loss};
pub use linalg::{expm_hermitian, hermitian_eigen, op_norm, HermitianEigen};
pub use quantize::{quantize, quantize_affine, OperatorMatrix, BINARY_MAGIC};

/// Fourier weight `w = (k, η)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FourierWeight<T: Real> {
    pub k: Idx,
    pub eta: [T; MAX_DIM],
}

impl<T: Real> FourierWeight<T> {
    pub fn new(k: Idx, eta: [T; MAX_DIM]) -> Self {
        FourierWeight { k, eta }
    }

    pub fn of_mode(a: &TorusSymbol<T>, mode: &Mode) -> Self {
        FourierWeight { k: mode.k, eta: a.eta(&mode.m) }
    }

    pub fn zero() -> Self {
        FourierWeight { k: Idx::ZERO, eta: [T::zero(); MAX_DIM] }
    }

    /// `{w, w'} = k·η' − k'·η`.
    pub fn pairing(&self, other: &Self) -> T {
        self.k.dot(&other.eta) - other.k.dot(&self.eta)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut eta = self.eta;
        for (e, o) in eta.iter_mut().zip(other.eta) {
            *e += o;
        }
        FourierWeight { k: self.k + other.k, eta }
    }
}

/// `σ¹_ħ(w, w') = (2/ħ) sin((ħ/2){w, w'})`.
pub fn sigma1<T: Real>(w: &FourierWeight<T>, w1: &FourierWeight<T>, hbar: T) -> T {
    let two = T::c(2.0);
    two / hbar * (hbar / two * w.pairing(w1)).sin()
}

/// Which bracket drives a computation: the quantum commutator or its classical limit.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Bracket<T: Real> {
    Moyal(T),
    Poisson,
}

impl<T: Real> Bracket<T> {
    /// Mode weight of the bracket of `e_w` and `e_w'`.
    pub fn weight(&self, w: &FourierWeight<T>, w1: &FourierWeight<T>) -> T {
        match *self {
            Bracket::Moyal(hbar) => sigma1(w, w1, hbar),
            Bracket::Poisson => w.pairing(w1),
        }
    }

    pub fn apply(&self, a: &TorusSymbol<T>, b: &TorusSymbol<T>) -> Result<TorusSymbol<T>> {
        match *self {
            Bracket::Moyal(hbar) => moyal_commutator(a, b, hbar),
            Bracket::Poisson => poisson_bracket(a, b),
        }
    }

    pub fn hbar(&self) -> Option<T> {
        match *self {
            Bracket::Moyal(h) => Some(h),
            Bracket::Poisson => None,
        }
    }
}

/// Bilinear lattice convolution `Σ c_a c_b f(w_a, w_b) e_{w_a + w_b}`.
fn convolve<T: Real>(
    a: &TorusSymbol<T>,
    b: &TorusSymbol<T>,
    f: impl Fn(&FourierWeight<T>, &FourierWeight<T>) -> Complex<T>,
) -> Result<TorusSymbol<T>> {
    a.check_compatible(b)?;
    let mut out = a.zero_like();
    let wb: Vec<_> = b.iter().map(|(m, c)| (*m, *c, FourierWeight::of_mode(b, m))).collect();
    for (ma, ca) in a.iter() {
        let wa = FourierWeight::of_mode(a, ma);
        for (mb, cb, wb) in &wb {
            let phase = f(&wa, wb);
            if phase.re.is_zero() && phase.im.is_zero() {
                continue;
            }
            out.accumulate(*ma + *mb, *ca * *cb * phase);
        }
    }
    let inherited = a.tail() * b.analytic_norm(T::zero()) + a.analytic_norm(T::zero()) * b.tail();
    out.normalize();
    out.add_tail(inherited);
    Ok(out)
}

/// `a ♯_ħ b`, evaluated exactly on the lattice.
pub fn moyal_product<T: Real>(a: &TorusSymbol<T>, b: &TorusSymbol<T>, hbar: T) -> Result<TorusSymbol<T>> {
    let half = hbar / T::c(2.0);
    convolve(a, b, |wa, wb| Complex::from_polar(T::one(), -half * wa.pairing(wb)))
}

/// `[a, b]_ħ = (i/ħ)(a♯b − b♯a)`, computed mode by mode with `σ¹_ħ`.
pub fn moyal_commutator<T: Real>(a: &TorusSymbol<T>, b: &TorusSymbol<T>, hbar: T) -> Result<TorusSymbol<T>> {
    convolve(a, b, |wa, wb| Complex::new(sigma1(wa, wb, hbar), T::zero()))
}

/// `{a, b} = ∂_ξa·∂_xb − ∂_xa·∂_ξb`.
pub fn poisson_bracket<T: Real>(a: &TorusSymbol<T>, b: &TorusSymbol<T>) -> Result<TorusSymbol<T>> {
    convolve(a, b, |wa, wb| Complex::new(wa.pairing(wb), T::zero()))
}

/// `[ω·ξ + p, b]`: the transport part is exact, `[L_ω, b] = ω·∂_x b`.
pub fn affine_bracket<T: Real>(a: &AffineSymbol<T>, b: &TorusSymbol<T>, bracket: Bracket<T>) -> Result<TorusSymbol<T>> {
    let mut out = bracket.apply(&a.periodic, b)?;
    out += &b.transport(a.omega.omega());
    Ok(out)
}
