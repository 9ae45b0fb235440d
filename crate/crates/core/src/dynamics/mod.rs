//! Quantum and classical dynamics of the renormalized system.
//!
//! Conventions: `D_t = −i d/dt`, so `U_H` solves `dU/dt = −(i/ħ) Op_ħ(H(t)) U`.
//! With `W = U_{−H}` the renormalization identity reads
//! `W (L̂ + Op_ħ(tV − R(t))) W* = L̂`, and on symbols `W Op(a) W*` has the
//! expansion `Σ tⁿ ψ_n(a)`. Classically `Φ_t = (Φ^{−H}_t)^{−1}` and
//! `(L_ω + tV − R(t)) ∘ Φ_t = L_ω`.
//!
//! Operator-level checks are restricted to an interior block of the
//! truncated basis, where the boundary of the truncation has not yet leaked in.

mod classical;
mod conjugation;
mod egorov;
mod propagator;
mod spectra;

use nalgebra::DMatrix;
use num_complex::Complex;

use crate::error::Result;
use crate::lindstedt::LindstedtSeries;
use crate::weyl::quantize;

pub use classical::{classical_flow, classical_residual, flow_point, FlowDirection, PhaseFlowMap};
pub use conjugation::{
    conjugation_residual, renormalized_operator, symbolic_conjugation, ResidualOptions, ResidualReport,
    SymbolicConjugation,
};
pub use egorov::{egorov_residual, project_on_lattice, EgorovReport};
pub use propagator::{propagate, PropagatorPath, Scheme};
pub use spectra::{semiclassical_measure, spectrum_check, MeasureEstimate, SpectrumReport};

pub(crate) type C64 = Complex<f64>;

/// `Op_ħ(H(τ)) = Σ τ^{n−1} M_n` as dense matrices.
#[derive(Clone, Debug)]
pub struct QuantizedGenerator {
    pub terms: Vec<DMatrix<C64>>,
    pub hbar: f64,
    pub j_cut: i32,
}

impl QuantizedGenerator {
    /// Quantizes `sign · H_n` for every order of the series.
    pub fn from_series(series: &LindstedtSeries<f64>, hbar: f64, j_cut: i32, sign: f64) -> Result<Self> {
        let terms = series
            .orders
            .iter()
            .map(|o| Ok(quantize(&o.h, hbar, j_cut)?.entries * C64::new(sign, 0.0)))
            .collect::<Result<Vec<_>>>()?;
        Ok(QuantizedGenerator { terms, hbar, j_cut })
    }

    pub fn dim(&self) -> usize {
        let side = 2 * self.j_cut as usize + 1;
        self.terms.first().map_or(side, |m| m.nrows())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.iter().all(|m| m.iter().all(|z| *z == C64::new(0.0, 0.0)))
    }

    pub fn at(&self, tau: f64) -> DMatrix<C64> {
        let n = self.dim();
        let mut out = DMatrix::from_element(n, n, C64::new(0.0, 0.0));
        let mut p = 1.0;
        for m in &self.terms {
            out += m * C64::new(p, 0.0);
            p *= tau;
        }
        out
    }
}

#[cfg(test)]
mod tests;
