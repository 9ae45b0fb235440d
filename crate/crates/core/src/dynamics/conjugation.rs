use nalgebra::DMatrix;

use super::{propagate, QuantizedGenerator, Scheme, C64};
use crate::error::{Error, Result};
use crate::lattice::{AffineSymbol, TorusSymbol};
use crate::lindstedt::{counterterm, psi_recursive, LindstedtSeries};
use crate::weyl::{op_norm, quantize, quantize_affine};

/// Matrix of `L̂ + Op_ħ(tV − R(t))`.
pub fn renormalized_operator(series: &LindstedtSeries<f64>, t: f64, hbar: f64, j_cut: i32) -> Result<DMatrix<C64>> {
    let periodic = &series.v.scale(t) - &counterterm(series, t);
    let op = AffineSymbol::new(series.omega.clone(), periodic)?;
    Ok(quantize_affine(&op, hbar, j_cut)?.entries)
}

#[derive(Clone, Copy, Debug)]
pub struct ResidualOptions {
    pub steps: usize,
    pub scheme: Scheme,
    /// Width of the excluded boundary band, in modes.
    pub band: i32,
}

impl Default for ResidualOptions {
    fn default() -> Self {
        ResidualOptions { steps: 8, scheme: Scheme::Magnus4, band: 8 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ResidualReport {
    pub t: f64,
    pub hbar: f64,
    pub residual: f64,
    pub unitary_defect: f64,
    pub interior_dim: usize,
}

/// `‖W (L̂ + Op_ħ(tV − R(t))) W* − L̂‖` on the interior block, `W = U_{−H}(t)`.
pub fn conjugation_residual(
    series: &LindstedtSeries<f64>,
    t: f64,
    hbar: f64,
    j_cut: i32,
    opts: ResidualOptions,
) -> Result<ResidualReport> {
    if opts.band < 0 || opts.band >= j_cut {
        return Err(Error::invalid(format!("band {} leaves no interior for J = {j_cut}", opts.band)));
    }
    let gen = QuantizedGenerator::from_series(series, hbar, j_cut, -1.0)?;
    let path = propagate(&gen, t, opts.steps, opts.scheme, false)?;
    let w = path.last();
    let a = renormalized_operator(series, t, hbar, j_cut)?;
    let l = quantize_affine(&AffineSymbol::transport(series.omega.clone(), series.v.period())?, hbar, j_cut)?;
    let diff = w * a * w.adjoint() - &l.entries;
    let idx = l.interior(opts.band);
    let block = DMatrix::from_fn(idx.len(), idx.len(), |r, c| diff[(idx[r], idx[c])]);
    Ok(ResidualReport {
        t,
        hbar,
        residual: op_norm(&block),
        unitary_defect: path.max_unitary_defect,
        interior_dim: idx.len(),
    })
}

#[derive(Clone, Debug)]
pub struct SymbolicConjugation {
    /// `Σ_{n ≤ N} tⁿ ψ_n(a)`.
    pub symbol: TorusSymbol<f64>,
    /// `2 ‖H‖_{s,t} / σ² ≤ 1/2`.
    pub precondition: bool,
    /// `‖result‖_{s−σ} / ‖a‖_s`.
    pub norm_ratio: f64,
}

/// Symbol of `W Op_ħ(a) W*` to order `tᴺ`, with the analytic-norm bound data.
pub fn symbolic_conjugation(
    a: &TorusSymbol<f64>,
    series: &LindstedtSeries<f64>,
    t: f64,
    s: f64,
    sigma: f64,
) -> Result<SymbolicConjugation> {
    if !(sigma > 0.0 && sigma < s) {
        return Err(Error::invalid("need 0 < sigma < s"));
    }
    let hs: Vec<TorusSymbol<f64>> = series.orders.iter().map(|o| o.h.clone()).collect();
    let mut symbol = a.clone();
    for n in 1..=hs.len() {
        symbol += &psi_recursive(a, &hs, n, series.bracket)?.scale(t.powi(n as i32));
    }
    let precondition = 2.0 * series.joint_norm(s, t) / (sigma * sigma) <= 0.5;
    let a_norm = a.analytic_norm(s);
    let norm_ratio = if a_norm == 0.0 { 0.0 } else { symbol.analytic_norm(s - sigma) / a_norm };
    Ok(SymbolicConjugation { symbol, precondition, norm_ratio })
}

/// `‖W Op(a) W* − Op(b)‖` on the interior block.
pub(crate) fn conjugated_distance(
    series: &LindstedtSeries<f64>,
    a: &TorusSymbol<f64>,
    b: &TorusSymbol<f64>,
    t: f64,
    hbar: f64,
    j_cut: i32,
    opts: ResidualOptions,
) -> Result<f64> {
    let gen = QuantizedGenerator::from_series(series, hbar, j_cut, -1.0)?;
    let w = propagate(&gen, t, opts.steps, opts.scheme, false)?.last().clone();
    let qa = quantize(a, hbar, j_cut)?;
    let qb = quantize(b, hbar, j_cut)?;
    let diff = &w * &qa.entries * w.adjoint() - &qb.entries;
    let idx = qa.interior(opts.band);
    Ok(op_norm(&DMatrix::from_fn(idx.len(), idx.len(), |r, c| diff[(idx[r], idx[c])])))
}
