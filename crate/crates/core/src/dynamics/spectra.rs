use serde::Serialize;

use super::classical::{flow_point, FlowDirection};
use super::conjugation::renormalized_operator;
use crate::error::{Error, Result};
use crate::lattice::{Idx, TorusSymbol};
use crate::lindstedt::LindstedtSeries;
use crate::weyl::{hermitian_eigen, quantize};

#[derive(Clone, Debug, Serialize)]
pub struct SpectrumReport {
    pub eigenvalues: Vec<f64>,
    /// Fraction of interior targets `ħω·j` with an eigenvalue within `tol`.
    pub matched_fraction: f64,
    /// Largest target-to-nearest-eigenvalue distance over the interior.
    pub max_error: f64,
    pub tol: f64,
}

/// Eigenvalues of `L̂ + Op_ħ(tV − R(t))` against the lattice `{ħ ω·j}`, `|j|_∞ ≤ J − band`.
pub fn spectrum_check(
    series: &LindstedtSeries<f64>,
    t: f64,
    hbar: f64,
    j_cut: i32,
    band: i32,
    tol: f64,
) -> Result<SpectrumReport> {
    let m = renormalized_operator(series, t, hbar, j_cut)?;
    let mut eigenvalues: Vec<f64> = hermitian_eigen(&m).values.iter().copied().collect();
    eigenvalues.sort_by(f64::total_cmp);
    let omega = series.omega.omega();
    let d = series.v.dim();
    let lim = j_cut - band;
    let targets: Vec<f64> = itertools::Itertools::multi_cartesian_product((0..d).map(|_| -lim..=lim))
        .map(|j| hbar * Idx::from_slice(&j).dot(omega))
        .collect();
    let nearest = |x: f64| -> f64 {
        let i = eigenvalues.partition_point(|&e| e < x);
        [i.checked_sub(1), Some(i)]
            .into_iter()
            .flatten()
            .filter_map(|i| eigenvalues.get(i))
            .map(|e| (e - x).abs())
            .fold(f64::INFINITY, f64::min)
    };
    let errors: Vec<f64> = targets.iter().map(|&x| nearest(x)).collect();
    let matched = errors.iter().filter(|&&e| e <= tol).count();
    Ok(SpectrumReport {
        matched_fraction: matched as f64 / targets.len().max(1) as f64,
        max_error: errors.iter().copied().fold(0.0, f64::max),
        eigenvalues,
        tol,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct MeasureEstimate {
    pub hbar: f64,
    pub eigenvalue: f64,
    /// Lattice point `ħ j` matched to the eigenvalue.
    pub xi0: f64,
    /// `⟨Op_ħ(a) Ψ, Ψ⟩` per test symbol.
    pub pairings: Vec<f64>,
    /// `∫ a(Φ_t(x, ξ₀)) dx / 2π` per test symbol.
    pub references: Vec<f64>,
    /// Pairing of the identity symbol.
    pub identity_pairing: f64,
    pub deviation: f64,
}

/// Semiclassical pairings of the eigenfunction of `L̂ + Op_ħ(tV − R(t))`
/// whose eigenvalue is nearest `energy`, against the pushforward of the
/// invariant torus `{ξ = ξ₀}` by `Φ_t` (`d = 1`).
pub fn semiclassical_measure(
    series: &LindstedtSeries<f64>,
    t: f64,
    hbar: f64,
    j_cut: i32,
    energy: f64,
    tests: &[TorusSymbol<f64>],
    quadrature: usize,
) -> Result<MeasureEstimate> {
    if series.v.dim() != 1 {
        return Err(Error::invalid("semiclassical measures are implemented for d = 1"));
    }
    let omega = series.omega.omega()[0];
    let m = renormalized_operator(series, t, hbar, j_cut)?;
    let eig = hermitian_eigen(&m);
    let n = eig.values.len();
    let gap = |i: usize| (eig.values[i] - energy).abs();
    let best = (0..n).map(gap).fold(f64::INFINITY, f64::min);
    if !best.is_finite() || best > hbar * omega.abs() {
        return Err(Error::Numerical(format!("no eigenvalue within ħω of the shell {energy}")));
    }
    let j0 = (energy / (hbar * omega)).round() as i32;
    let plane = (j0 + j_cut) as usize;
    let chosen = (0..n)
        .filter(|&i| gap(i) <= best + 1e-12 * energy.abs().max(1.0))
        .max_by(|&a, &b| {
            let oa = if plane < n { eig.vectors[(plane, a)].norm() } else { 0.0 };
            let ob = if plane < n { eig.vectors[(plane, b)].norm() } else { 0.0 };
            oa.total_cmp(&ob)
        })
        .expect("the window is nonempty");
    let psi = eig.vectors.column(chosen).into_owned();
    let eigenvalue = eig.values[chosen];
    let xi0 = hbar * (eigenvalue / (hbar * omega)).round();

    let pair = |a: &TorusSymbol<f64>| -> Result<f64> {
        let q = quantize(a, hbar, j_cut)?;
        Ok((psi.adjoint() * &q.entries * &psi)[(0, 0)].re)
    };
    let one = TorusSymbol::constant(1, series.v.period(), 1.0)?;
    let identity_pairing = pair(&one)?;
    let images: Vec<(f64, f64)> = (0..quadrature)
        .map(|i| {
            let x = std::f64::consts::TAU * i as f64 / quadrature as f64;
            let (y, eta) = flow_point(series, t, &[x], &[xi0], 16, FlowDirection::Renormalizing)?;
            Ok((y[0], eta[0]))
        })
        .collect::<Result<_>>()?;
    let mut pairings = Vec::new();
    let mut references = Vec::new();
    for a in tests {
        pairings.push(pair(a)?);
        references.push(images.iter().map(|&(y, eta)| a.eval(&[y], &[eta]).re).sum::<f64>() / quadrature as f64);
    }
    let deviation = pairings.iter().zip(&references).map(|(p, r)| (p - r).abs()).fold(0.0, f64::max);
    Ok(MeasureEstimate { hbar, eigenvalue, xi0, pairings, references, identity_pairing, deviation })
}
