use num_complex::Complex;
use rayon::prelude::*;
use serde::Serialize;

use super::Scenario;
use crate::dynamics::{classical_flow, classical_residual, conjugation_residual, semiclassical_measure, spectrum_check};
use crate::error::Result;
use crate::lattice::{Mode, TorusSymbol};
use crate::lindstedt::LindstedtSeries;
use crate::weyl::Bracket;

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct ResidualRow {
    pub t: f64,
    pub hbar: f64,
    #[serde(rename = "N")]
    pub n: usize,
    pub residual: f64,
    /// Log-log slope against the previous `t` at the same `ħ`; empty at the noise floor.
    pub slope_window: Option<f64>,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct SpectrumRow {
    pub hbar: f64,
    pub t: f64,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "J")]
    pub j_cut: i32,
    pub matched_fraction: f64,
    pub max_error: f64,
    pub tol: f64,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct MeasureRow {
    pub hbar: f64,
    pub t: f64,
    pub eigenvalue: f64,
    pub xi0: f64,
    pub test: usize,
    pub pairing: f64,
    pub reference: f64,
    pub abs_error: f64,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct ClassicalRow {
    pub t: f64,
    #[serde(rename = "N")]
    pub n: usize,
    pub residual: f64,
    pub displacement: f64,
    pub symplectic_defect: f64,
}

/// Least-squares slope of `log y` against `log x`.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let cov: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let var: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    cov / var
}

fn cells(hbars: &[f64], ts: &[f64]) -> Vec<(usize, f64, f64)> {
    hbars.iter().enumerate().flat_map(|(i, &h)| ts.iter().map(move |&t| (i, h, t))).collect()
}

fn moyal_series(scn: &Scenario, hbars: &[f64]) -> Result<Vec<LindstedtSeries<f64>>> {
    hbars.iter().map(|&h| scn.series(Bracket::Moyal(h))).collect()
}

/// Quantum conjugation residual on the `ħ × t` grid.
pub fn residual_sweep(scn: &Scenario) -> Result<Vec<ResidualRow>> {
    let series = moyal_series(scn, &scn.hbar)?;
    let opts = scn.residual_options();
    let mut rows = cells(&scn.hbar, &scn.t)
        .into_par_iter()
        .map(|(i, hbar, t)| {
            let r = conjugation_residual(&series[i], t, hbar, scn.j_cut, opts)?;
            Ok(ResidualRow { t, hbar, n: scn.orders, residual: r.residual, slope_window: None })
        })
        .collect::<Result<Vec<_>>>()?;
    let floor = scn.tolerances.noise_floor;
    for i in 1..rows.len() {
        let (a, b) = (&rows[i - 1], &rows[i]);
        if a.hbar == b.hbar && a.t > 0.0 && b.t > 0.0 && a.t != b.t && a.residual > floor && b.residual > floor {
            rows[i].slope_window = Some((b.residual / a.residual).ln() / (b.t / a.t).ln());
        }
    }
    Ok(rows)
}

/// Spectra of the renormalized operator against `ħω·j`.
pub fn spectrum_sweep(scn: &Scenario) -> Result<Vec<SpectrumRow>> {
    let series = moyal_series(scn, &scn.hbar)?;
    let pow = scn.orders as i32 + 1;
    cells(&scn.hbar, &scn.t)
        .into_par_iter()
        .map(|(i, hbar, t)| {
            let tol = scn.tolerances.spectrum_factor * t.powi(pow) + scn.tolerances.noise_floor;
            let r = spectrum_check(&series[i], t, hbar, scn.j_cut, scn.truncations.band, tol)?;
            Ok(SpectrumRow {
                hbar,
                t,
                n: scn.orders,
                j_cut: scn.j_cut,
                matched_fraction: r.matched_fraction,
                max_error: r.max_error,
                tol,
            })
        })
        .collect()
}

type ModeSpec = ((i32, i32), Complex<f64>);

/// Ten smooth real test symbols on `T × R`: low `x` harmonics, `ξ` harmonics and products.
pub fn standard_test_symbols(period: f64) -> Result<Vec<TorusSymbol<f64>>> {
    let c = |re: f64, im: f64| Complex::new(re, im);
    let specs: [&[ModeSpec]; 10] = [
        &[((1, 0), c(0.5, 0.0)), ((-1, 0), c(0.5, 0.0))],
        &[((1, 0), c(0.0, -0.5)), ((-1, 0), c(0.0, 0.5))],
        &[((2, 0), c(0.5, 0.0)), ((-2, 0), c(0.5, 0.0))],
        &[((2, 0), c(0.0, -0.5)), ((-2, 0), c(0.0, 0.5))],
        &[((3, 0), c(0.5, 0.0)), ((-3, 0), c(0.5, 0.0))],
        &[((0, 1), c(0.5, 0.0)), ((0, -1), c(0.5, 0.0))],
        &[((0, 1), c(0.0, -0.5)), ((0, -1), c(0.0, 0.5))],
        &[((1, 1), c(0.25, 0.0)), ((1, -1), c(0.25, 0.0)), ((-1, 1), c(0.25, 0.0)), ((-1, -1), c(0.25, 0.0))],
        &[((1, 1), c(-0.25, 0.0)), ((1, -1), c(0.25, 0.0)), ((-1, 1), c(0.25, 0.0)), ((-1, -1), c(-0.25, 0.0))],
        &[((1, 1), c(0.5, 0.0)), ((-1, -1), c(0.5, 0.0)), ((0, 0), c(0.5, 0.0))],
    ];
    specs
        .iter()
        .map(|modes| TorusSymbol::from_modes(1, period, modes.iter().map(|&((k, m), z)| (Mode::d1(k, m), z))))
        .collect()
}

/// Eigenfunction pairings against the pushed-forward invariant torus.
pub fn measure_sweep(scn: &Scenario) -> Result<Vec<MeasureRow>> {
    let ms = &scn.measures;
    let series = moyal_series(scn, &ms.hbar)?;
    let tests = standard_test_symbols(series[0].v.period())?;
    let per_cell = cells(&ms.hbar, &ms.t)
        .into_par_iter()
        .map(|(i, hbar, t)| {
            let m = semiclassical_measure(&series[i], t, hbar, ms.j_cut, ms.energy, &tests, ms.quadrature)?;
            Ok((0..tests.len())
                .map(|k| MeasureRow {
                    hbar,
                    t,
                    eigenvalue: m.eigenvalue,
                    xi0: m.xi0,
                    test: k,
                    pairing: m.pairings[k],
                    reference: m.references[k],
                    abs_error: (m.pairings[k] - m.references[k]).abs(),
                })
                .collect::<Vec<_>>())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(per_cell.into_iter().flatten().collect())
}

/// Classical conjugation residual over the `t` grid (Poisson series).
pub fn classical_sweep(scn: &Scenario) -> Result<Vec<ClassicalRow>> {
    let series = scn.series(Bracket::Poisson)?;
    scn.t
        .par_iter()
        .map(|&t| {
            let map = classical_flow(&series, t, 16, 5, (-1.0, 1.0), scn.truncations.steps)?;
            Ok(ClassicalRow {
                t,
                n: scn.orders,
                residual: classical_residual(&series, &map),
                displacement: map.displacement(),
                symplectic_defect: map.symplectic_defect,
            })
        })
        .collect()
}
