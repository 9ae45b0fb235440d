use num_complex::Complex;
use rustfft::FftPlanner;

use super::classical::{flow_point, FlowDirection};
use super::conjugation::{conjugated_distance, ResidualOptions};
use crate::error::{Error, Result};
use crate::lattice::{Mode, TorusSymbol};
use crate::lindstedt::LindstedtSeries;

/// Fourier coefficients of a function sampled on the `nx × nxi` grid of
/// `T × [0, L)`; modes with `|k| < nx/2`, `|m| < nxi/2` are kept. Returns the
/// symbol and the largest relative coefficient on the outermost kept ring,
/// an aliasing indicator. One-dimensional only.
pub fn project_on_lattice(
    f: impl Fn(f64, f64) -> f64,
    period: f64,
    nx: usize,
    nxi: usize,
) -> Result<(TorusSymbol<f64>, f64)> {
    if nx < 4 || nxi < 4 {
        return Err(Error::invalid("projection grid needs at least 4 points per axis"));
    }
    let mut grid: Vec<Complex<f64>> = Vec::with_capacity(nx * nxi);
    for i in 0..nx {
        let x = std::f64::consts::TAU * i as f64 / nx as f64;
        for l in 0..nxi {
            grid.push(Complex::new(f(x, period * l as f64 / nxi as f64), 0.0));
        }
    }
    let mut planner = FftPlanner::new();
    let row_fft = planner.plan_fft_forward(nxi);
    for row in grid.chunks_mut(nxi) {
        row_fft.process(row);
    }
    let col_fft = planner.plan_fft_forward(nx);
    let mut col = vec![Complex::new(0.0, 0.0); nx];
    for l in 0..nxi {
        for i in 0..nx {
            col[i] = grid[i * nxi + l];
        }
        col_fft.process(&mut col);
        for i in 0..nx {
            grid[i * nxi + l] = col[i];
        }
    }
    let norm = 1.0 / (nx * nxi) as f64;
    let (kmax, mmax) = (nx as i32 / 2 - 1, nxi as i32 / 2 - 1);
    let wrap = |i: usize, n: usize| if i <= n / 2 { i as i32 } else { i as i32 - n as i32 };
    let mut modes = Vec::new();
    let (mut largest, mut edge) = (0.0f64, 0.0f64);
    for i in 0..nx {
        for l in 0..nxi {
            let (k, m) = (wrap(i, nx), wrap(l, nxi));
            let c = grid[i * nxi + l] * norm;
            largest = largest.max(c.norm());
            if k.abs() > kmax || m.abs() > mmax {
                continue;
            }
            if k.abs() == kmax || m.abs() == mmax {
                edge = edge.max(c.norm());
            }
            modes.push((Mode::d1(k, m), c));
        }
    }
    let sym = TorusSymbol::from_modes(1, period, modes)?;
    Ok((sym, if largest > 0.0 { edge / largest } else { 0.0 }))
}

#[derive(Clone, Debug)]
pub struct EgorovReport {
    pub hbar: f64,
    pub residual: f64,
    /// Relative size of the outermost projected coefficients of `a ∘ Φ_t`.
    pub aliasing: f64,
    pub warnings: Vec<String>,
}

/// `‖W Op_ħ(a) W* − Op_ħ(a ∘ Φ_t)‖` on the interior block (`d = 1`).
pub fn egorov_residual(
    a: &TorusSymbol<f64>,
    series: &LindstedtSeries<f64>,
    t: f64,
    hbar: f64,
    j_cut: i32,
    grid: usize,
    opts: ResidualOptions,
) -> Result<EgorovReport> {
    if a.dim() != 1 {
        return Err(Error::invalid("Egorov residual is implemented for d = 1"));
    }
    let flow_steps = 16;
    let transported = |x: f64, xi: f64| -> f64 {
        match flow_point(series, t, &[x], &[xi], flow_steps, FlowDirection::Renormalizing) {
            Ok((y, eta)) => a.eval(&y, &eta).re,
            Err(_) => f64::NAN,
        }
    };
    let (b, aliasing) = project_on_lattice(transported, a.period(), grid, grid)?;
    if b.iter().any(|(_, c)| !c.re.is_finite()) {
        return Err(Error::Numerical("classical flow failed on the projection grid".into()));
    }
    let mut warnings = Vec::new();
    if aliasing > 1e-8 {
        warnings.push(format!("a∘Φ_t not resolved on a {grid}×{grid} grid (edge ratio {aliasing:.2e})"));
    }
    let residual = conjugated_distance(series, a, &b, t, hbar, j_cut, opts)?;
    Ok(EgorovReport { hbar, residual, aliasing, warnings })
}
