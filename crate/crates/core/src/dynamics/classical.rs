use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::TorusSymbol;
use crate::lindstedt::{counterterm, LindstedtSeries};

/// Which map a trajectory computes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FlowDirection {
    /// `Φ^{−H}_t`: forward flow of the Hamiltonian `−H(τ)`, `τ ∈ [0, t]`.
    MinusH,
    /// `Φ_t = (Φ^{−H}_t)^{−1}`, by integrating the same field from `τ = t` back to `0`.
    Renormalizing,
}

/// `∂_x H_n`, `∂_ξ H_n` per order and component.
struct Gradients {
    d: usize,
    dx: Vec<Vec<TorusSymbol<f64>>>,
    dxi: Vec<Vec<TorusSymbol<f64>>>,
}

impl Gradients {
    fn new(series: &LindstedtSeries<f64>) -> Self {
        let d = series.v.dim();
        Gradients {
            d,
            dx: series.orders.iter().map(|o| (0..d).map(|j| o.h.dx(j)).collect()).collect(),
            dxi: series.orders.iter().map(|o| (0..d).map(|j| o.h.dxi(j)).collect()).collect(),
        }
    }

    /// Field of `−H(τ)`: `ẋ = −∂_ξ H`, `ξ̇ = ∂_x H`.
    fn field(&self, tau: f64, y: &[f64]) -> Vec<f64> {
        let (x, xi) = y.split_at(self.d);
        let mut out = vec![0.0; 2 * self.d];
        let mut p = 1.0;
        for (gx, gxi) in self.dx.iter().zip(&self.dxi) {
            for j in 0..self.d {
                out[j] -= p * gxi[j].eval(x, xi).re;
                out[self.d + j] += p * gx[j].eval(x, xi).re;
            }
            p *= tau;
        }
        out
    }
}

/// One two-stage Gauss–Legendre step; the stage equations are solved by fixed-point iteration.
fn gauss_legendre_step(g: &Gradients, tau: f64, dt: f64, y: &[f64]) -> Result<Vec<f64>> {
    let r = 3f64.sqrt() / 6.0;
    let a = [[0.25, 0.25 - r], [0.25 + r, 0.25]];
    let c = [0.5 - r, 0.5 + r];
    let n = y.len();
    let mut k = [g.field(tau, y), g.field(tau, y)];
    for _ in 0..100 {
        let stage = |i: usize, k: &[Vec<f64>; 2]| -> Vec<f64> {
            (0..n).map(|j| y[j] + dt * (a[i][0] * k[0][j] + a[i][1] * k[1][j])).collect()
        };
        let next = [g.field(tau + c[0] * dt, &stage(0, &k)), g.field(tau + c[1] * dt, &stage(1, &k))];
        let change = (0..2)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| (next[i][j] - k[i][j]).abs())
            .fold(0.0, f64::max);
        k = next;
        if change <= 1e-15 * (1.0 + k[0].iter().fold(0.0f64, |m, v| m.max(v.abs()))) {
            return Ok((0..n).map(|j| y[j] + dt * 0.5 * (k[0][j] + k[1][j])).collect());
        }
    }
    Err(Error::Numerical(format!("Gauss-Legendre stages did not converge (dt = {dt})")))
}

/// Image of `(x, ξ)` under `Φ^{−H}_t` or `Φ_t`.
pub fn flow_point(series: &LindstedtSeries<f64>, t: f64, x: &[f64], xi: &[f64], steps: usize, dir: FlowDirection) -> Result<(Vec<f64>, Vec<f64>)> {
    flow_with(&Gradients::new(series), t, x, xi, steps, dir)
}

fn flow_with(g: &Gradients, t: f64, x: &[f64], xi: &[f64], steps: usize, dir: FlowDirection) -> Result<(Vec<f64>, Vec<f64>)> {
    if x.len() != g.d || xi.len() != g.d || steps == 0 {
        return Err(Error::invalid("point dimension mismatch or zero steps"));
    }
    let mut y: Vec<f64> = x.iter().chain(xi).copied().collect();
    let (mut tau, dt) = match dir {
        FlowDirection::MinusH => (0.0, t / steps as f64),
        FlowDirection::Renormalizing => (t, -t / steps as f64),
    };
    for _ in 0..steps {
        y = gauss_legendre_step(g, tau, dt, &y)?;
        tau += dt;
    }
    let xi = y.split_off(g.d);
    Ok((y, xi))
}

/// `Φ_t` sampled on a grid of phase-space points.
#[derive(Clone, Debug, Serialize)]
pub struct PhaseFlowMap {
    pub t: f64,
    pub points: Vec<(Vec<f64>, Vec<f64>)>,
    pub images: Vec<(Vec<f64>, Vec<f64>)>,
    /// `max |det DΦ_t − 1|` (d = 1) or `max |DΦᵀ J DΦ − J|` over sampled stencils.
    pub symplectic_defect: f64,
}

impl PhaseFlowMap {
    /// `sup |Φ_t(z) − z|` over the samples.
    pub fn displacement(&self) -> f64 {
        self.points
            .iter()
            .zip(&self.images)
            .flat_map(|((x, xi), (y, eta))| x.iter().zip(y).chain(xi.iter().zip(eta)).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max)
    }
}

/// `Φ_t` on the tensor grid `x ∈ [0, 2π)^d` (`nx` per axis) × `ξ ∈ xi_range` (`nxi` per axis).
pub fn classical_flow(
    series: &LindstedtSeries<f64>,
    t: f64,
    nx: usize,
    nxi: usize,
    xi_range: (f64, f64),
    steps: usize,
) -> Result<PhaseFlowMap> {
    let g = Gradients::new(series);
    let d = g.d;
    let axis_x: Vec<f64> = (0..nx).map(|i| std::f64::consts::TAU * i as f64 / nx as f64).collect();
    let axis_xi: Vec<f64> = (0..nxi)
        .map(|i| xi_range.0 + (xi_range.1 - xi_range.0) * i as f64 / (nxi.max(2) - 1) as f64)
        .collect();
    let mut points = Vec::new();
    for ix in itertools::Itertools::multi_cartesian_product((0..d).map(|_| axis_x.iter().copied())) {
        for ixi in itertools::Itertools::multi_cartesian_product((0..d).map(|_| axis_xi.iter().copied())) {
            points.push((ix.clone(), ixi));
        }
    }
    let images = points
        .iter()
        .map(|(x, xi)| flow_with(&g, t, x, xi, steps, FlowDirection::Renormalizing))
        .collect::<Result<Vec<_>>>()?;

    let h = 1e-5;
    let mut symplectic_defect: f64 = 0.0;
    for (x, xi) in points.iter().step_by((points.len() / 8).max(1)) {
        let z: Vec<f64> = x.iter().chain(xi).copied().collect();
        let mut jac = vec![vec![0.0; 2 * d]; 2 * d];
        for col in 0..2 * d {
            let mut zp = z.clone();
            let mut zm = z.clone();
            zp[col] += h;
            zm[col] -= h;
            let (xp, xip) = flow_with(&g, t, &zp[..d], &zp[d..], steps, FlowDirection::Renormalizing)?;
            let (xm, xim) = flow_with(&g, t, &zm[..d], &zm[d..], steps, FlowDirection::Renormalizing)?;
            let fp: Vec<f64> = xp.into_iter().chain(xip).collect();
            let fm: Vec<f64> = xm.into_iter().chain(xim).collect();
            for row in 0..2 * d {
                jac[row][col] = (fp[row] - fm[row]) / (2.0 * h);
            }
        }
        // DΦᵀ J DΦ with J = [[0, I], [−I, 0]].
        for r in 0..2 * d {
            for c in 0..2 * d {
                let mut acc = 0.0;
                for k in 0..d {
                    acc += jac[k][r] * jac[d + k][c] - jac[d + k][r] * jac[k][c];
                }
                let target = if c == r + d { 1.0 } else if r == c + d { -1.0 } else { 0.0 };
                symplectic_defect = symplectic_defect.max((acc - target).abs());
            }
        }
    }
    Ok(PhaseFlowMap { t, points, images, symplectic_defect })
}

/// `max |(L_ω + tV − R(t))(Φ_t(z)) − ω·ξ|` over the sampled points.
pub fn classical_residual(series: &LindstedtSeries<f64>, map: &PhaseFlowMap) -> f64 {
    let periodic = &series.v.scale(map.t) - &counterterm(series, map.t);
    let omega = series.omega.omega();
    map.points
        .iter()
        .zip(&map.images)
        .map(|((_, xi), (y, eta))| {
            let l_image: f64 = omega.iter().zip(eta).map(|(w, e)| w * e).sum();
            let l_point: f64 = omega.iter().zip(xi).map(|(w, e)| w * e).sum();
            (l_image + periodic.eval(y, eta).re - l_point).abs()
        })
        .fold(0.0, f64::max)
}
