use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::{QuantizedGenerator, C64};
use crate::error::{Error, Result};
use crate::weyl::expm_hermitian;

/// Time stepper for `dU/dt = −(i/ħ) H(t) U`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    /// `exp(−(i/ħ) H(t + dt/2) dt)`, second order.
    Midpoint,
    /// Two-point Gauss Magnus expansion, fourth order.
    Magnus4,
}

#[derive(Clone, Debug)]
pub struct PropagatorPath {
    pub scheme: Scheme,
    pub steps: usize,
    pub times: Vec<f64>,
    /// `U(times[i])`; only the endpoints unless the full path was requested.
    pub unitaries: Vec<DMatrix<C64>>,
    pub max_unitary_defect: f64,
}

impl PropagatorPath {
    pub fn last(&self) -> &DMatrix<C64> {
        self.unitaries.last().expect("a path has at least its initial point")
    }

    /// `U(t)*`, the solution of the adjoint equation.
    pub fn adjoint(&self) -> DMatrix<C64> {
        self.last().adjoint()
    }
}

fn unitary_defect(u: &DMatrix<C64>) -> f64 {
    let p = u.adjoint() * u;
    p.iter()
        .enumerate()
        .map(|(i, z)| {
            let (r, c) = (i % p.nrows(), i / p.nrows());
            let id = if r == c { 1.0 } else { 0.0 };
            (z - C64::new(id, 0.0)).norm()
        })
        .fold(0.0, f64::max)
}

/// Propagates from `0` to `t` in `steps` equal steps.
pub fn propagate(gen: &QuantizedGenerator, t: f64, steps: usize, scheme: Scheme, record: bool) -> Result<PropagatorPath> {
    if steps == 0 || !t.is_finite() {
        return Err(Error::invalid("need a finite time and at least one step"));
    }
    let n = gen.dim();
    let hbar = gen.hbar;
    let mut u = DMatrix::<C64>::identity(n, n);
    let mut times = vec![0.0];
    let mut unitaries = vec![u.clone()];
    let dt = t / steps as f64;
    if gen.is_zero() {
        return Ok(PropagatorPath { scheme, steps, times: vec![0.0, t], unitaries: vec![u.clone(), u], max_unitary_defect: 0.0 });
    }
    let mut worst: f64 = 0.0;
    for s in 0..steps {
        let tau = s as f64 * dt;
        let step = match scheme {
            Scheme::Midpoint => expm_hermitian(&gen.at(tau + dt / 2.0), dt / hbar),
            Scheme::Magnus4 => {
                let off = 3f64.sqrt() / 6.0;
                let a1 = gen.at(tau + dt * (0.5 - off));
                let a2 = gen.at(tau + dt * (0.5 + off));
                let comm = &a2 * &a1 - &a1 * &a2;
                let g = (&a1 + &a2) * C64::new(dt / 2.0, 0.0) - comm * C64::new(0.0, 3f64.sqrt() * dt * dt / (12.0 * hbar));
                expm_hermitian(&g, 1.0 / hbar)
            }
        };
        u = step * u;
        if record || s + 1 == steps {
            let defect = unitary_defect(&u);
            worst = worst.max(defect);
            if defect > 1e-8 {
                return Err(Error::Numerical(format!("unitarity drift {defect:.3e} at t = {:.4}", tau + dt)));
            }
            times.push(tau + dt);
            unitaries.push(u.clone());
        }
    }
    Ok(PropagatorPath { scheme, steps, times, unitaries, max_unitary_defect: worst })
}
