use num_complex::Complex;
use rand::Rng;

use super::idx::{Idx, Mode};
use super::TorusSymbol;
use crate::error::Result;
use crate::scalar::Real;

/// Shape of a randomly drawn symbol.
#[derive(Clone, Copy, Debug)]
pub struct RandomSymbolSpec {
    pub d: usize,
    pub period: f64,
    pub k_max: i32,
    pub m_max: i32,
    pub modes: usize,
    pub real: bool,
    /// Coefficient magnitudes are scaled by `exp(−decay · (|k|_1 + |m|_1))`.
    pub decay: f64,
}

impl Default for RandomSymbolSpec {
    fn default() -> Self {
        RandomSymbolSpec { d: 1, period: std::f64::consts::TAU, k_max: 3, m_max: 3, modes: 8, real: true, decay: 0.5 }
    }
}

/// Draws a symbol with up to `spec.modes` modes (fewer if draws collide).
pub fn random_symbol<T: Real, R: Rng + ?Sized>(rng: &mut R, spec: &RandomSymbolSpec) -> Result<TorusSymbol<T>> {
    let mut draws = Vec::with_capacity(spec.modes * 2);
    for _ in 0..spec.modes {
        let mut k = [0i32; 3];
        let mut m = [0i32; 3];
        for i in 0..spec.d {
            k[i] = rng.gen_range(-spec.k_max..=spec.k_max);
            m[i] = rng.gen_range(-spec.m_max..=spec.m_max);
        }
        let mode = Mode::new(Idx(k), Idx(m));
        let l1: i32 = k.iter().chain(&m).map(|x| x.abs()).sum();
        let mag = (-spec.decay * l1 as f64).exp();
        let c = Complex::new(rng.gen_range(-1.0..1.0) * mag, rng.gen_range(-1.0..1.0) * mag);
        let c = Complex::new(T::c(c.re), T::c(c.im));
        if spec.real {
            let half = T::c(0.5);
            draws.push((mode, c * half));
            draws.push((-mode, c.conj() * half));
        } else {
            draws.push((mode, c));
        }
    }
    TorusSymbol::from_modes(spec.d, T::c(spec.period), draws)
}
