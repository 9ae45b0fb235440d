use itertools::Itertools;

use super::idx::{Idx, MAX_DIM};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Frequency vector `ω` with Diophantine data `|ω·k| ≥ ς / |k|^γ`.
#[derive(Clone, Debug, PartialEq)]
pub struct FrequencyVector<T: Real> {
    omega: Vec<T>,
    gamma_exp: T,
    varsigma: Option<T>,
}

impl<T: Real> FrequencyVector<T> {
    pub fn new(omega: Vec<T>, gamma_exp: T) -> Result<Self> {
        let d = omega.len();
        if d == 0 || d > MAX_DIM {
            return Err(Error::invalid(format!("frequency dimension {d} outside 1..={MAX_DIM}")));
        }
        if omega.iter().any(|w| !w.is_finite()) || omega.iter().all(|w| w.is_zero()) {
            return Err(Error::invalid("frequency vector must be finite and nonzero"));
        }
        if !(gamma_exp > T::zero()) || gamma_exp < T::from_int(d as i64 - 1) {
            return Err(Error::invalid(format!(
                "Diophantine exponent {gamma_exp} must be positive and at least d - 1"
            )));
        }
        Ok(FrequencyVector { omega, gamma_exp, varsigma: None })
    }

    pub fn dim(&self) -> usize {
        self.omega.len()
    }

    pub fn omega(&self) -> &[T] {
        &self.omega
    }

    pub fn gamma_exp(&self) -> T {
        self.gamma_exp
    }

    pub fn varsigma(&self) -> Option<T> {
        self.varsigma
    }

    pub fn with_varsigma(mut self, varsigma: T) -> Result<Self> {
        if !(varsigma > T::zero()) {
            return Err(Error::invalid("varsigma must be positive"));
        }
        self.varsigma = Some(varsigma);
        Ok(self)
    }

    /// Stores the largest `ς` valid on `0 < |k|_∞ ≤ k_max`.
    pub fn estimate_varsigma(self, k_max: i32) -> Result<Self> {
        let v = diophantine_estimate(&self.omega, self.gamma_exp, k_max)?;
        self.with_varsigma(v)
    }

    /// `ω·k`.
    pub fn dot(&self, k: &Idx) -> T {
        k.dot(&self.omega)
    }
}

/// `min |ω·k| |k|^γ` over `0 < |k|_∞ ≤ k_max`.
pub fn diophantine_estimate<T: Real>(omega: &[T], gamma_exp: T, k_max: i32) -> Result<T> {
    let d = omega.len();
    if d == 0 || d > MAX_DIM || omega.iter().all(|w| w.is_zero()) {
        return Err(Error::invalid("frequency vector must be nonzero with 1 <= d <= 3"));
    }
    if k_max < 1 {
        return Err(Error::invalid("k_max must be at least 1"));
    }
    let mut best = T::infinity();
    for k in (0..d).map(|_| -k_max..=k_max).multi_cartesian_product() {
        let k = Idx::from_slice(&k);
        if k.is_zero() {
            continue;
        }
        let dot = k.dot(omega);
        if dot.is_zero() {
            return Err(Error::ZeroDivisor(k.as_slice(d).to_vec()));
        }
        best = best.min(dot.abs() * k.norm::<T>().powf(gamma_exp));
    }
    Ok(best)
}

/// `sup_{t ≥ 0} t^m exp(−t s) = (m / (e s))^m`.
pub fn elementary_sup<T: Real>(m: T, s: T) -> T {
    (m / (T::E() * s)).powf(m)
}
