//! Analytic symbols on `T^d × R^d` stored as finite Fourier lattices.
//!
//! A [`TorusSymbol`] represents
//! `a(x, ξ) = Σ c[k, m] exp(i k·x) exp(i η_m·ξ)` with `η_m = 2π m / L`,
//! i.e. a symbol periodic in `ξ` with period `L`. The Fourier weight of the
//! mode `(k, m)` is `w = (k, η_m)` and `|w| = |k| + |η_m|` (Euclidean norms).

mod diophantine;
mod idx;
mod json;
mod random;

use std::collections::BTreeMap;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;

pub use diophantine::{diophantine_estimate, elementary_sup, FrequencyVector};
pub use idx::{Idx, Mode, MAX_DIM};
pub use json::{CoeffEntry, SymbolFile};
pub use random::{random_symbol, RandomSymbolSpec};

/// Support caps and drop policy applied after every arithmetic operation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Truncation {
    /// Largest admitted `|k|_∞`.
    pub k_max: i32,
    /// Largest admitted `|m|_∞`.
    pub m_max: i32,
    /// Coefficients below `drop_rel · max|c|` are removed.
    pub drop_rel: f64,
}

impl Default for Truncation {
    fn default() -> Self {
        Truncation { k_max: 64, m_max: 64, drop_rel: 1e-16 }
    }
}

/// Finite Fourier-lattice symbol on `T^d × R^d`, periodic in `ξ`.
#[derive(Clone, Debug, PartialEq)]
pub struct TorusSymbol<T: Real> {
    d: usize,
    period: T,
    coeffs: BTreeMap<Mode, Complex<T>>,
    trunc: Truncation,
    tail: T,
}

impl<T: Real> TorusSymbol<T> {
    /// The zero symbol in dimension `d` with `ξ`-period `period`.
    pub fn new(d: usize, period: T) -> Result<Self> {
        if d == 0 || d > MAX_DIM {
            return Err(Error::invalid(format!("dimension {d} outside 1..={MAX_DIM}")));
        }
        if !(period > T::zero()) || !period.is_finite() {
            return Err(Error::invalid("xi-period must be positive and finite"));
        }
        Ok(TorusSymbol {
            d,
            period,
            coeffs: BTreeMap::new(),
            trunc: Truncation::default(),
            tail: T::zero(),
        })
    }

    /// Builds a symbol from `(mode, coefficient)` pairs; repeated modes are summed.
    pub fn from_modes<I>(d: usize, period: T, modes: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Mode, Complex<T>)>,
    {
        let mut a = Self::new(d, period)?;
        for (mode, c) in modes {
            a.check_mode(&mode)?;
            a.accumulate(mode, c);
        }
        a.normalize();
        Ok(a)
    }

    pub fn constant(d: usize, period: T, c: T) -> Result<Self> {
        Self::from_modes(d, period, [(Mode::ZERO, Complex::new(c, T::zero()))])
    }

    /// Same dimension, period and truncation, no coefficients.
    pub fn zero_like(&self) -> Self {
        TorusSymbol {
            d: self.d,
            period: self.period,
            coeffs: BTreeMap::new(),
            trunc: self.trunc,
            tail: T::zero(),
        }
    }

    pub fn with_truncation(mut self, trunc: Truncation) -> Self {
        self.trunc = trunc;
        self.normalize();
        self
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn period(&self) -> T {
        self.period
    }

    pub fn truncation(&self) -> Truncation {
        self.trunc
    }

    /// `s = 0` norm of everything removed by truncation so far.
    pub fn tail(&self) -> T {
        self.tail
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, mode: &Mode) -> Complex<T> {
        self.coeffs.get(mode).copied().unwrap_or_else(Complex::default)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Mode, &Complex<T>)> + '_ {
        self.coeffs.iter()
    }

    /// Adds `c` to the coefficient of `mode` without renormalizing.
    pub(crate) fn accumulate(&mut self, mode: Mode, c: Complex<T>) {
        *self.coeffs.entry(mode).or_default() += c;
    }

    pub(crate) fn add_tail(&mut self, t: T) {
        self.tail += t;
    }

    fn check_mode(&self, mode: &Mode) -> Result<()> {
        if mode.k.0[self.d..].iter().chain(&mode.m.0[self.d..]).any(|&x| x != 0) {
            return Err(Error::invalid(format!("mode {mode:?} has components beyond d = {}", self.d)));
        }
        Ok(())
    }

    /// Applies the support caps and the relative drop tolerance, moving every
    /// removed coefficient into the tail.
    pub(crate) fn normalize(&mut self) {
        let trunc = self.trunc;
        let mut dropped = T::zero();
        self.coeffs.retain(|mode, c| {
            let keep = mode.k.linf() <= trunc.k_max && mode.m.linf() <= trunc.m_max;
            if !keep {
                dropped += c.norm();
            }
            keep
        });
        let max = self.coeffs.values().map(|c| c.norm()).fold(T::zero(), T::max);
        let floor = max * T::c(trunc.drop_rel);
        self.coeffs.retain(|_, c| {
            let n = c.norm();
            let keep = n > floor && n > T::zero();
            if !keep {
                dropped += n;
            }
            keep
        });
        self.tail += dropped;
    }

    pub fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.d != other.d {
            return Err(Error::Incompatible(format!("dimensions {} and {}", self.d, other.d)));
        }
        let tol = T::c(1e-12) * self.period.abs();
        if (self.period - other.period).abs() > tol {
            return Err(Error::Incompatible(format!(
                "xi-periods {} and {}",
                self.period, other.period
            )));
        }
        Ok(())
    }

    /// `η_m = 2π m / L`.
    pub fn eta(&self, m: &Idx) -> [T; MAX_DIM] {
        let scale = T::TAU() / self.period;
        let mut out = [T::zero(); MAX_DIM];
        for (o, &mi) in out.iter_mut().zip(m.0.iter()).take(self.d) {
            *o = scale * T::from_int(mi as i64);
        }
        out
    }

    /// `|w| = |k| + |η|` for the Fourier weight of `mode`.
    pub fn weight_norm(&self, mode: &Mode) -> T {
        let eta = self.eta(&mode.m);
        let e2 = eta.iter().fold(T::zero(), |acc, &e| acc + e * e);
        mode.k.norm::<T>() + e2.sqrt()
    }

    /// `‖a‖_s = Σ |c[k,m]| exp(s(|k| + |η_m|))`.
    pub fn analytic_norm(&self, s: T) -> T {
        self.coeffs
            .iter()
            .map(|(mode, c)| c.norm() * (s * self.weight_norm(mode)).exp())
            .sum()
    }

    /// Pointwise evaluation at `(x, ξ)`; slices must have length `d`.
    pub fn eval(&self, x: &[T], xi: &[T]) -> Complex<T> {
        let mut acc = Complex::default();
        for (mode, c) in &self.coeffs {
            let eta = self.eta(&mode.m);
            let mut phase = T::zero();
            for i in 0..self.d {
                phase += T::from_int(mode.k.0[i] as i64) * x[i] + eta[i] * xi[i];
            }
            acc += *c * Complex::from_polar(T::one(), phase);
        }
        acc
    }

    /// Largest reality defect `|c[k,m] − conj(c[−k,−m])|`.
    pub fn reality_defect(&self) -> T {
        self.coeffs
            .iter()
            .map(|(mode, c)| (*c - self.coeff(&-*mode).conj()).norm())
            .fold(T::zero(), T::max)
    }

    pub fn is_real(&self, tol: T) -> bool {
        self.reality_defect() <= tol
    }

    /// Coefficient-wise `(c[k,m] + conj(c[−k,−m])) / 2`, i.e. the real part of the function.
    pub fn real_part(&self) -> Self {
        let half = T::c(0.5);
        let mut out = self.zero_like();
        out.tail = self.tail;
        for (mode, c) in &self.coeffs {
            out.accumulate(*mode, *c * half);
            out.accumulate(-*mode, c.conj() * half);
        }
        out.normalize();
        out
    }

    fn map_modes(&self, f: impl Fn(&Mode, Complex<T>) -> Complex<T>) -> Self {
        let mut out = self.zero_like();
        out.tail = self.tail;
        for (mode, c) in &self.coeffs {
            out.coeffs.insert(*mode, f(mode, *c));
        }
        out.normalize();
        out
    }

    /// `∂a/∂x_j`.
    pub fn dx(&self, j: usize) -> Self {
        self.map_modes(|mode, c| c * Complex::new(T::zero(), T::from_int(mode.k.0[j] as i64)))
    }

    /// `∂a/∂ξ_j`.
    pub fn dxi(&self, j: usize) -> Self {
        self.map_modes(|mode, c| c * Complex::new(T::zero(), self.eta(&mode.m)[j]))
    }

    /// Transport derivative `ω·∂_x a`.
    pub fn transport(&self, omega: &[T]) -> Self {
        self.map_modes(|mode, c| c * Complex::new(T::zero(), mode.k.dot(omega)))
    }

    /// The `x`-average: the `k = 0` slice.
    pub fn x_average(&self) -> Self {
        let mut out = self.zero_like();
        for (mode, c) in self.coeffs.iter().filter(|(m, _)| m.k.is_zero()) {
            out.coeffs.insert(*mode, *c);
        }
        out
    }

    /// The `k ≠ 0` part.
    pub fn oscillating_part(&self) -> Self {
        let mut out = self.zero_like();
        for (mode, c) in self.coeffs.iter().filter(|(m, _)| !m.k.is_zero()) {
            out.coeffs.insert(*mode, *c);
        }
        out
    }

    pub fn is_x_independent(&self) -> bool {
        self.coeffs.keys().all(|m| m.k.is_zero())
    }

    pub fn k_support(&self) -> i32 {
        self.coeffs.keys().map(|m| m.k.linf()).max().unwrap_or(0)
    }

    pub fn m_support(&self) -> i32 {
        self.coeffs.keys().map(|m| m.m.linf()).max().unwrap_or(0)
    }

    pub fn scale(&self, s: T) -> Self {
        self.map_modes(|_, c| c * s)
    }

    pub fn scale_complex(&self, s: Complex<T>) -> Self {
        self.map_modes(|_, c| c * s)
    }

    /// Lossy conversion to another scalar type.
    pub fn cast<U: Real>(&self) -> TorusSymbol<U> {
        let conv = |x: T| U::c(x.as_f64());
        TorusSymbol {
            d: self.d,
            period: conv(self.period),
            coeffs: self
                .coeffs
                .iter()
                .map(|(m, c)| (*m, Complex::new(conv(c.re), conv(c.im))))
                .collect(),
            trunc: self.trunc,
            tail: conv(self.tail),
        }
    }

    /// `‖a − b‖_s` without building the difference.
    pub fn distance(&self, other: &Self, s: T) -> T {
        (self - other).analytic_norm(s)
    }
}

impl<T: Real> AddAssign<&TorusSymbol<T>> for TorusSymbol<T> {
    fn add_assign(&mut self, rhs: &TorusSymbol<T>) {
        self.check_compatible(rhs).expect("adding incompatible symbols");
        for (mode, c) in &rhs.coeffs {
            self.accumulate(*mode, *c);
        }
        self.tail += rhs.tail;
        self.normalize();
    }
}

impl<T: Real> SubAssign<&TorusSymbol<T>> for TorusSymbol<T> {
    fn sub_assign(&mut self, rhs: &TorusSymbol<T>) {
        self.check_compatible(rhs).expect("subtracting incompatible symbols");
        for (mode, c) in &rhs.coeffs {
            self.accumulate(*mode, -*c);
        }
        self.tail += rhs.tail;
        self.normalize();
    }
}

impl<T: Real> Add for &TorusSymbol<T> {
    type Output = TorusSymbol<T>;
    fn add(self, rhs: Self) -> TorusSymbol<T> {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl<T: Real> Sub for &TorusSymbol<T> {
    type Output = TorusSymbol<T>;
    fn sub(self, rhs: Self) -> TorusSymbol<T> {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl<T: Real> Neg for &TorusSymbol<T> {
    type Output = TorusSymbol<T>;
    fn neg(self) -> TorusSymbol<T> {
        self.map_modes(|_, c| -c)
    }
}

impl<T: Real> Mul<T> for &TorusSymbol<T> {
    type Output = TorusSymbol<T>;
    fn mul(self, s: T) -> TorusSymbol<T> {
        self.scale(s)
    }
}

/// `ω·ξ + p(x, ξ)`; the linear part is kept exact, never sampled on the lattice.
#[derive(Clone, Debug, PartialEq)]
pub struct AffineSymbol<T: Real> {
    pub omega: FrequencyVector<T>,
    pub periodic: TorusSymbol<T>,
}

impl<T: Real> AffineSymbol<T> {
    pub fn new(omega: FrequencyVector<T>, periodic: TorusSymbol<T>) -> Result<Self> {
        if omega.dim() != periodic.dim() {
            return Err(Error::Incompatible(format!(
                "frequency of dimension {} with symbol of dimension {}",
                omega.dim(),
                periodic.dim()
            )));
        }
        Ok(AffineSymbol { omega, periodic })
    }

    /// The unperturbed `L_ω = ω·ξ`.
    pub fn transport(omega: FrequencyVector<T>, period: T) -> Result<Self> {
        let p = TorusSymbol::new(omega.dim(), period)?;
        Self::new(omega, p)
    }

    pub fn eval(&self, x: &[T], xi: &[T]) -> Complex<T> {
        let lin = self.omega.omega().iter().zip(xi).fold(T::zero(), |a, (&w, &z)| a + w * z);
        self.periodic.eval(x, xi) + lin
    }
}
