//! The cohomological hierarchy for the generator `H(t) = Σ t^{n−1} H_n` and the
//! counterterm derivative `R′(t) = Σ t^{n−1} R′_n`.
//!
//! At order `n`:
//!
//! ```text
//! [L_ω, H_n] = ψ_{n−1}(V − R′_1) − Σ_{m=2}^{n} ψ_{n−m}(R′_m),
//! ψ_0(a) = a,   ψ_j(a) = (1/j) Σ_{i<j} [H_{j−i}, ψ_i(a)],
//! ```
//!
//! with `R′_n` the `x`-average of the right-hand side and `H_n` the mean-free
//! solution. Expanding `ψ_j` gives the composition form
//! `ψ_j(a) = Σ c_{k₁…k_r} [H_{k_r}, … [H_{k₁}, a]]` over compositions of `j`,
//! which is used as an independent rebuild of the right-hand side. The same
//! terms are also produced by summing over decorated trees.

use std::collections::HashMap;

use itertools::Itertools;
use num_complex::Complex;
use num_traits::ToPrimitive;

use crate::divisors::{omega_recursive, sigma_tree, BoundCheck, DecoratedTree};
use crate::error::{Error, Result};
use crate::lattice::{FrequencyVector, Idx, Mode, TorusSymbol};
use crate::scalar::Real;
use crate::trees::{coefficient_c, composition_coefficient, compositions, enumerate_delta};
use crate::weyl::{Bracket, FourierWeight};

/// Solves `ω·∂_x F = V − ⟨V⟩` with `⟨F⟩ = 0`; returns `(F, ⟨V⟩)`.
pub fn solve_cohomological<T: Real>(v: &TorusSymbol<T>, freq: &FrequencyVector<T>) -> Result<(TorusSymbol<T>, TorusSymbol<T>)> {
    if v.dim() != freq.dim() {
        return Err(Error::Incompatible(format!("symbol dimension {} vs frequency dimension {}", v.dim(), freq.dim())));
    }
    let mut f = v.zero_like();
    let mut worst = T::zero();
    for (mode, c) in v.iter().filter(|(m, _)| !m.k.is_zero()) {
        let div = freq.dot(&mode.k);
        if div.is_zero() {
            return Err(Error::ZeroDivisor(mode.k.as_slice(v.dim()).to_vec()));
        }
        worst = worst.max(div.abs().recip());
        f.accumulate(*mode, *c / Complex::new(T::zero(), div));
    }
    f.add_tail(v.tail() * worst);
    f.normalize();
    Ok((f, v.x_average()))
}

/// `‖F‖_{s−σ} ≤ ς^{−1} (γ/(eσ))^γ ‖V‖_s` for the mean-free solution `F`.
pub fn cohomological_bound_check(v: &TorusSymbol<f64>, freq: &FrequencyVector<f64>, s: f64, sigma: f64) -> Result<BoundCheck> {
    let varsigma = freq
        .varsigma()
        .ok_or_else(|| Error::invalid("frequency vector has no Diophantine constant"))?;
    let (f, _) = solve_cohomological(v, freq)?;
    let g = freq.gamma_exp();
    let lhs = f.analytic_norm(s - sigma);
    let rhs = (g / (std::f64::consts::E * sigma)).powf(g) / varsigma * v.analytic_norm(s);
    Ok(BoundCheck { lhs, rhs })
}

/// `(H_n, R′_n)`.
#[derive(Clone, Debug, PartialEq)]
pub struct LindstedtOrder<T: Real> {
    pub h: TorusSymbol<T>,
    pub r: TorusSymbol<T>,
}

#[derive(Clone, Debug)]
pub struct LindstedtSeries<T: Real> {
    pub v: TorusSymbol<T>,
    pub omega: FrequencyVector<T>,
    pub bracket: Bracket<T>,
    /// `orders[n − 1] = (H_n, R′_n)`.
    pub orders: Vec<LindstedtOrder<T>>,
}

impl<T: Real> LindstedtSeries<T> {
    pub fn len(&self) -> usize {
        self.orders.len()
    }

    pub fn is_empty(&self) -> bool {
        self.orders.is_empty()
    }

    /// `H_n`, 1-based.
    pub fn h(&self, n: usize) -> &TorusSymbol<T> {
        &self.orders[n - 1].h
    }

    /// `R′_n`, 1-based.
    pub fn r(&self, n: usize) -> &TorusSymbol<T> {
        &self.orders[n - 1].r
    }

    /// `H(t) = Σ t^{n−1} H_n`.
    pub fn generator(&self, t: T) -> TorusSymbol<T> {
        self.power_sum(t, |o| &o.h, |n, t| t.powi(n as i32 - 1))
    }

    /// `R′(t) = Σ t^{n−1} R′_n`.
    pub fn counterterm_derivative(&self, t: T) -> TorusSymbol<T> {
        self.power_sum(t, |o| &o.r, |n, t| t.powi(n as i32 - 1))
    }

    /// `Σ_n ε^n ‖H_n‖_s`, the truncated joint norm.
    pub fn joint_norm(&self, s: T, eps: T) -> T {
        self.orders
            .iter()
            .enumerate()
            .map(|(i, o)| eps.powi(i as i32 + 1) * o.h.analytic_norm(s))
            .sum()
    }

    fn power_sum(
        &self,
        t: T,
        pick: impl Fn(&LindstedtOrder<T>) -> &TorusSymbol<T>,
        weight: impl Fn(usize, T) -> T,
    ) -> TorusSymbol<T> {
        let mut out = self.v.zero_like();
        for (i, o) in self.orders.iter().enumerate() {
            out += &pick(o).scale(weight(i + 1, t));
        }
        out
    }

    /// Right-hand side of order `n`, `−R′_n` included, rebuilt from the composition form.
    pub fn rhs(&self, n: usize) -> Result<TorusSymbol<T>> {
        if n == 0 || n > self.len() {
            return Err(Error::invalid(format!("order {n} outside 1..={}", self.len())));
        }
        let hs: Vec<&TorusSymbol<T>> = self.orders.iter().map(|o| &o.h).collect();
        let mut base = &self.v - self.r(1);
        let mut out = psi_compositions(&base, &hs, n - 1, self.bracket)?;
        for m in 2..=n {
            base = self.r(m).clone();
            out -= &psi_compositions(&base, &hs, n - m, self.bracket)?;
        }
        Ok(out)
    }

    /// `‖[L_ω, H_n] − rhs_n‖_0` with the rhs rebuilt independently.
    pub fn cohomological_residual(&self, n: usize) -> Result<T> {
        let rhs = self.rhs(n)?;
        Ok(self.h(n).transport(self.omega.omega()).distance(&rhs, T::zero()))
    }
}

/// `ψ_j(a)` through `ψ_i = (1/i) Σ [H_{i−l}, ψ_l]`.
pub(crate) fn psi_recursive<T: Real>(a: &TorusSymbol<T>, hs: &[TorusSymbol<T>], j: usize, bracket: Bracket<T>) -> Result<TorusSymbol<T>> {
    let mut psi = vec![a.clone()];
    for i in 1..=j {
        let mut next = a.zero_like();
        for (l, p) in psi.iter().enumerate() {
            next += &bracket.apply(&hs[i - l - 1], p)?;
        }
        psi.push(next.scale(T::from_int(i as i64).recip()));
    }
    Ok(psi.pop().expect("psi_0 is present"))
}

/// `ψ_j(a) = Σ_{k ⊨ j} c_k [H_{k_r}, … [H_{k₁}, a]]`.
fn psi_compositions<T: Real>(a: &TorusSymbol<T>, hs: &[&TorusSymbol<T>], j: usize, bracket: Bracket<T>) -> Result<TorusSymbol<T>> {
    if j == 0 {
        return Ok(a.clone());
    }
    let mut out = a.zero_like();
    for comp in compositions(j) {
        let mut nested = a.clone();
        for &k in &comp {
            nested = bracket.apply(hs[k - 1], &nested)?;
        }
        let ks: Vec<u64> = comp.iter().map(|&k| k as u64).collect();
        out += &nested.scale(rat_to(&composition_coefficient(&ks)));
    }
    Ok(out)
}

fn rat_to<T: Real>(r: &num_rational::BigRational) -> T {
    T::c(r.to_f64().expect("finite rational"))
}

/// `(H_n, R′_n)` for `n = 1..=orders` by direct recursion.
pub fn lindstedt_terms<T: Real>(
    v: &TorusSymbol<T>,
    freq: &FrequencyVector<T>,
    bracket: Bracket<T>,
    orders: usize,
) -> Result<LindstedtSeries<T>> {
    if orders == 0 {
        return Err(Error::invalid("at least one order is required"));
    }
    let mut hs: Vec<TorusSymbol<T>> = Vec::new();
    let mut rs: Vec<TorusSymbol<T>> = Vec::new();
    for n in 1..=orders {
        let rhs = if n == 1 {
            v.clone()
        } else {
            let mut acc = psi_recursive(&(v - &rs[0]), &hs, n - 1, bracket)?;
            for m in 2..n {
                acc -= &psi_recursive(&rs[m - 1], &hs, n - m, bracket)?;
            }
            acc
        };
        // The m = n term is R′_n itself, fixed as the average of what remains.
        let (h, r) = solve_cohomological(&rhs, freq)?;
        hs.push(h);
        rs.push(r);
    }
    Ok(series(v, freq, bracket, hs, rs))
}

fn series<T: Real>(
    v: &TorusSymbol<T>,
    freq: &FrequencyVector<T>,
    bracket: Bracket<T>,
    hs: Vec<TorusSymbol<T>>,
    rs: Vec<TorusSymbol<T>>,
) -> LindstedtSeries<T> {
    LindstedtSeries {
        v: v.clone(),
        omega: freq.clone(),
        bracket,
        orders: hs.into_iter().zip(rs).map(|(h, r)| LindstedtOrder { h, r }).collect(),
    }
}

/// `(H_n, R′_n)` by summing `Ω_{1,2}(δ, v) c(δ) Π V̂(w_i) σ(w, δ) e_{w₁+⋯+w_n}`
/// over trees `δ ∈ Δ(n)` and mode assignments `w_i ∈ supp V`.
pub fn lindstedt_terms_tree<T: Real>(
    v: &TorusSymbol<T>,
    freq: &FrequencyVector<T>,
    bracket: Bracket<T>,
    orders: usize,
) -> Result<LindstedtSeries<T>> {
    if orders == 0 || orders > 5 {
        return Err(Error::invalid("tree expansion supports 1..=5 orders"));
    }
    if v.dim() != freq.dim() {
        return Err(Error::Incompatible("symbol and frequency dimensions differ".into()));
    }
    let modes: Vec<(Mode, Complex<T>, FourierWeight<T>)> =
        v.iter().map(|(m, c)| (*m, *c, FourierWeight::of_mode(v, m))).collect();
    let d = v.dim();
    let mut hs = Vec::new();
    let mut rs = Vec::new();
    for n in 1..=orders {
        let mut h = v.zero_like();
        let mut r = v.zero_like();
        for tree in enumerate_delta(n)? {
            let c_tree: T = rat_to(&coefficient_c(&tree));
            let mut omegas: HashMap<Vec<Idx>, (Complex<T>, Complex<T>)> = HashMap::new();
            for pick in (0..n).map(|_| 0..modes.len()).multi_cartesian_product() {
                let ks: Vec<Idx> = pick.iter().map(|&i| modes[i].0.k).collect();
                let (o1, o2) = match omegas.get(&ks) {
                    Some(&hit) => hit,
                    None => {
                        let dt = DecoratedTree::new(tree.clone(), d, ks.clone())?;
                        let p = omega_recursive(&dt, freq.omega())?;
                        omegas.insert(ks, (p.omega1, p.omega2));
                        (p.omega1, p.omega2)
                    }
                };
                let ws: Vec<FourierWeight<T>> = pick.iter().map(|&i| modes[i].2).collect();
                let weight = c_tree * sigma_tree(&ws, &tree, bracket);
                if weight.is_zero() {
                    continue;
                }
                let coeff = pick.iter().fold(Complex::new(weight, T::zero()), |acc, &i| acc * modes[i].1);
                let mode = pick.iter().fold(Mode::ZERO, |acc, &i| acc + modes[i].0);
                h.accumulate(mode, coeff * o1);
                r.accumulate(mode, coeff * o2);
            }
        }
        h.normalize();
        r.normalize();
        hs.push(h);
        rs.push(r);
    }
    Ok(series(v, freq, bracket, hs, rs))
}

/// `R(t) = ∫₀ᵗ R′(τ) dτ = Σ (tⁿ/n) R′_n`.
pub fn counterterm<T: Real>(series: &LindstedtSeries<T>, t: T) -> TorusSymbol<T> {
    series.power_sum(t, |o| &o.r, |n, t| t.powi(n as i32) / T::from_int(n as i64))
}

/// One row of [`norm_growth_report`].
#[derive(Clone, Debug, PartialEq)]
pub struct NormRow<T> {
    pub n: usize,
    pub h_norm: T,
    pub r_norm: T,
    /// `‖H_n‖^{1/n}`.
    pub h_root: T,
    pub r_root: T,
}

#[derive(Clone, Debug, PartialEq)]
pub struct NormReport<T> {
    pub s: T,
    pub v_norm: T,
    pub rows: Vec<NormRow<T>>,
    /// Smallest `C` with `‖H_n‖_{s₀−σ} ≤ Cⁿ ‖V‖_{s₀}ⁿ` on the computed orders.
    pub constant: T,
}

/// Per-order norms at `s₀ − σ` and the empirical growth constant.
pub fn norm_growth_report<T: Real>(series: &LindstedtSeries<T>, s0: T, sigma: T) -> Result<NormReport<T>> {
    if !(sigma > T::zero() && sigma < s0) {
        return Err(Error::invalid("need 0 < sigma < s0"));
    }
    let s = s0 - sigma;
    let v_norm = series.v.analytic_norm(s0);
    let rows: Vec<NormRow<T>> = series
        .orders
        .iter()
        .enumerate()
        .map(|(i, o)| {
            let inv = T::from_int(i as i64 + 1).recip();
            let (h_norm, r_norm) = (o.h.analytic_norm(s), o.r.analytic_norm(s));
            NormRow { n: i + 1, h_norm, r_norm, h_root: h_norm.powf(inv), r_root: r_norm.powf(inv) }
        })
        .collect();
    let constant = if v_norm.is_zero() {
        T::zero()
    } else {
        rows.iter().map(|r| r.h_root / v_norm).fold(T::zero(), T::max)
    };
    if !constant.is_finite() {
        return Err(Error::Numerical("norm growth constant is not finite".into()));
    }
    Ok(NormReport { s, v_norm, rows, constant })
}

#[cfg(test)]
mod tests;
