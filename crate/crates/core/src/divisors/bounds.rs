use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{omega_recursive, rho, DecoratedTree};
use crate::error::{Error, Result};
use crate::lattice::{FrequencyVector, Idx};
use crate::scalar::Real;
use crate::trees::{coefficient_c, TreeIndexSet};
use crate::weyl::{Bracket, FourierWeight};

/// Weight of `[H_j, … [H_1, e_w]]` for `H_l = e_{w_l}`:
/// `Π_l β(w_l, w + w_1 + ⋯ + w_{l−1})` with `β` the bracket weight.
pub fn sigma_weight<T: Real>(w: &FourierWeight<T>, args: &[FourierWeight<T>], bracket: Bracket<T>) -> T {
    let mut acc = *w;
    let mut out = T::one();
    for a in args {
        out *= bracket.weight(a, &acc);
        acc = acc.add(a);
    }
    out
}

/// Tree weight: at every node the root weight is bracketed with the branch
/// sums, lowest-label branch innermost, times the weights of the branches.
pub fn sigma_tree<T: Real>(ws: &[FourierWeight<T>], tree: &TreeIndexSet, bracket: Bracket<T>) -> T {
    assert_eq!(ws.len(), tree.n(), "one weight per node");
    node_weight(ws, tree, tree.root(), bracket)
}

fn node_weight<T: Real>(ws: &[FourierWeight<T>], tree: &TreeIndexSet, c: usize, bracket: Bracket<T>) -> T {
    let mut sums = Vec::new();
    let mut out = T::one();
    for &child in tree.children(c).iter().rev() {
        sums.push(tree.subtree(child).fold(FourierWeight::zero(), |acc, i| acc.add(&ws[i])));
        out *= node_weight(ws, tree, child, bracket);
    }
    out * sigma_weight(&ws[c], &sums, bracket)
}

/// Two sides of a numerically tested inequality `lhs ≤ rhs`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundCheck {
    pub lhs: f64,
    pub rhs: f64,
}

impl BoundCheck {
    pub fn holds(&self) -> bool {
        self.lhs <= self.rhs * (1.0 + 1e-12)
    }
}

/// `|Ω₁(δ,v)| ≤ ρ(δ,v) (2^{4γ+3}/ς)^n Π_{v_j ≠ 0} |v_j|^{3γ}`.
pub fn eliasson_bound_check(dt: &DecoratedTree, freq: &FrequencyVector<f64>) -> Result<BoundCheck> {
    let varsigma = freq
        .varsigma()
        .ok_or_else(|| Error::invalid("frequency vector has no Diophantine constant"))?;
    let lhs = omega_recursive(dt, freq.omega())?.omega1.norm();
    let g = freq.gamma_exp();
    let n = dt.n() as i32;
    let weights: f64 = dt
        .v()
        .iter()
        .filter(|v| !v.is_zero())
        .map(|v| v.norm::<f64>().powf(3.0 * g))
        .product();
    let rhs = rho(dt)? as f64 * (2f64.powf(4.0 * g + 3.0) / varsigma).powi(n) * weights;
    Ok(BoundCheck { lhs, rhs })
}

/// `c(δ) sup_w |σ(w,δ)| e^{−σ Σ|w_i|} ≤ C^{n−1} ((n−1)^{n−1}/(n−1)!)² (eσ)^{−2(n−1)}`,
/// the supremum estimated on `samples` random lattice weights in a box of
/// radius `~ n/σ` plus the zero configuration.
pub fn analytic_part_bound_check(
    tree: &TreeIndexSet,
    sigma: f64,
    c_const: f64,
    bracket: Bracket<f64>,
    samples: usize,
    seed: u64,
) -> BoundCheck {
    let n = tree.n();
    let coeff = rat_to_f64(&coefficient_c(tree));
    let radius = (2.0 * n as f64 / sigma).ceil() as i32 + 2;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = (sigma_tree(&vec![FourierWeight::zero(); n], tree, bracket)).abs();
    for _ in 0..samples {
        let ws: Vec<FourierWeight<f64>> = (0..n)
            .map(|_| {
                let k = rng.gen_range(-radius..=radius);
                let m = rng.gen_range(-radius..=radius) as f64;
                FourierWeight::new(Idx::scalar(k), [m, 0.0, 0.0])
            })
            .collect();
        let size: f64 = ws.iter().map(|w| w.k.norm::<f64>() + w.eta[0].abs()).sum();
        best = best.max(sigma_tree(&ws, tree, bracket).abs() * (-sigma * size).exp());
    }
    let m = (n - 1) as i32;
    let fact: f64 = (1..=m).map(f64::from).product();
    let rhs = c_const.powi(m) * (f64::from(m).powi(m) / fact).powi(2) * (std::f64::consts::E * sigma).powi(-2 * m);
    BoundCheck { lhs: coeff * best, rhs }
}

fn rat_to_f64(r: &num_rational::BigRational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}
