use std::collections::HashMap;
use std::fmt::Debug;
use std::ops::Neg;

use num_complex::Complex;
use num_traits::{FromPrimitive, Num};

use super::{bits, DecoratedTree, NodeSet};
use crate::error::{Error, Result};
use crate::lattice::Idx;

/// Scalar field for `Ω` coefficients: `f64` for sweeps, `BigRational` for exact checks.
pub trait OmegaField: Clone + Num + Neg<Output = Self> + FromPrimitive + Debug {}

impl<F: Clone + Num + Neg<Output = F> + FromPrimitive + Debug> OmegaField for F {}

#[derive(Clone, Debug, PartialEq)]
pub struct OmegaPair<F> {
    pub omega1: Complex<F>,
    pub omega2: Complex<F>,
}

/// `(i ω·g)^{−1}`.
pub(crate) fn inv_divisor<F: OmegaField>(omega: &[F], g: &Idx) -> Result<Complex<F>> {
    let dot = omega
        .iter()
        .zip(g.0.iter())
        .fold(F::zero(), |acc, (w, &k)| acc + w.clone() * F::from_i32(k).expect("small integer"));
    if dot.is_zero() {
        return Err(Error::ZeroDivisor(g.as_slice(omega.len()).to_vec()));
    }
    Ok(Complex::new(F::zero(), -(F::one() / dot)))
}

/// `Ω₁(δ, v)` and `Ω₂(δ, v)` by recursion over the root.
///
/// For a subtree `S` with root `r`, branches `A_S(a₁), …, A_S(a_j)` and
/// `Π = Π Ω₁(A_S(aᵢ))`:
///
/// - `Ω(S) = Σ_B Ω₂(S ∖ A_S(B)) Π_b Ω₁(A_S(b))` over root resonances `(B, r)`,
/// - `Ω₁(S) = (i ω·Σ_S v)^{−1} (Π − Ω(S))` if `Σ_S v ≠ 0`, else `0`,
/// - `Ω₂(S) = Π − Ω(S)` if `Σ_S v = 0`, else `0`.
///
/// Complements `S ∖ A_S(B)` are again subtrees, so the recursion is memoised
/// on node masks.
pub fn omega_recursive<F: OmegaField>(dt: &DecoratedTree, omega: &[F]) -> Result<OmegaPair<F>> {
    if omega.len() != dt.dim() {
        return Err(Error::invalid(format!("frequency has {} components, weights {}", omega.len(), dt.dim())));
    }
    let mut solver = Solver { dt, omega, memo: HashMap::new() };
    let (omega1, omega2) = solver.solve(dt.all())?;
    Ok(OmegaPair { omega1, omega2 })
}

struct Solver<'a, F> {
    dt: &'a DecoratedTree,
    omega: &'a [F],
    memo: HashMap<NodeSet, (Complex<F>, Complex<F>)>,
}

impl<F: OmegaField> Solver<'_, F> {
    fn solve(&mut self, s: NodeSet) -> Result<(Complex<F>, Complex<F>)> {
        if let Some(hit) = self.memo.get(&s) {
            return Ok(hit.clone());
        }
        let dt = self.dt;
        let root = DecoratedTree::top(s);
        let total = dt.weight(s);

        let mut prod = Complex::new(F::one(), F::zero());
        for &c in dt.tree().children(root) {
            if s >> c & 1 == 1 {
                prod = prod * self.solve(dt.below(c) & s)?.0;
            }
        }

        let mut resonant = Complex::new(F::zero(), F::zero());
        let rest = s & !(1 << root);
        let mut sub = rest;
        loop {
            let top = sub | 1 << root;
            if top != s && dt.weight(top).is_zero() && dt.is_upward_closed(top, s) {
                let mut term = self.solve(top)?.1;
                let lower = s & !top;
                for b in bits(lower).filter(|&b| dt.tree().parent(b).is_some_and(|p| top >> p & 1 == 1)) {
                    term = term * self.solve(dt.below(b) & s)?.0;
                }
                resonant = resonant + term;
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & rest;
        }

        let zero = Complex::new(F::zero(), F::zero());
        let out = if total.is_zero() {
            (zero, prod - resonant)
        } else {
            (inv_divisor(self.omega, &total)? * (prod - resonant), zero)
        };
        self.memo.insert(s, out.clone());
        Ok(out)
    }
}
