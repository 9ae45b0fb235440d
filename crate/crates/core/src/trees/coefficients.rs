use itertools::Itertools;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::TreeIndexSet;
use crate::error::{Error, Result};

fn recip(n: u64) -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(n))
}

/// `c_{k₁,…,k_j} = ∏ᵢ 1/(k₁ + ⋯ + kᵢ)`.
pub fn composition_coefficient(ks: &[u64]) -> BigRational {
    assert!(ks.iter().all(|&k| k > 0), "composition parts must be positive");
    let mut partial = 0;
    ks.iter().fold(BigRational::one(), |acc, &k| {
        partial += k;
        acc * recip(partial)
    })
}

/// `Σ_{σ ∈ P_j} c_{σ(k)} = ∏ 1/kᵢ`, checked exactly.
pub fn permutation_sum_check(ks: &[u64]) -> Result<bool> {
    if ks.is_empty() || ks.len() > 8 {
        return Err(Error::invalid("permutation sums are checked for 1..=8 parts"));
    }
    let lhs = ks
        .iter()
        .copied()
        .permutations(ks.len())
        .map(|p| composition_coefficient(&p))
        .fold(BigRational::zero(), |a, b| a + b);
    let rhs = ks.iter().fold(BigRational::one(), |acc, &k| acc * recip(k));
    Ok(lhs == rhs)
}

/// `(1/l₁) c_{l⁰} = c_{l⁰, l₁} + (1/l₁) c_{l⁰₁, …, l⁰ᵢ + l₁}`, checked exactly.
pub fn jacobi_coefficient_check(l1: u64, ls0: &[u64]) -> bool {
    let Some((&last, head)) = ls0.split_last() else { return false };
    let lhs = recip(l1) * composition_coefficient(ls0);
    let mut appended = ls0.to_vec();
    appended.push(l1);
    let mut merged = head.to_vec();
    merged.push(last + l1);
    lhs == composition_coefficient(&appended) + recip(l1) * composition_coefficient(&merged)
}

/// `c(δ) = c_{#A₁,…,#A_r} ∏ c(δ/A_l)`, with `c((0)) = 1`.
pub fn coefficient_c(t: &TreeIndexSet) -> BigRational {
    node_coefficient(t, t.root())
}

fn node_coefficient(t: &TreeIndexSet, node: usize) -> BigRational {
    let kids: Vec<usize> = t.children(node).iter().rev().copied().collect();
    let sizes: Vec<u64> = kids.iter().map(|&c| t.subtree_size(c) as u64).collect();
    if sizes.is_empty() {
        return BigRational::one();
    }
    kids.iter()
        .fold(composition_coefficient(&sizes), |acc, &c| acc * node_coefficient(t, c))
}

/// All compositions of `n` (ordered tuples of positive parts).
pub fn compositions(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for first in 1..=n {
        for mut rest in compositions(n - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}
