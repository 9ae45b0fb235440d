//! Decorated trees and the small-divisor coefficients of the tree expansion.
//!
//! A decorated tree is a tree `δ ∈ Δ(n)` with a lattice weight `v(c) ∈ Z^d`
//! on every node and partial sums `γ(c) = Σ_{b ⪯ c} v(b)`. Node sets are
//! bitmasks over 0-based node indices.

mod bounds;
mod omega;
mod resonance;

use crate::error::{Error, Result};
use crate::lattice::Idx;
use crate::trees::TreeIndexSet;

pub use bounds::{analytic_part_bound_check, eliasson_bound_check, sigma_tree, sigma_weight, BoundCheck};
pub use omega::{omega_recursive, OmegaField, OmegaPair};
pub use resonance::{
    enumerate_admissible, enumerate_resonances, equivalence_classes, maximal_covering_decomposition,
    gamma_j, omega1_class_sum, omega1_resonance_sum, rho, tmap, AdmissibleFamily, EquivalenceClass, Resonance,
};

/// Node set as a bitmask.
pub type NodeSet = u32;

pub(crate) fn bits(s: NodeSet) -> impl Iterator<Item = usize> {
    (0..32).filter(move |i| s >> i & 1 == 1)
}

/// `(δ, v)` with cached `γ` and subtree masks.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DecoratedTree {
    tree: TreeIndexSet,
    d: usize,
    v: Vec<Idx>,
    gamma: Vec<Idx>,
    below: Vec<NodeSet>,
}

impl DecoratedTree {
    pub fn new(tree: TreeIndexSet, d: usize, v: Vec<Idx>) -> Result<Self> {
        if v.len() != tree.n() {
            return Err(Error::invalid(format!("{} weights for {} nodes", v.len(), tree.n())));
        }
        if tree.n() > 16 {
            return Err(Error::invalid("decorated trees are limited to 16 nodes"));
        }
        let below: Vec<NodeSet> = (0..tree.n())
            .map(|c| tree.subtree(c).fold(0, |m, i| m | 1 << i))
            .collect();
        let gamma = below.iter().map(|&m| bits(m).fold(Idx::ZERO, |acc, b| acc + v[b])).collect();
        Ok(DecoratedTree { tree, d, v, gamma, below })
    }

    /// One-dimensional convenience constructor.
    pub fn d1(delta: &[usize], v: &[i32]) -> Result<Self> {
        Self::new(TreeIndexSet::from_delta(delta)?, 1, v.iter().map(|&x| Idx::scalar(x)).collect())
    }

    pub fn tree(&self) -> &TreeIndexSet {
        &self.tree
    }

    pub fn n(&self) -> usize {
        self.tree.n()
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn v(&self) -> &[Idx] {
        &self.v
    }

    pub fn gamma(&self, c: usize) -> Idx {
        self.gamma[c]
    }

    /// `Σ(v)`.
    pub fn total(&self) -> Idx {
        self.gamma[self.tree.root()]
    }

    /// `A(c)`, the nodes below or equal to `c`.
    pub fn below(&self, c: usize) -> NodeSet {
        self.below[c]
    }

    pub fn all(&self) -> NodeSet {
        self.below[self.tree.root()]
    }

    /// `Σ_{b ∈ s} v(b)`.
    pub fn weight(&self, s: NodeSet) -> Idx {
        bits(s).fold(Idx::ZERO, |acc, b| acc + self.v[b])
    }

    /// Strict ancestors of `b` that lie strictly below `a`: `]b, a[`.
    pub fn open_path(&self, b: usize, a: usize) -> NodeSet {
        let mut out = 0;
        let mut c = self.tree.parent(b);
        while let Some(p) = c {
            if p == a {
                break;
            }
            out |= 1 << p;
            c = self.tree.parent(p);
        }
        out
    }

    /// `true` if `s` contains the ancestors (within `within`) of each of its nodes.
    pub(crate) fn is_upward_closed(&self, s: NodeSet, within: NodeSet) -> bool {
        bits(s).all(|c| match self.tree.parent(c) {
            Some(p) if within >> p & 1 == 1 => s >> p & 1 == 1,
            _ => true,
        })
    }

    /// Largest-label node of `s`, which is its unique maximum when `s` is a subtree.
    pub(crate) fn top(s: NodeSet) -> usize {
        31 - s.leading_zeros() as usize
    }
}
