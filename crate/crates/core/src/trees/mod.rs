//! Rooted planar trees encoded by child-count vectors.
//!
//! An element `δ = (δ₁, …, δₙ)` of `Δ(n)` lists the number of children of
//! each node. Nodes are labelled `1..=n` in post-order (a node comes after
//! its whole subtree, siblings left to right), so every subtree is a
//! contiguous label interval ending at its root and the root is `n`.
//! Internally nodes are 0-based: index `i` is label `i + 1`.

mod coefficients;

use std::fmt;
use std::ops::Range;

use crate::error::{Error, Result};

pub use coefficients::{
    coefficient_c, composition_coefficient, compositions, jacobi_coefficient_check, permutation_sum_check,
};

/// Largest `n` accepted by [`enumerate_delta`].
pub const MAX_NODES: usize = 12;

/// A tree `δ ∈ Δ(n)` together with its induced order.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct TreeIndexSet {
    delta: Vec<usize>,
    parent: Vec<Option<usize>>,
    /// Children of each node, right to left (decreasing labels).
    children: Vec<Vec<usize>>,
    size: Vec<usize>,
}

/// `Σδ = n − 1` and `Σ_{i ≥ j} δᵢ ≥ n − j + 1` for `1 < j ≤ n` (1-based `j`).
pub fn is_in_delta(delta: &[usize]) -> bool {
    let n = delta.len();
    if n == 0 || delta.iter().sum::<usize>() != n - 1 {
        return false;
    }
    let mut suffix = 0;
    for j in (1..n).rev() {
        suffix += delta[j];
        // 0-based j is label j + 1; the bound is n − (j + 1) + 1.
        if suffix < n - j {
            return false;
        }
    }
    true
}

impl TreeIndexSet {
    /// Builds the unique order realising `δ` (stack construction).
    pub fn from_delta(delta: &[usize]) -> Result<Self> {
        if !is_in_delta(delta) {
            return Err(Error::invalid(format!("{delta:?} is not in Delta(n)")));
        }
        let n = delta.len();
        let mut parent = vec![None; n];
        let mut children = vec![Vec::new(); n];
        let mut size = vec![1; n];
        let mut stack: Vec<usize> = Vec::with_capacity(n);
        for c in 0..n {
            for _ in 0..delta[c] {
                let child = stack.pop().expect("suffix condition guarantees enough subtrees");
                parent[child] = Some(c);
                children[c].push(child);
                size[c] += size[child];
            }
            stack.push(c);
        }
        debug_assert_eq!(stack, vec![n - 1]);
        Ok(TreeIndexSet { delta: delta.to_vec(), parent, children, size })
    }

    pub fn n(&self) -> usize {
        self.delta.len()
    }

    pub fn delta(&self) -> &[usize] {
        &self.delta
    }

    pub fn root(&self) -> usize {
        self.n() - 1
    }

    pub fn parent(&self, i: usize) -> Option<usize> {
        self.parent[i]
    }

    /// Right to left, i.e. decreasing labels.
    pub fn children(&self, i: usize) -> &[usize] {
        &self.children[i]
    }

    pub fn subtree_size(&self, i: usize) -> usize {
        self.size[i]
    }

    /// Nodes of the subtree rooted at `i`: the interval ending at `i`.
    pub fn subtree(&self, i: usize) -> Range<usize> {
        i + 1 - self.size[i]..i + 1
    }

    /// `d ⪯ c`: `d` lies in the subtree of `c`.
    pub fn is_below(&self, d: usize, c: usize) -> bool {
        self.subtree(c).contains(&d)
    }

    /// Root subtrees `A₁, …, A_r` ordered by increasing labels.
    pub fn root_subtrees(&self) -> Vec<Range<usize>> {
        self.children[self.root()].iter().rev().map(|&c| self.subtree(c)).collect()
    }

    /// The subtree rooted at `i` as a tree of its own.
    pub fn restrict(&self, i: usize) -> TreeIndexSet {
        let r = self.subtree(i);
        TreeIndexSet::from_delta(&self.delta[r]).expect("subtrees are trees")
    }

    pub fn depth(&self, i: usize) -> usize {
        let mut d = 0;
        let mut c = i;
        while let Some(p) = self.parent[c] {
            d += 1;
            c = p;
        }
        d
    }

    /// Largest distance from the root.
    pub fn diameter(&self) -> usize {
        (0..self.n()).map(|i| self.depth(i)).max().unwrap_or(0)
    }

    /// `υ_l`: child counts of the depth-`l` nodes, left to right.
    pub fn level_vectors(&self) -> Vec<Vec<usize>> {
        let mut levels = vec![Vec::new(); self.diameter() + 1];
        for i in 0..self.n() {
            levels[self.depth(i)].push(self.delta[i]);
        }
        levels
    }

    /// Inverse of [`level_vectors`](Self::level_vectors).
    pub fn from_level_vectors(levels: &[Vec<usize>]) -> Result<Self> {
        if levels.first().map(Vec::len) != Some(1) {
            return Err(Error::invalid("level 0 must hold exactly the root"));
        }
        for (l, w) in levels.windows(2).enumerate() {
            if w[0].iter().sum::<usize>() != w[1].len() {
                return Err(Error::invalid(format!("level {l} child counts do not match level {}", l + 1)));
            }
        }
        if levels.last().unwrap().iter().any(|&c| c != 0) {
            return Err(Error::invalid("deepest level must consist of leaves"));
        }
        // first child offset of every node, per level
        let offsets: Vec<Vec<usize>> = levels
            .iter()
            .map(|v| v.iter().scan(0, |acc, &c| { let o = *acc; *acc += c; Some(o) }).collect())
            .collect();
        let mut delta = Vec::new();
        let mut stack = vec![(0usize, 0usize, false)];
        while let Some((l, p, expanded)) = stack.pop() {
            let count = levels[l][p];
            if expanded || count == 0 {
                delta.push(count);
                continue;
            }
            stack.push((l, p, true));
            let first = offsets[l][p];
            for q in (first..first + count).rev() {
                stack.push((l + 1, q, false));
            }
        }
        TreeIndexSet::from_delta(&delta)
    }
}

impl fmt::Debug for TreeIndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for TreeIndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.delta.iter().map(|d| d.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// All child-count vectors of `Δ(n)` in lexicographic order.
pub fn enumerate_delta_vectors(n: usize) -> Result<Vec<Vec<usize>>> {
    if n == 0 || n > MAX_NODES {
        return Err(Error::invalid(format!("tree size {n} outside 1..={MAX_NODES}")));
    }
    let mut out = Vec::new();
    let mut delta = vec![0; n];
    fill(&mut delta, n, 0, &mut out);
    out.sort();
    Ok(out)
}

/// Fills `delta[..=j]` right to left; `suffix` is the sum of `delta[j+1..]`.
fn fill(delta: &mut Vec<usize>, j: usize, suffix: usize, out: &mut Vec<Vec<usize>>) {
    let n = delta.len();
    if j == 0 {
        out.push(delta.clone());
        return;
    }
    let i = j - 1;
    for v in 0..=(n - 1 - suffix) {
        let s = suffix + v;
        let ok = if i == 0 { s == n - 1 } else { s >= n - i };
        if ok {
            delta[i] = v;
            fill(delta, i, s, out);
        }
    }
}

pub fn enumerate_delta(n: usize) -> Result<Vec<TreeIndexSet>> {
    enumerate_delta_vectors(n)?.iter().map(|d| TreeIndexSet::from_delta(d)).collect()
}

/// `δ¹ ⊳_ι δ²`: `δ¹` becomes a new root subtree of `δ²` with `ι` of the old
/// root subtrees on its left.
pub fn connect(t1: &TreeIndexSet, t2: &TreeIndexSet, iota: usize) -> Result<TreeIndexSet> {
    let subtrees = t2.root_subtrees();
    if iota > subtrees.len() {
        return Err(Error::invalid(format!(
            "position {iota} out of range: root has {} subtrees",
            subtrees.len()
        )));
    }
    let mut pieces: Vec<Vec<Vec<usize>>> = subtrees
        .iter()
        .map(|r| TreeIndexSet::from_delta(&t2.delta[r.clone()]).unwrap().level_vectors())
        .collect();
    pieces.insert(iota, t1.level_vectors());
    let depth = pieces.iter().map(Vec::len).max().unwrap_or(0);
    let mut levels = vec![vec![t2.delta[t2.root()] + 1]];
    for l in 0..depth {
        levels.push(pieces.iter().flat_map(|p| p.get(l).cloned().unwrap_or_default()).collect());
    }
    TreeIndexSet::from_level_vectors(&levels)
}

#[cfg(test)]
mod tests;
