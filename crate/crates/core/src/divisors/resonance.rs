use num_complex::Complex;

use super::omega::inv_divisor;
use super::{bits, DecoratedTree, NodeSet, OmegaField};
use crate::error::{Error, Result};
use crate::lattice::Idx;

/// A resonance `(B, a)`: `B ⊂ A(a) ∖ {a}` an antichain with `γ(a) = Σ γ(b)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Resonance {
    pub a: usize,
    /// Sorted node indices of `B`.
    pub b: Vec<usize>,
    pub b_set: NodeSet,
    /// `𝓑_R = A(a) ∖ A(B)`.
    pub members: NodeSet,
    /// `∪ ]b, a[`.
    pub support: NodeSet,
}

impl Resonance {
    /// `self ⊂ other` in the sense of member sets.
    pub fn is_within(&self, other: &Resonance) -> bool {
        self.members & !other.members == 0
    }

    pub fn is_disjoint(&self, other: &Resonance) -> bool {
        self.members & other.members == 0
    }

    pub fn non_overlapping(&self, other: &Resonance) -> bool {
        self.is_within(other) || other.is_within(self) || self.is_disjoint(other)
    }
}

/// All resonances, ordered by top node and then member mask.
///
/// A resonance with top `a` is the same thing as an upward-closed subset
/// `U ⊊ A(a)` containing `a` with `Σ_U v = 0`; `B` is the set of maximal
/// nodes of `A(a) ∖ U`.
pub fn enumerate_resonances(dt: &DecoratedTree) -> Result<Vec<Resonance>> {
    if dt.n() > 10 {
        return Err(Error::invalid("resonance enumeration is limited to 10 nodes"));
    }
    let mut out = Vec::new();
    for a in 0..dt.n() {
        let full = dt.below(a);
        let rest = full & !(1 << a);
        let mut found = Vec::new();
        let mut sub = rest;
        loop {
            let u = sub | 1 << a;
            if u != full && dt.weight(u).is_zero() && dt.is_upward_closed(u, full) {
                found.push(resonance_from_top(dt, a, u));
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & rest;
        }
        found.sort_by_key(|r| r.members);
        out.extend(found);
    }
    Ok(out)
}

fn resonance_from_top(dt: &DecoratedTree, a: usize, members: NodeSet) -> Resonance {
    let lower = dt.below(a) & !members;
    let b: Vec<usize> = bits(lower)
        .filter(|&c| dt.tree().parent(c).is_some_and(|p| members >> p & 1 == 1))
        .collect();
    let b_set = b.iter().fold(0, |m, &x| m | 1 << x);
    let support = b.iter().fold(0, |m, &x| m | dt.open_path(x, a));
    Resonance { a, b, b_set, members, support }
}

/// `γ_J(c)`: `γ(c)` off the support, otherwise `Σ_{A(c) ∖ A(B)} v` for the
/// smallest resonance of `J` whose support contains `c`.
pub fn gamma_j(dt: &DecoratedTree, family: &[&Resonance]) -> Vec<Idx> {
    (0..dt.n())
        .map(|c| {
            let smallest = family
                .iter()
                .filter(|r| r.support >> c & 1 == 1)
                .min_by_key(|r| r.members.count_ones());
            match smallest {
                Some(r) => dt.weight(dt.below(c) & r.members),
                None => dt.gamma(c),
            }
        })
        .collect()
}

/// An admissible family of pairwise non-overlapping resonances.
#[derive(Clone, Debug, PartialEq)]
pub struct AdmissibleFamily {
    /// Indices into the output of [`enumerate_resonances`].
    pub ids: Vec<usize>,
    pub resonances: Vec<Resonance>,
    pub gamma_j: Vec<Idx>,
}

impl AdmissibleFamily {
    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    /// `Π_c (i ω·γ_J(c))^{−1}`, without the sign.
    pub fn divisor_product<F: OmegaField>(&self, omega: &[F]) -> Result<Complex<F>> {
        self.gamma_j
            .iter()
            .try_fold(Complex::new(F::one(), F::zero()), |acc, g| Ok(acc * inv_divisor(omega, g)?))
    }
}

fn family_of(dt: &DecoratedTree, all: &[Resonance], ids: &[usize]) -> AdmissibleFamily {
    let resonances: Vec<Resonance> = ids.iter().map(|&i| all[i].clone()).collect();
    let refs: Vec<&Resonance> = resonances.iter().collect();
    let gamma_j = gamma_j(dt, &refs);
    AdmissibleFamily { ids: ids.to_vec(), resonances, gamma_j }
}

/// Every admissible family, the empty family included when it qualifies.
pub fn enumerate_admissible(dt: &DecoratedTree) -> Result<Vec<AdmissibleFamily>> {
    let all = enumerate_resonances(dt)?;
    let mut out = Vec::new();
    let mut chosen = Vec::new();
    grow(dt, &all, 0, &mut chosen, &mut out);
    Ok(out)
}

fn grow(dt: &DecoratedTree, all: &[Resonance], next: usize, chosen: &mut Vec<usize>, out: &mut Vec<AdmissibleFamily>) {
    if next == all.len() {
        let fam = family_of(dt, all, chosen);
        if fam.gamma_j.iter().all(|g| !g.is_zero()) {
            out.push(fam);
        }
        return;
    }
    grow(dt, all, next + 1, chosen, out);
    if chosen.iter().all(|&i| all[i].non_overlapping(&all[next])) {
        chosen.push(next);
        grow(dt, all, next + 1, chosen, out);
        chosen.pop();
    }
}

/// `Σ_{J ∈ ad(γ)} (−1)^{#J} Π_c (i ω·γ_J(c))^{−1}`.
pub fn omega1_resonance_sum<F: OmegaField>(dt: &DecoratedTree, omega: &[F]) -> Result<Complex<F>> {
    let mut acc = Complex::new(F::zero(), F::zero());
    for fam in enumerate_admissible(dt)? {
        let term = fam.divisor_product(omega)?;
        acc = if fam.len() % 2 == 0 { acc + term } else { acc - term };
    }
    Ok(acc)
}

/// A class of `ad(γ)` under `∼`.
#[derive(Clone, Debug)]
pub struct EquivalenceClass {
    /// Indices into the admissible list.
    pub members: Vec<usize>,
    /// Intersection of the class.
    pub minimal: AdmissibleFamily,
    /// `κ = max #J` over the class.
    pub kappa: usize,
    /// Whether the intersection is itself a member of the class.
    pub minimal_is_member: bool,
}

/// `Q` lies strictly between two members of `fam` with the same top,
/// nested both as member sets and as `B` sets.
fn sandwiched(all: &[Resonance], q: usize, fam: &[usize]) -> bool {
    let rq = &all[q];
    let lower = fam.iter().any(|&i| {
        let ri = &all[i];
        ri.a == rq.a && ri.is_within(rq) && rq.b_set & !ri.b_set == 0
    });
    let upper = fam.iter().any(|&k| {
        let rk = &all[k];
        rk.a == rq.a && rq.is_within(rk) && rk.b_set & !rq.b_set == 0
    });
    lower && upper
}

fn related(all: &[Resonance], j1: &[usize], j2: &[usize]) -> bool {
    j2.iter().filter(|q| !j1.contains(q)).all(|&q| sandwiched(all, q, j1))
        && j1.iter().filter(|r| !j2.contains(r)).all(|&r| sandwiched(all, r, j2))
}

fn find(parent: &mut [usize], i: usize) -> usize {
    let mut r = i;
    while parent[r] != r {
        r = parent[r];
    }
    let mut c = i;
    while parent[c] != r {
        let next = parent[c];
        parent[c] = r;
        c = next;
    }
    r
}

/// Partition of `ad(γ)` into classes (transitive closure of `∼`).
pub fn equivalence_classes(dt: &DecoratedTree) -> Result<(Vec<AdmissibleFamily>, Vec<EquivalenceClass>)> {
    let all = enumerate_resonances(dt)?;
    let fams = enumerate_admissible(dt)?;
    let mut parent: Vec<usize> = (0..fams.len()).collect();
    for i in 0..fams.len() {
        for j in i + 1..fams.len() {
            if related(&all, &fams[i].ids, &fams[j].ids) {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; fams.len()];
    for i in 0..fams.len() {
        let r = find(&mut parent, i);
        if slot[r] == usize::MAX {
            slot[r] = groups.len();
            groups.push(Vec::new());
        }
        groups[slot[r]].push(i);
    }
    let classes = groups
        .into_iter()
        .map(|members| {
            let mut inter: Vec<usize> = fams[members[0]].ids.clone();
            for &m in &members[1..] {
                inter.retain(|x| fams[m].ids.contains(x));
            }
            let kappa = members.iter().map(|&m| fams[m].len()).max().unwrap_or(0);
            let minimal_is_member = members.iter().any(|&m| fams[m].ids == inter);
            EquivalenceClass { minimal: family_of(dt, &all, &inter), members, kappa, minimal_is_member }
        })
        .collect();
    Ok((fams, classes))
}

/// `Σ_{[J]} (−1)^{κ(𝐉)} Π_c (i ω·γ_𝐉(c))^{−1}` over minimal representatives.
pub fn omega1_class_sum<F: OmegaField>(dt: &DecoratedTree, omega: &[F]) -> Result<Complex<F>> {
    let (_, classes) = equivalence_classes(dt)?;
    let mut acc = Complex::new(F::zero(), F::zero());
    for class in &classes {
        let term = class.minimal.divisor_product(omega)?;
        acc = if class.kappa % 2 == 0 { acc + term } else { acc - term };
    }
    Ok(acc)
}

/// `ρ(δ, v)`: the number of classes of admissible families.
pub fn rho(dt: &DecoratedTree) -> Result<usize> {
    Ok(equivalence_classes(dt)?.1.len())
}

/// `𝒯(𝐉) = (T(𝐉), ∪_{minimal} 𝓑_R, ∪_{maximal} 𝓑_R)` with `T` the alternating
/// union/difference over the maximal layers `I₁, I₂, …`.
pub fn tmap(family: &AdmissibleFamily) -> (NodeSet, NodeSet, NodeSet) {
    let rs = &family.resonances;
    let strictly_inside = |i: usize, j: usize| i != j && rs[i].is_within(&rs[j]);
    let minimal: NodeSet = (0..rs.len())
        .filter(|&i| !(0..rs.len()).any(|j| strictly_inside(j, i)))
        .fold(0, |m, i| m | rs[i].members);

    let mut remaining: Vec<usize> = (0..rs.len()).collect();
    let mut layers: Vec<NodeSet> = Vec::new();
    while !remaining.is_empty() {
        let (top, rest): (Vec<usize>, Vec<usize>) = remaining
            .iter()
            .partition(|&&i| !remaining.iter().any(|&j| strictly_inside(i, j)));
        layers.push(top.iter().fold(0, |m, &i| m | rs[i].members));
        remaining = rest;
    }
    let t = layers
        .iter()
        .enumerate()
        .fold(0, |acc, (l, &layer)| if l % 2 == 0 { acc | layer } else { acc & !layer });
    (t, minimal, layers.first().copied().unwrap_or(0))
}

/// The unique decomposition of `b` into disjoint resonances that are
/// themselves not disjoint unions of smaller resonances.
pub fn maximal_covering_decomposition(dt: &DecoratedTree, b: NodeSet) -> Result<Vec<Resonance>> {
    let inside: Vec<Resonance> = enumerate_resonances(dt)?
        .into_iter()
        .filter(|r| r.members & !b == 0)
        .collect();
    let atomic: Vec<Resonance> = inside
        .iter()
        .filter(|r| {
            let smaller: Vec<&Resonance> = inside.iter().filter(|s| s.members != r.members && s.is_within(r)).collect();
            exact_covers(r.members, &smaller, 2).is_empty()
        })
        .cloned()
        .collect();
    let refs: Vec<&Resonance> = atomic.iter().collect();
    let covers = exact_covers(b, &refs, 1);
    match covers.len() {
        0 => Err(Error::invalid("node set admits no covering by disjoint resonances")),
        1 => Ok(covers[0].iter().map(|&i| atomic[i].clone()).collect()),
        k => Err(Error::Numerical(format!("{k} distinct maximal covering decompositions"))),
    }
}

/// Exact covers of `target` by member sets of `parts`, each using at least `min_parts` parts.
fn exact_covers(target: NodeSet, parts: &[&Resonance], min_parts: usize) -> Vec<Vec<usize>> {
    fn go(target: NodeSet, covered: NodeSet, parts: &[&Resonance], used: &mut Vec<usize>, out: &mut Vec<Vec<usize>>, min: usize) {
        let open = target & !covered;
        if open == 0 {
            if used.len() >= min {
                out.push(used.clone());
            }
            return;
        }
        let u = open.trailing_zeros();
        for (i, p) in parts.iter().enumerate() {
            if p.members >> u & 1 == 1 && p.members & covered == 0 && p.members & !target == 0 {
                used.push(i);
                go(target, covered | p.members, parts, used, out, min);
                used.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(target, 0, parts, &mut Vec::new(), &mut out, min_parts);
    out
}
