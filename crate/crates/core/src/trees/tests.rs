use itertools::Itertools;
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;

fn q(p: i64, r: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(r))
}

fn tree(d: &[usize]) -> TreeIndexSet {
    TreeIndexSet::from_delta(d).unwrap()
}

fn catalan(n: u64) -> u64 {
    (0..n).fold(1u64, |c, i| c * 2 * (2 * i + 1) / (i + 2))
}

/// Brute force over `{0..n−1}^n` with the membership constraints.
fn brute_delta(n: usize) -> Vec<Vec<usize>> {
    (0..n)
        .map(|_| 0..n)
        .multi_cartesian_product()
        .filter(|d| is_in_delta(d))
        .collect()
}

/// Every parent map satisfying conditions (1)–(3) for the given child counts.
fn order_oracle(delta: &[usize]) -> Vec<Vec<Option<usize>>> {
    let n = delta.len();
    let choices: Vec<Vec<Option<usize>>> = (0..n)
        .map(|i| if i == n - 1 { vec![None] } else { (i + 1..n).map(Some).collect() })
        .collect();
    choices
        .into_iter()
        .multi_cartesian_product()
        .filter(|parent| {
            let counts_ok = (0..n).all(|c| parent.iter().filter(|p| **p == Some(c)).count() == delta[c]);
            let below = |d: usize, c: usize| {
                let mut x = d;
                loop {
                    if x == c {
                        return true;
                    }
                    match parent[x] {
                        Some(p) => x = p,
                        None => return false,
                    }
                }
            };
            let interval_ok = (0..n).all(|c| {
                (0..c).all(|d| !below(d, c) || (d..c).all(|e| below(e, c)))
            });
            counts_ok && interval_ok
        })
        .collect()
}

#[test]
fn enumeration_small_cases() {
    assert_eq!(enumerate_delta_vectors(1).unwrap(), vec![vec![0]]);
    assert_eq!(enumerate_delta_vectors(2).unwrap(), vec![vec![0, 1]]);
    assert_eq!(enumerate_delta_vectors(3).unwrap(), vec![vec![0, 0, 2], vec![0, 1, 1]]);
    for n in 1..=7 {
        assert_eq!(enumerate_delta_vectors(n).unwrap(), brute_delta(n), "n = {n}");
    }
    let counts: Vec<usize> = (1..=8).map(|n| enumerate_delta(n).unwrap().len()).collect();
    assert_eq!(counts, vec![1, 1, 2, 5, 14, 42, 132, 429]);
    assert!(enumerate_delta(13).is_err());
    assert!(enumerate_delta(0).is_err());
}

#[test]
fn counts_are_catalan_and_bounded() {
    for n in 1..=10 {
        let c = enumerate_delta_vectors(n).unwrap().len() as u64;
        assert_eq!(c, catalan(n as u64 - 1));
        assert!(c <= 4u64.pow(n as u32));
    }
}

#[test]
fn tree_order_examples() {
    assert_eq!(tree(&[0, 1]).parent(0), Some(1));
    let t = tree(&[0, 0, 2]);
    assert_eq!((t.parent(0), t.parent(1)), (Some(2), Some(2)));
    assert!(TreeIndexSet::from_delta(&[1, 0, 1]).is_err());
    assert!(TreeIndexSet::from_delta(&[0, 2, 0]).is_err());
}

#[test]
fn six_node_figure_tree_matches_oracle() {
    let d = [0, 0, 0, 2, 2, 1];
    let t = tree(&d);
    let oracle = order_oracle(&d);
    assert_eq!(oracle.len(), 1, "the order is unique");
    let parents: Vec<Option<usize>> = (0..6).map(|i| t.parent(i)).collect();
    assert_eq!(parents, oracle[0]);
    // labels: 6 -> 5, 5 -> {4, 1}, 4 -> {3, 2}
    assert_eq!(t.children(5), &[4]);
    assert_eq!(t.children(4), &[3, 0]);
    assert_eq!(t.children(3), &[2, 1]);
}

#[test]
fn order_is_unique_for_all_small_trees() {
    for n in 1..=6 {
        for t in enumerate_delta(n).unwrap() {
            let oracle = order_oracle(t.delta());
            assert_eq!(oracle.len(), 1);
            let parents: Vec<_> = (0..n).map(|i| t.parent(i)).collect();
            assert_eq!(parents, oracle[0]);
        }
    }
}

#[test]
fn composition_coefficient_examples() {
    assert_eq!(composition_coefficient(&[1]), q(1, 1));
    assert_eq!(composition_coefficient(&[1, 2]), q(1, 3));
    assert_eq!(composition_coefficient(&[2, 1]), q(1, 6));
}

#[test]
fn permutation_sums() {
    assert!(permutation_sum_check(&[1, 2]).unwrap());
    assert!(permutation_sum_check(&[1, 1, 1]).unwrap());
    for n in 1..=7 {
        for ks in compositions(n) {
            let ks: Vec<u64> = ks.iter().map(|&k| k as u64).collect();
            assert!(permutation_sum_check(&ks).unwrap(), "{ks:?}");
        }
    }
    assert!(permutation_sum_check(&[1; 9]).is_err());
}

#[test]
fn jacobi_coefficients() {
    assert!(jacobi_coefficient_check(1, &[1]));
    assert!(jacobi_coefficient_check(2, &[1, 1]));
    assert_eq!(q(1, 2) * composition_coefficient(&[1, 1]), q(1, 4));
    assert_eq!(composition_coefficient(&[1, 1, 2]), q(1, 8));
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..500 {
        let l1 = rng.gen_range(1..=6);
        let len = rng.gen_range(1..=5);
        let ls0: Vec<u64> = (0..len).map(|_| rng.gen_range(1..=6)).collect();
        assert!(jacobi_coefficient_check(l1, &ls0));
    }
}

#[test]
fn tree_coefficients() {
    assert_eq!(coefficient_c(&tree(&[0])), q(1, 1));
    assert_eq!(coefficient_c(&tree(&[0, 0, 2])), q(1, 2));
    assert_eq!(coefficient_c(&tree(&[0, 1, 1])), q(1, 2));
    // root with subtrees of sizes 1 and 2 (chain): c_{1,2} c((0,1)) = 1/3
    assert_eq!(coefficient_c(&tree(&[0, 0, 1, 2])), q(1, 3));
    // subtree sizes 2 and 1: c_{2,1} = 1/6
    assert_eq!(coefficient_c(&tree(&[0, 1, 0, 2])), q(1, 6));
}

#[test]
fn connect_examples() {
    let leaf = tree(&[0]);
    assert_eq!(connect(&leaf, &leaf, 0).unwrap().delta(), &[0, 1]);
    assert_eq!(connect(&leaf, &tree(&[0, 1]), 0).unwrap().delta(), &[0, 0, 2]);
    assert_eq!(connect(&leaf, &tree(&[0, 1]), 1).unwrap().delta(), &[0, 0, 2]);
    assert_eq!(connect(&tree(&[0, 1]), &tree(&[0, 1]), 1).unwrap().delta(), &[0, 0, 1, 2]);
    assert_eq!(connect(&tree(&[0, 1]), &tree(&[0, 1]), 0).unwrap().delta(), &[0, 1, 0, 2]);
    assert!(connect(&leaf, &tree(&[0, 1]), 2).is_err());
}

/// Post-order concatenation: old subtrees left of `ι`, the new tree, the rest, then the root.
fn connect_oracle(t1: &TreeIndexSet, t2: &TreeIndexSet, iota: usize) -> Vec<usize> {
    let subs = t2.root_subtrees();
    let mut out = Vec::new();
    for r in &subs[..iota] {
        out.extend_from_slice(&t2.delta()[r.clone()]);
    }
    out.extend_from_slice(t1.delta());
    for r in &subs[iota..] {
        out.extend_from_slice(&t2.delta()[r.clone()]);
    }
    out.push(t2.delta()[t2.root()] + 1);
    out
}

#[test]
fn connect_agrees_with_concatenation() {
    for n1 in 1..=4 {
        for n2 in 1..=4 {
            for t1 in enumerate_delta(n1).unwrap() {
                for t2 in enumerate_delta(n2).unwrap() {
                    for iota in 0..=t2.root_subtrees().len() {
                        let c = connect(&t1, &t2, iota).unwrap();
                        assert_eq!(c.n(), n1 + n2);
                        assert!(is_in_delta(c.delta()));
                        assert_eq!(c.delta(), &connect_oracle(&t1, &t2, iota)[..]);
                    }
                }
            }
        }
    }
}

#[test]
fn diameters_and_levels() {
    assert_eq!(tree(&[0]).diameter(), 0);
    assert_eq!(tree(&[0, 1, 1]).diameter(), 2);
    let t = tree(&[0, 0, 2]);
    assert_eq!(t.diameter(), 1);
    assert_eq!(t.level_vectors(), vec![vec![2], vec![0, 0]]);
    let fig = tree(&[0, 0, 0, 2, 2, 1]);
    assert_eq!(fig.level_vectors(), vec![vec![1], vec![2], vec![0, 2], vec![0, 0]]);
}

#[test]
fn level_vectors_round_trip() {
    for n in 1..=8 {
        for t in enumerate_delta(n).unwrap() {
            let lv = t.level_vectors();
            for l in 1..lv.len() {
                assert_eq!(lv[l].len(), lv[l - 1].iter().sum::<usize>());
            }
            assert_eq!(TreeIndexSet::from_level_vectors(&lv).unwrap(), t);
        }
    }
}

proptest! {
    #[test]
    fn tree_order_inverts_delta_extraction(n in 1usize..=9, pick in any::<prop::sample::Index>()) {
        let all = enumerate_delta_vectors(n).unwrap();
        let d = &all[pick.index(all.len())];
        let t = TreeIndexSet::from_delta(d).unwrap();
        let counts: Vec<usize> = (0..n).map(|i| t.children(i).len()).collect();
        prop_assert_eq!(&counts, d);
        for c in 0..n {
            for dd in t.subtree(c) {
                prop_assert!(dd <= c);
            }
        }
    }
}
