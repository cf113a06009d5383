//! Random instances for experiments and randomized testing.
//!
//! Every generator takes the RNG explicitly so that results are reproducible
//! from a seed.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::construction::PartSizeTree;
use crate::hypergraph::Hypergraph;
use crate::pattern::{k_subsets, Pattern, Profile};

/// All `k`-multisets on `m` parts, as multiplicity vectors.
pub fn all_profiles(m: usize, k: usize) -> Vec<Profile> {
    fn rec(m: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Profile>) {
        if cur.len() + 1 == m {
            cur.push(left);
            out.push(Profile::new(cur.clone()));
            cur.pop();
            return;
        }
        for c in (0..=left).rev() {
            cur.push(c);
            rec(m, left - c, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if m > 0 {
        rec(m, k, &mut Vec::new(), &mut out);
    }
    out
}

/// A pattern on `m` parts with a non-empty random profile set; each part is
/// recursive with probability one half.
pub fn random_pattern<R: Rng + ?Sized>(k: usize, m: usize, rng: &mut R) -> Pattern {
    let all = all_profiles(m, k);
    let mut profiles: Vec<Profile> = all
        .iter()
        .filter(|_| rng.random_bool(0.4))
        .cloned()
        .collect();
    if profiles.is_empty() {
        profiles.push(all[rng.random_range(0..all.len())].clone());
    }
    let recursive = (0..m).filter(|_| rng.random_bool(0.5)).collect();
    Pattern::new(k, m, profiles, recursive).expect("generated pattern is valid")
}

/// A random `P`-construction size tree on `n` vertices.
pub fn random_tree<R: Rng + ?Sized>(p: &Pattern, n: usize, rng: &mut R) -> PartSizeTree {
    if n == 0 || p.m() == 0 || rng.random_bool(0.1) {
        return PartSizeTree::Empty { n };
    }
    // A composition with n_i < n for recursive parts; if every part is
    // recursive and n = 1 there is none.
    for _ in 0..32 {
        let mut sizes = vec![0; p.m()];
        for _ in 0..n {
            sizes[rng.random_range(0..p.m())] += 1;
        }
        if sizes
            .iter()
            .enumerate()
            .any(|(i, &s)| s == n && p.is_recursive(i))
        {
            continue;
        }
        let children: BTreeMap<usize, PartSizeTree> = p
            .recursive()
            .iter()
            .filter(|&&i| sizes[i] > 0)
            .map(|&i| (i, random_tree(p, sizes[i], rng)))
            .collect();
        return PartSizeTree::Split { sizes, children };
    }
    PartSizeTree::Empty { n }
}

/// `G(n, prob)`-style random `k`-graph.
pub fn random_hypergraph<R: Rng + ?Sized>(
    n: usize,
    k: usize,
    prob: f64,
    rng: &mut R,
) -> Hypergraph {
    let edges = k_subsets(n, k)
        .into_iter()
        .filter(|_| rng.random_bool(prob))
        .collect();
    Hypergraph::new(n, k, edges).expect("subsets are valid edges")
}

/// Keeps each edge of `g` independently with probability `keep`.
pub fn random_subgraph<R: Rng + ?Sized>(g: &Hypergraph, keep: f64, rng: &mut R) -> Hypergraph {
    let edges = g
        .edges()
        .iter()
        .filter(|_| rng.random_bool(keep))
        .cloned()
        .collect();
    Hypergraph::new(g.n(), g.k(), edges).expect("subset of valid edges")
}

/// A uniformly shuffled permutation of `0..n`.
pub fn random_permutation<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    perm
}

/// A point of the simplex with every coordinate at least `margin`.
pub fn random_simplex_point<R: Rng + ?Sized>(m: usize, margin: f64, rng: &mut R) -> Vec<f64> {
    assert!(
        margin * m as f64 <= 1.0,
        "margin too large for {m} coordinates"
    );
    let raw: Vec<f64> = (0..m)
        .map(|_| -rng.random::<f64>().max(f64::MIN_POSITIVE).ln())
        .collect();
    let sum: f64 = raw.iter().sum();
    let free = 1.0 - margin * m as f64;
    raw.iter().map(|r| margin + free * r / sum).collect()
}
