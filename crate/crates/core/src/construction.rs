//! Exact combinatorics of `P`-constructions: blow-up edge counts, the `p_n`
//! recurrence, explicit construction and the density sequence.
//!
//! A `P`-construction on `n` vertices is either empty, or a partition into
//! `m` parts (parts in `R` must be proper subsets), all `k`-sets whose profile
//! lies in `E`, plus an arbitrary `P`-construction inside every part of `R`.
//! Since the edge count only depends on part sizes, `p_n` satisfies
//!
//! ```text
//! p_n = max(0, max_{n_1+..+n_m = n, n_i < n for i in R}
//!              sum_{D in E} prod_i C(n_i, D(i)) + sum_{i in R} p_{n_i})
//! ```
//!
//! where a recursive part `i` with `<i^k> ∈ E` contributes nothing extra:
//! the blow-up already makes it complete.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hypergraph::Hypergraph;
use crate::pattern::{Pattern, Profile};

/// Part sizes of one `P`-construction at every level.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum PartSizeTree {
    /// The empty construction on `n` vertices.
    Empty { n: usize },
    /// A bottom partition with the given part sizes. `children` maps a
    /// recursive part to the construction placed inside it; a missing child
    /// means that part spans no recursive edges.
    Split {
        sizes: Vec<usize>,
        children: BTreeMap<usize, PartSizeTree>,
    },
}

impl PartSizeTree {
    pub fn leaf(sizes: Vec<usize>) -> Self {
        PartSizeTree::Split {
            sizes,
            children: BTreeMap::new(),
        }
    }

    pub fn total(&self) -> usize {
        match self {
            PartSizeTree::Empty { n } => *n,
            PartSizeTree::Split { sizes, .. } => sizes.iter().sum(),
        }
    }

    /// Level-1 part sizes, `None` for the empty construction.
    pub fn sizes(&self) -> Option<&[usize]> {
        match self {
            PartSizeTree::Empty { .. } => None,
            PartSizeTree::Split { sizes, .. } => Some(sizes),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            PartSizeTree::Empty { .. } => 0,
            PartSizeTree::Split { children, .. } => {
                1 + children.values().map(|c| c.depth()).max().unwrap_or(0)
            }
        }
    }

    /// Checks the tree against `p`.
    pub fn validate(&self, p: &Pattern) -> Result<()> {
        match self {
            PartSizeTree::Empty { .. } => Ok(()),
            PartSizeTree::Split { sizes, children } => {
                if sizes.len() != p.m() {
                    return Err(Error::InvalidTree(format!(
                        "{} part sizes for a pattern with {} parts",
                        sizes.len(),
                        p.m()
                    )));
                }
                let n: usize = sizes.iter().sum();
                if n > 0 {
                    for &r in p.recursive() {
                        if sizes[r] == n {
                            return Err(Error::InvalidTree(format!(
                                "recursive part {} holds all {n} vertices",
                                r + 1
                            )));
                        }
                    }
                }
                for (&i, child) in children {
                    if i >= p.m() || !p.is_recursive(i) {
                        return Err(Error::InvalidTree(format!(
                            "child attached to non-recursive part {}",
                            i + 1
                        )));
                    }
                    if child.total() != sizes[i] {
                        return Err(Error::InvalidTree(format!(
                            "child of part {} has {} vertices, part has {}",
                            i + 1,
                            child.total(),
                            sizes[i]
                        )));
                    }
                    child.validate(p)?;
                }
                Ok(())
            }
        }
    }
}

/// `C(n, j)` for `n <= max_n`, `j <= k`.
pub(crate) struct BinomialTable {
    rows: Vec<Vec<BigUint>>,
}

impl BinomialTable {
    pub(crate) fn new(max_n: usize, k: usize) -> Self {
        let mut rows = Vec::with_capacity(max_n + 1);
        for n in 0..=max_n {
            let mut row = vec![BigUint::zero(); k + 1];
            row[0] = BigUint::one();
            for j in 1..=k.min(n) {
                let prev: &Vec<BigUint> = &rows[n - 1];
                row[j] = &prev[j - 1] + &prev[j];
            }
            rows.push(row);
        }
        BinomialTable { rows }
    }

    pub(crate) fn get(&self, n: usize, j: usize) -> &BigUint {
        &self.rows[n][j]
    }
}

pub fn binomial(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

/// Number of `k`-sets whose profile with respect to parts of the given sizes
/// lies in `E`: `sum_{D in E} prod_i C(sizes[i], D(i))`.
pub fn blowup_edge_count(p: &Pattern, sizes: &[usize]) -> Result<BigUint> {
    if sizes.len() != p.m() {
        return Err(Error::DimensionMismatch {
            expected: p.m(),
            got: sizes.len(),
        });
    }
    let max = sizes.iter().copied().max().unwrap_or(0);
    let table = BinomialTable::new(max, p.k());
    Ok(blowup_count_with(p, sizes, &table))
}

fn blowup_count_with(p: &Pattern, sizes: &[usize], table: &BinomialTable) -> BigUint {
    let mut total = BigUint::zero();
    for d in p.profiles() {
        let mut term = BigUint::one();
        for (i, &need) in d.mult().iter().enumerate() {
            if need == 0 {
                continue;
            }
            if sizes[i] < need {
                term = BigUint::zero();
                break;
            }
            term *= table.get(sizes[i], need);
        }
        total += term;
    }
    total
}

/// Recursive parts that may carry edges of their own (`<i^k> ∉ E`).
fn effective_recursive(p: &Pattern) -> Vec<usize> {
    p.recursive()
        .iter()
        .copied()
        .filter(|&i| !p.contains_profile(&Profile::power(p.m(), i, p.k())))
        .collect()
}

/// The filled `p_n` table for `n' = 0..=n`.
#[derive(Debug, Clone)]
pub struct PnTable {
    pattern: Pattern,
    values: Vec<BigUint>,
    /// Lexicographically smallest optimal level-1 sizes; `None` when stopping
    /// (the empty construction) is optimal.
    best: Vec<Option<Vec<usize>>>,
    optimal_splits: Vec<usize>,
}

impl PnTable {
    pub fn build(p: &Pattern, n: usize) -> PnTable {
        let m = p.m();
        let table = BinomialTable::new(n, p.k());
        let rec = effective_recursive(p);
        let mut values = vec![BigUint::zero(); n + 1];
        let mut best = vec![None; n + 1];
        let mut optimal_splits = vec![0usize; n + 1];

        let mut sizes = vec![0usize; m];
        for total in 1..=n {
            let mut top: Option<(BigUint, Vec<usize>)> = None;
            let mut count = 0usize;
            for_each_composition(total, &mut sizes, 0, &mut |s| {
                if p.recursive().iter().any(|&r| s[r] == total) {
                    return;
                }
                let mut v = blowup_count_with(p, s, &table);
                for &r in &rec {
                    v += &values[s[r]];
                }
                match &top {
                    Some((bv, _)) if v < *bv => {}
                    Some((bv, _)) if v == *bv => count += 1,
                    _ => {
                        top = Some((v, s.to_vec()));
                        count = 1;
                    }
                }
            });
            match top {
                Some((v, s)) if !v.is_zero() => {
                    values[total] = v;
                    best[total] = Some(s);
                    optimal_splits[total] = count;
                }
                _ => optimal_splits[total] = count,
            }
        }
        PnTable {
            pattern: p.clone(),
            values,
            best,
            optimal_splits,
        }
    }

    pub fn max_n(&self) -> usize {
        self.values.len() - 1
    }

    pub fn value(&self, n: usize) -> &BigUint {
        &self.values[n]
    }

    pub fn values(&self) -> &[BigUint] {
        &self.values
    }

    /// Number of level-1 size vectors attaining `p_n`.
    pub fn optimal_splits(&self, n: usize) -> usize {
        self.optimal_splits[n]
    }

    /// One optimal tree for `p_n`: lexicographically smallest level-1 sizes
    /// at every node, children only where they add edges.
    pub fn witness(&self, n: usize) -> PartSizeTree {
        match &self.best[n] {
            None => PartSizeTree::Empty { n },
            Some(sizes) => {
                let rec = effective_recursive(&self.pattern);
                let children = rec
                    .into_iter()
                    .filter(|&r| !self.values[sizes[r]].is_zero())
                    .map(|r| (r, self.witness(sizes[r])))
                    .collect();
                PartSizeTree::Split {
                    sizes: sizes.clone(),
                    children,
                }
            }
        }
    }
}

/// Visits all compositions of `remaining` into `sizes[pos..]` in
/// lexicographic order.
fn for_each_composition(
    remaining: usize,
    sizes: &mut [usize],
    pos: usize,
    f: &mut impl FnMut(&[usize]),
) {
    let m = sizes.len();
    if m == 0 {
        if remaining == 0 {
            f(sizes);
        }
        return;
    }
    if pos == m - 1 {
        sizes[pos] = remaining;
        f(sizes);
        return;
    }
    for s in 0..=remaining {
        sizes[pos] = s;
        for_each_composition(remaining - s, sizes, pos + 1, f);
    }
}

/// Number of compositions of `n` into `m` non-negative parts.
pub(crate) fn composition_count(n: usize, m: usize) -> BigUint {
    if m == 0 {
        return if n == 0 {
            BigUint::one()
        } else {
            BigUint::zero()
        };
    }
    binomial(n + m - 1, m - 1)
}

#[derive(Debug, Clone, Serialize)]
pub struct PnResult {
    pub n: usize,
    pub value: BigUint,
    pub witness: PartSizeTree,
    /// Number of level-1 size vectors attaining the value.
    pub optimal_splits: usize,
}

/// Exact `p_n` with one optimal witness.
pub fn max_pn(p: &Pattern, n: usize) -> PnResult {
    let t = PnTable::build(p, n);
    PnResult {
        n,
        value: t.value(n).clone(),
        witness: t.witness(n),
        optimal_splits: t.optimal_splits(n),
    }
}

/// Materializes the construction described by `t`.
///
/// Vertices are numbered depth-first: part 1 takes the first block of
/// labels (recursively subdivided by its child), then part 2, and so on.
pub fn build_construction(p: &Pattern, t: &PartSizeTree) -> Result<Hypergraph> {
    t.validate(p)?;
    let mut edges = BTreeSet::new();
    add_edges(p, t, 0, &mut edges);
    Ok(Hypergraph::from_sorted_edges(
        t.total(),
        p.k(),
        edges.into_iter().collect(),
    ))
}

fn add_edges(p: &Pattern, t: &PartSizeTree, offset: usize, out: &mut BTreeSet<Vec<usize>>) {
    let PartSizeTree::Split { sizes, children } = t else {
        return;
    };
    let starts = part_starts(sizes, offset);
    for d in p.profiles() {
        let mut picks: Vec<Vec<Vec<usize>>> = Vec::with_capacity(p.m());
        let mut feasible = true;
        for (i, &need) in d.mult().iter().enumerate() {
            if need > sizes[i] {
                feasible = false;
                break;
            }
            let block: Vec<usize> = (starts[i]..starts[i] + sizes[i]).collect();
            picks.push(choose(&block, need));
        }
        if !feasible {
            continue;
        }
        let mut acc: Vec<Vec<usize>> = vec![Vec::new()];
        for options in &picks {
            let mut next = Vec::with_capacity(acc.len() * options.len());
            for a in &acc {
                for o in options {
                    let mut e = a.clone();
                    e.extend_from_slice(o);
                    next.push(e);
                }
            }
            acc = next;
        }
        for mut e in acc {
            e.sort_unstable();
            out.insert(e);
        }
    }
    for (&i, child) in children {
        add_edges(p, child, starts[i], out);
    }
}

fn part_starts(sizes: &[usize], offset: usize) -> Vec<usize> {
    let mut starts = Vec::with_capacity(sizes.len());
    let mut s = offset;
    for &sz in sizes {
        starts.push(s);
        s += sz;
    }
    starts
}

fn choose(items: &[usize], r: usize) -> Vec<Vec<usize>> {
    crate::pattern::k_subsets(items.len(), r)
        .into_iter()
        .map(|idx| idx.into_iter().map(|i| items[i]).collect())
        .collect()
}

/// Branch (legal index sequence, 0-based) of every vertex of
/// `build_construction(p, t)`.
pub fn branches(t: &PartSizeTree) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new(); t.total()];
    fill_branches(t, 0, &mut Vec::new(), &mut out);
    out
}

fn fill_branches(t: &PartSizeTree, offset: usize, prefix: &mut Vec<usize>, out: &mut [Vec<usize>]) {
    match t {
        PartSizeTree::Empty { n } => {
            for slot in &mut out[offset..offset + n] {
                *slot = prefix.clone();
            }
        }
        PartSizeTree::Split { sizes, children } => {
            let starts = part_starts(sizes, offset);
            for (i, &sz) in sizes.iter().enumerate() {
                prefix.push(i);
                match children.get(&i) {
                    Some(child) => fill_branches(child, starts[i], prefix, out),
                    None => {
                        for slot in &mut out[starts[i]..starts[i] + sz] {
                            *slot = prefix.clone();
                        }
                    }
                }
                prefix.pop();
            }
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RatioRow {
    pub n: usize,
    pub pn: BigUint,
    /// `p_n / C(n, k)`.
    pub density: BigRational,
}

/// `(n, p_n, p_n / C(n,k))` for `n = k..=n_max`.
pub fn ratio_sequence(p: &Pattern, n_max: usize) -> Result<Vec<RatioRow>> {
    let k = p.k();
    if n_max < k {
        return Err(Error::InvalidArgument(format!(
            "n_max={n_max} is below k={k}"
        )));
    }
    let t = PnTable::build(p, n_max);
    Ok((k..=n_max)
        .map(|n| {
            let pn = t.value(n).clone();
            let density = BigRational::new(pn.clone().into(), binomial(n, k).into());
            RatioRow { n, pn, density }
        })
        .collect())
}
