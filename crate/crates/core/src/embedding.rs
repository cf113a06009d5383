//! Embeddability into `P`-constructions, forbidden families, exact `ex(n, F)`
//! by brute force, blow-ups and rigidity.
//!
//! A `k`-graph embeds into some `P`-construction iff it is a subgraph of a
//! `P`-construction on its own vertex set (induced subgraphs of constructions
//! are constructions). The search therefore only partitions the vertices of
//! the input graph itself.

use std::collections::{BTreeMap, HashMap, HashSet};

use num_bigint::BigUint;
use serde::Serialize;

use crate::caps::Caps;
use crate::construction::{binomial, build_construction, PartSizeTree};
use crate::error::{Error, Result};
use crate::hypergraph::Hypergraph;
use crate::maps::{find_embedding, MapSearch};
use crate::pattern::{k_subsets, Pattern, Profile};

/// Branch of every vertex in a `P`-construction containing the graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EmbeddingWitness {
    /// `branches[v]` is the legal sequence of (0-based) parts of vertex `v`.
    pub branches: Vec<Vec<usize>>,
}

impl EmbeddingWitness {
    /// Checks that every branch is legal and that each edge of `f` is an
    /// edge of the construction the branches describe.
    pub fn verify(&self, f: &Hypergraph, p: &Pattern) -> std::result::Result<(), String> {
        if self.branches.len() != f.n() {
            return Err(format!(
                "{} branches for {} vertices",
                self.branches.len(),
                f.n()
            ));
        }
        for (v, b) in self.branches.iter().enumerate() {
            if let Some((last, init)) = b.split_last() {
                if *last >= p.m() || init.iter().any(|&i| !p.is_recursive(i)) {
                    return Err(format!("vertex {v} has illegal branch {b:?}"));
                }
            }
        }
        // A node is either a leaf (some branch ends there) or split.
        let ends: HashSet<&[usize]> = self.branches.iter().map(|b| b.as_slice()).collect();
        for b in &self.branches {
            for cut in 0..b.len() {
                if ends.contains(&b[..cut]) {
                    return Err(format!(
                        "branch {b:?} passes through the leaf {:?}",
                        &b[..cut]
                    ));
                }
            }
        }
        'edges: for e in f.edges() {
            let bs: Vec<&Vec<usize>> = e.iter().map(|&v| &self.branches[v]).collect();
            let mut depth = 0;
            loop {
                let heads: Vec<Option<usize>> = bs.iter().map(|b| b.get(depth).copied()).collect();
                if heads.iter().any(|h| h.is_none()) {
                    // all share the same branch, which ends at this depth
                    if depth > 0 {
                        let part = bs[0][depth - 1];
                        if p.contains_profile(&Profile::power(p.m(), part, p.k())) {
                            continue 'edges;
                        }
                    }
                    return Err(format!("edge {e:?} lies in a part without edges"));
                }
                let first = heads[0];
                if heads.iter().all(|&h| h == first) {
                    depth += 1;
                    continue;
                }
                let mut mult = vec![0; p.m()];
                for h in heads {
                    mult[h.expect("checked")] += 1;
                }
                if p.contains_profile(&Profile::new(mult)) {
                    continue 'edges;
                }
                return Err(format!("edge {e:?} has a profile outside E"));
            }
        }
        Ok(())
    }
}

/// Search state over subsets of the vertices of one graph.
struct Embedder<'a> {
    p: &'a Pattern,
    n: usize,
    edges: Vec<u64>,
    /// `<i^k> ∈ E`.
    complete: Vec<bool>,
    /// Previous part in the same interchangeable class, for symmetry breaking.
    prev_in_class: Vec<Option<usize>>,
    profiles: HashSet<Vec<usize>>,
    memo: HashMap<u64, Option<Vec<Vec<usize>>>>,
}

fn interchangeable_predecessors(p: &Pattern) -> Vec<Option<usize>> {
    let m = p.m();
    (0..m)
        .map(|j| {
            (0..j).rev().find(|&i| {
                let mut perm: Vec<usize> = (0..m).collect();
                perm.swap(i, j);
                p.relabeled(&perm) == *p
            })
        })
        .collect()
}

impl<'a> Embedder<'a> {
    fn new(g: &Hypergraph, p: &'a Pattern) -> Result<Self> {
        if g.n() > 64 {
            return Err(Error::CapExceeded {
                what: "vertex count for embedding search",
                value: g.n(),
                cap: 64,
            });
        }
        let m = p.m();
        Ok(Embedder {
            p,
            n: g.n(),
            edges: g.edge_masks(),
            complete: (0..m)
                .map(|i| p.contains_profile(&Profile::power(m, i, p.k())))
                .collect(),
            prev_in_class: interchangeable_predecessors(p),
            profiles: p.profiles().iter().map(|d| d.mult().to_vec()).collect(),
            memo: HashMap::new(),
        })
    }

    fn has_edges_within(&self, s: u64) -> bool {
        self.edges.iter().any(|&e| e & !s == 0)
    }

    /// Branches (relative to the subset) for the vertices of `s` in
    /// increasing order, if `G[s]` embeds.
    fn solve(&mut self, s: u64) -> Option<Vec<Vec<usize>>> {
        if let Some(hit) = self.memo.get(&s) {
            return hit.clone();
        }
        let verts: Vec<usize> = (0..self.n).filter(|&v| s >> v & 1 == 1).collect();
        let result = if !self.has_edges_within(s) {
            Some(vec![Vec::new(); verts.len()])
        } else {
            let mut found = None;
            self.search(s, true, &mut |emb, assign| {
                if let Some(b) = emb.complete_assignment(s, assign) {
                    found = Some(b);
                    true
                } else {
                    false
                }
            });
            found
        };
        self.memo.insert(s, result.clone());
        result
    }

    /// Given a level-1 assignment of the vertices of `s` (in increasing
    /// order) that already covers every edge at this level, tries to embed the
    /// recursive parts and returns the branches.
    fn complete_assignment(&mut self, s: u64, assign: &[usize]) -> Option<Vec<Vec<usize>>> {
        let verts: Vec<usize> = (0..self.n).filter(|&v| s >> v & 1 == 1).collect();
        let m = self.p.m();
        let mut part_masks = vec![0u64; m];
        for (idx, &v) in verts.iter().enumerate() {
            part_masks[assign[idx]] |= 1 << v;
        }
        // Everything inside one recursive part only helps when that part is
        // complete; otherwise it would restate the same problem. (A host can
        // always add a vertex elsewhere to keep the part proper.)
        for &r in self.p.recursive() {
            if part_masks[r] == s && !self.complete[r] {
                return None;
            }
        }
        let mut child: BTreeMap<usize, Vec<Vec<usize>>> = BTreeMap::new();
        for &r in self.p.recursive() {
            if self.complete[r] || !self.has_edges_within(part_masks[r]) {
                continue;
            }
            child.insert(r, self.solve(part_masks[r])?);
        }
        let mut next = vec![0usize; m];
        let mut out = Vec::with_capacity(verts.len());
        for &part in assign {
            let mut b = vec![part];
            if let Some(c) = child.get(&part) {
                b.extend_from_slice(&c[next[part]]);
            }
            next[part] += 1;
            out.push(b);
        }
        Some(out)
    }

    /// Enumerates level-1 assignments of the vertices of `s` under which
    /// every edge inside `s` has its profile in `E` or lies in a single
    /// recursive part. `visit` returns true to stop.
    fn search(
        &mut self,
        s: u64,
        break_symmetry: bool,
        visit: &mut dyn FnMut(&mut Self, &[usize]) -> bool,
    ) -> bool {
        let verts: Vec<usize> = (0..self.n).filter(|&v| s >> v & 1 == 1).collect();
        let mut pos = vec![usize::MAX; self.n];
        for (i, &v) in verts.iter().enumerate() {
            pos[v] = i;
        }
        let mut closing: Vec<Vec<Vec<usize>>> = vec![Vec::new(); verts.len()];
        for &e in &self.edges {
            if e & !s == 0 {
                let members: Vec<usize> = (0..self.n)
                    .filter(|&v| e >> v & 1 == 1)
                    .map(|v| pos[v])
                    .collect();
                let last = *members.iter().max().expect("non-empty edge");
                closing[last].push(members);
            }
        }
        let mut assign = vec![0usize; verts.len()];
        let mut used = vec![0usize; self.p.m()];
        self.extend(0, &closing, &mut assign, &mut used, break_symmetry, visit)
    }

    fn extend(
        &mut self,
        i: usize,
        closing: &[Vec<Vec<usize>>],
        assign: &mut [usize],
        used: &mut [usize],
        break_symmetry: bool,
        visit: &mut dyn FnMut(&mut Self, &[usize]) -> bool,
    ) -> bool {
        if i == assign.len() {
            return visit(self, assign);
        }
        let m = self.p.m();
        for part in 0..m {
            if break_symmetry {
                if let Some(prev) = self.prev_in_class[part] {
                    if used[prev] == 0 {
                        continue;
                    }
                }
            }
            assign[i] = part;
            if closing[i].iter().all(|e| self.edge_allowed(e, assign)) {
                used[part] += 1;
                if self.extend(i + 1, closing, assign, used, break_symmetry, visit) {
                    return true;
                }
                used[part] -= 1;
            }
        }
        false
    }

    fn edge_allowed(&self, members: &[usize], assign: &[usize]) -> bool {
        let mut mult = vec![0usize; self.p.m()];
        for &v in members {
            mult[assign[v]] += 1;
        }
        if self.profiles.contains(&mult) {
            return true;
        }
        let first = assign[members[0]];
        self.p.is_recursive(first) && members.iter().all(|&v| assign[v] == first)
    }
}

fn full_mask(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// A witness that `f` is a subgraph of some `P`-construction, or `None`.
pub fn embeds_into_p_construction(f: &Hypergraph, p: &Pattern) -> Result<Option<EmbeddingWitness>> {
    if f.k() != p.k() && f.edge_count() > 0 {
        return Err(Error::InvalidArgument(format!(
            "graph is {}-uniform but the pattern is for {}-graphs",
            f.k(),
            p.k()
        )));
    }
    let mut emb = Embedder::new(f, p)?;
    Ok(emb
        .solve(full_mask(f.n()))
        .map(|branches| EmbeddingWitness { branches }))
}

/// Canonical labeling data: vertex `v` goes to `perm[v]`, and the relabeled
/// edge set as a bitset over the colex ranks of `k`-sets.
struct Canon {
    perm: Vec<usize>,
    bits: u128,
}

fn colex_rank(sorted: &[usize], choose: &[Vec<u128>]) -> usize {
    sorted
        .iter()
        .enumerate()
        .map(|(i, &c)| choose[c][i + 1] as usize)
        .sum()
}

fn choose_table(n: usize, k: usize) -> Vec<Vec<u128>> {
    let mut t = vec![vec![0u128; k + 2]; n + 1];
    for a in 0..=n {
        t[a][0] = 1;
        for b in 1..=(k + 1).min(a) {
            t[a][b] = t[a - 1][b - 1] + if b < a { t[a - 1][b] } else { 0 };
        }
    }
    t
}

fn check_canonical_cap(f: &Hypergraph, caps: &Caps) -> Result<()> {
    if f.n() > caps.canonical_vertices {
        return Err(Error::CapExceeded {
            what: "vertex count for canonical form",
            value: f.n(),
            cap: caps.canonical_vertices,
        });
    }
    let slots = binomial(f.n(), f.k());
    if slots > BigUint::from(128u32) {
        return Err(Error::CapExceeded {
            what: "number of k-sets for canonical form",
            value: usize::try_from(slots).unwrap_or(usize::MAX),
            cap: 128,
        });
    }
    Ok(())
}

/// Isomorphism-invariant vertex classes by iterated refinement of degrees.
fn vertex_classes(f: &Hypergraph) -> Vec<usize> {
    let n = f.n();
    let mut color: Vec<usize> = f.degrees();
    loop {
        let sigs: Vec<(usize, Vec<Vec<usize>>)> = (0..n)
            .map(|v| {
                let mut around: Vec<Vec<usize>> = f
                    .edges()
                    .iter()
                    .filter(|e| e.contains(&v))
                    .map(|e| {
                        let mut c: Vec<usize> =
                            e.iter().filter(|&&u| u != v).map(|&u| color[u]).collect();
                        c.sort_unstable();
                        c
                    })
                    .collect();
                around.sort();
                (color[v], around)
            })
            .collect();
        let mut distinct = sigs.clone();
        distinct.sort();
        distinct.dedup();
        let next: Vec<usize> = sigs
            .iter()
            .map(|s| distinct.binary_search(s).expect("present"))
            .collect();
        let classes_before = {
            let mut c = color.clone();
            c.sort_unstable();
            c.dedup();
            c.len()
        };
        let stable = distinct.len() == classes_before;
        color = next;
        if stable {
            return color;
        }
    }
}

fn canonize(f: &Hypergraph) -> Canon {
    let n = f.n();
    let k = f.k();
    let choose = choose_table(n, k);
    let color = vertex_classes(f);
    // vertices sorted by class; labels handed out class by class
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| (color[v], v));
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    for &v in &order {
        match blocks.last_mut() {
            Some(b) if color[b[0]] == color[v] => b.push(v),
            _ => blocks.push(vec![v]),
        }
    }
    let mut best: Option<Canon> = None;
    let mut perm = vec![0usize; n];
    let mut block_perms: Vec<Vec<usize>> = blocks.clone();
    permute_blocks(
        f,
        &choose,
        &blocks,
        &mut block_perms,
        0,
        &mut perm,
        &mut best,
    );
    best.expect("at least one labeling")
}

fn permute_blocks(
    f: &Hypergraph,
    choose: &[Vec<u128>],
    blocks: &[Vec<usize>],
    current: &mut Vec<Vec<usize>>,
    b: usize,
    perm: &mut Vec<usize>,
    best: &mut Option<Canon>,
) {
    if b == blocks.len() {
        let mut label = 0;
        for block in current.iter() {
            for &v in block {
                perm[v] = label;
                label += 1;
            }
        }
        let mut bits = 0u128;
        for e in f.edges() {
            let mut img: Vec<usize> = e.iter().map(|&v| perm[v]).collect();
            img.sort_unstable();
            bits |= 1u128 << colex_rank(&img, choose);
        }
        if best.as_ref().is_none_or(|c| bits > c.bits) {
            *best = Some(Canon {
                perm: perm.clone(),
                bits,
            });
        }
        return;
    }
    let len = blocks[b].len();
    heap_permutations(current, b, len, &mut |cur| {
        permute_blocks(f, choose, blocks, cur, b + 1, perm, best)
    });
}

/// Calls `f` once for every ordering of `current[b]` (Heap's algorithm).
fn heap_permutations(
    current: &mut Vec<Vec<usize>>,
    b: usize,
    len: usize,
    f: &mut dyn FnMut(&mut Vec<Vec<usize>>),
) {
    if len <= 1 {
        f(current);
        return;
    }
    for i in 0..len - 1 {
        heap_permutations(current, b, len - 1, f);
        if len.is_multiple_of(2) {
            current[b].swap(i, len - 1);
        } else {
            current[b].swap(0, len - 1);
        }
    }
    heap_permutations(current, b, len - 1, f);
}

/// A byte string that is equal for two hypergraphs iff they are isomorphic.
pub fn canonical_form(f: &Hypergraph, caps: &Caps) -> Result<Vec<u8>> {
    check_canonical_cap(f, caps)?;
    let c = canonize(f);
    let mut out = vec![f.n() as u8, f.k() as u8];
    out.extend_from_slice(&c.bits.to_be_bytes());
    Ok(out)
}

/// The canonical relabeling of `f` (a fixed representative of its
/// isomorphism class).
pub fn canonical_graph(f: &Hypergraph, caps: &Caps) -> Result<Hypergraph> {
    check_canonical_cap(f, caps)?;
    let c = canonize(f);
    Ok(f.relabeled(&c.perm))
}

/// All `k`-graphs on exactly `n` vertices, one per isomorphism class, as
/// canonical representatives ordered by edge count then canonical form.
pub fn enumerate_graphs(n: usize, k: usize, caps: &Caps) -> Result<Vec<Hypergraph>> {
    let empty = Hypergraph::empty(n, k);
    check_canonical_cap(&empty, caps)?;
    let all_sets = k_subsets(n, k);
    let mut out = Vec::new();
    let mut level = vec![canonical_graph(&empty, caps)?];
    while !level.is_empty() {
        out.extend(level.iter().cloned());
        let mut seen: HashMap<Vec<u8>, Hypergraph> = HashMap::new();
        for g in &level {
            for e in &all_sets {
                if let Some(h) = g.with_edge(e) {
                    let key = canonical_form(&h, caps)?;
                    if let std::collections::hash_map::Entry::Vacant(e) = seen.entry(key) {
                        e.insert(canonical_graph(&h, caps)?);
                    }
                }
            }
        }
        let mut next: Vec<(Vec<u8>, Hypergraph)> = seen.into_iter().collect();
        next.sort_by(|a, b| a.0.cmp(&b.0));
        level = next.into_iter().map(|(_, g)| g).collect();
    }
    Ok(out)
}

/// Non-embeddable `k`-graphs with at most `n_max` vertices, one per
/// isomorphism class, ordered by vertex count, edge count and canonical form.
///
/// With `minimal` set, only members none of whose proper subgraphs are in
/// the family are kept.
pub fn forbidden_family(
    p: &Pattern,
    n_max: usize,
    minimal: bool,
    caps: &Caps,
) -> Result<Vec<Hypergraph>> {
    if n_max > caps.family_vertices {
        return Err(Error::CapExceeded {
            what: "vertex count for forbidden-family enumeration",
            value: n_max,
            cap: caps.family_vertices,
        });
    }
    let k = p.k();
    let mut out = Vec::new();
    for n in k..=n_max {
        for g in enumerate_graphs(n, k, caps)? {
            if embeds_into_p_construction(&g, p)?.is_some() {
                continue;
            }
            if minimal && !is_subgraph_minimal(&g, p)? {
                continue;
            }
            out.push(g);
        }
    }
    Ok(out)
}

/// Every proper subgraph embeds: no isolated vertex, and dropping any one
/// edge makes the graph embeddable.
fn is_subgraph_minimal(g: &Hypergraph, p: &Pattern) -> Result<bool> {
    if g.degrees().contains(&0) {
        return Ok(false);
    }
    for i in 0..g.edge_count() {
        if embeds_into_p_construction(&g.without_edge(i), p)?.is_none() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// True iff no member of `family` is a (not necessarily induced) subgraph of `g`.
pub fn is_free(g: &Hypergraph, family: &[Hypergraph]) -> bool {
    family.iter().all(|f| find_embedding(f, g).is_none())
}

#[derive(Debug, Clone, Serialize)]
pub struct ExResult {
    pub n: usize,
    pub value: usize,
    /// One canonical representative per isomorphism class.
    pub extremal_graphs: Vec<Hypergraph>,
}

/// Exact `ex(n, family)` by growing family-free graphs one edge at a time,
/// keeping one representative per isomorphism class.
pub fn ex_bruteforce(n: usize, k: usize, family: &[Hypergraph], caps: &Caps) -> Result<ExResult> {
    if n > caps.bruteforce_n {
        return Err(Error::CapExceeded {
            what: "n for brute-force ex",
            value: n,
            cap: caps.bruteforce_n,
        });
    }
    let all_sets = k_subsets(n, k);
    let start = canonical_graph(&Hypergraph::empty(n, k), caps)?;
    if !is_free(&start, family) {
        return Ok(ExResult {
            n,
            value: 0,
            extremal_graphs: Vec::new(),
        });
    }
    let mut level = vec![start];
    loop {
        let mut seen: HashMap<Vec<u8>, Hypergraph> = HashMap::new();
        for g in &level {
            for e in &all_sets {
                let Some(h) = g.with_edge(e) else { continue };
                let key = canonical_form(&h, caps)?;
                if seen.contains_key(&key) {
                    continue;
                }
                if is_free(&h, family) {
                    seen.insert(key, canonical_graph(&h, caps)?);
                }
            }
        }
        if seen.is_empty() {
            let value = level[0].edge_count();
            return Ok(ExResult {
                n,
                value,
                extremal_graphs: level,
            });
        }
        let mut next: Vec<(Vec<u8>, Hypergraph)> = seen.into_iter().collect();
        next.sort_by(|a, b| a.0.cmp(&b.0));
        level = next.into_iter().map(|(_, g)| g).collect();
    }
}

/// `ex(n, F_n)` for the forbidden family of `p`.
pub fn ex_bruteforce_for_pattern(p: &Pattern, n: usize, caps: &Caps) -> Result<ExResult> {
    let family = forbidden_family(p, n, false, caps)?;
    ex_bruteforce(n, p.k(), &family, caps)
}

/// Replaces vertex `i` by `weights[i]` clones (numbered in consecutive
/// blocks) and keeps every `k`-set that takes at most one clone per original
/// vertex and whose originals form an edge.
pub fn blowup(f: &Hypergraph, weights: &[usize]) -> Result<Hypergraph> {
    if weights.len() != f.n() {
        return Err(Error::DimensionMismatch {
            expected: f.n(),
            got: weights.len(),
        });
    }
    if weights.contains(&0) {
        return Err(Error::InvalidArgument(
            "blow-up weights must be positive".into(),
        ));
    }
    let mut start = Vec::with_capacity(f.n());
    let mut total = 0;
    for &w in weights {
        start.push(total);
        total += w;
    }
    let mut edges = Vec::new();
    for e in f.edges() {
        let mut acc: Vec<Vec<usize>> = vec![Vec::new()];
        for &v in e {
            let mut next = Vec::with_capacity(acc.len() * weights[v]);
            for a in &acc {
                for c in 0..weights[v] {
                    let mut b = a.clone();
                    b.push(start[v] + c);
                    next.push(b);
                }
            }
            acc = next;
        }
        for mut a in acc {
            a.sort_unstable();
            edges.push(a);
        }
    }
    Ok(Hypergraph::from_sorted_edges(total, f.k(), edges))
}

/// True iff some member of `family` maps into `f` injectively on each edge
/// and edges to edges; equivalently, some blow-up of `f` contains a member.
pub fn blowup_closure_contains(f: &Hypergraph, family: &[Hypergraph]) -> Result<bool> {
    if f.n() > 64 {
        return Err(Error::CapExceeded {
            what: "vertex count for homomorphism search",
            value: f.n(),
            cap: 64,
        });
    }
    Ok(family.iter().any(|member| {
        if member.edge_count() > 0 && member.k() != f.k() {
            return false;
        }
        if f.n() == 0 {
            return member.n() == 0;
        }
        MapSearch::new(member, f, false).find().is_some()
    }))
}

#[derive(Debug, Clone, Serialize)]
pub struct RigidityReport {
    pub rigid: bool,
    /// Level-1 parts of `G` (0-based vertex labels).
    pub parts: Vec<Vec<usize>>,
    /// A host bottom partition (part index per vertex) that no pattern
    /// automorphism aligns with `parts`.
    pub counterexample: Option<Vec<usize>>,
    /// Host bottom partitions examined.
    pub hosts_checked: usize,
}

/// Decides rigidity of `G = build_construction(p, t)`.
///
/// `G` is rigid if for every embedding into a `P`-construction whose image
/// meets at least two bottom parts, some automorphism `h` of `P` maps every
/// bottom part `V_i` of `G` into the host part `U_{h(i)}`. Since induced
/// subgraphs of constructions are constructions, it suffices to range over
/// hosts on `V(G)` itself: every partition `U` of `V(G)` into at least two
/// non-empty parts such that `G`'s edges are covered at level 1 and each
/// recursive part of `U` is again embeddable.
pub fn check_rigidity(t: &PartSizeTree, p: &Pattern, caps: &Caps) -> Result<RigidityReport> {
    let Some(sizes) = t.sizes() else {
        return Err(Error::InvalidTree(
            "rigidity needs a construction with a bottom partition".into(),
        ));
    };
    let n = t.total();
    if n > caps.rigidity_vertices {
        return Err(Error::CapExceeded {
            what: "construction size for rigidity check",
            value: n,
            cap: caps.rigidity_vertices,
        });
    }
    let g = build_construction(p, t)?;
    let mut parts = Vec::with_capacity(p.m());
    let mut next = 0;
    for &s in sizes {
        parts.push((next..next + s).collect::<Vec<usize>>());
        next += s;
    }
    let autos = p.automorphisms();
    let m = p.m();
    let all = full_mask(n);
    let mut emb = Embedder::new(&g, p)?;
    let mut counterexample = None;
    let mut hosts_checked = 0;
    emb.search(all, false, &mut |emb, assign| {
        let nonempty = (0..m).filter(|&i| assign.contains(&i)).count();
        if nonempty < 2 || emb.complete_assignment(all, assign).is_none() {
            return false;
        }
        hosts_checked += 1;
        let aligned = autos.iter().any(|h| {
            parts
                .iter()
                .enumerate()
                .all(|(i, vs)| vs.iter().all(|&v| assign[v] == h[i]))
        });
        if !aligned {
            counterexample = Some(assign.to_vec());
            return true;
        }
        false
    });
    Ok(RigidityReport {
        rigid: counterexample.is_none(),
        parts,
        counterexample,
        hosts_checked,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example() -> Pattern {
        Pattern::new(3, 2, vec![Profile::new(vec![1, 2])], vec![0]).unwrap()
    }

    fn edge(k: usize) -> Hypergraph {
        Hypergraph::complete(k, k)
    }

    #[test]
    fn single_edge_embeds_with_split() {
        let e = example();
        let w = embeds_into_p_construction(&edge(3), &e).unwrap().unwrap();
        w.verify(&edge(3), &e).unwrap();
        let mut heads: Vec<usize> = w.branches.iter().map(|b| b[0]).collect();
        heads.sort_unstable();
        assert_eq!(heads, vec![0, 1, 1]);
    }

    #[test]
    fn k4_does_not_embed() {
        let k4 = Hypergraph::complete(4, 3);
        assert!(embeds_into_p_construction(&k4, &example())
            .unwrap()
            .is_none());
    }

    #[test]
    fn empty_graph_embeds() {
        let w = embeds_into_p_construction(&Hypergraph::empty(5, 3), &example())
            .unwrap()
            .unwrap();
        assert!(w.branches.iter().all(|b| b.is_empty()));
    }

    #[test]
    fn witness_verification_catches_bad_profiles() {
        let e = example();
        let bad = EmbeddingWitness {
            branches: vec![vec![1], vec![1], vec![1]],
        };
        assert!(bad.verify(&edge(3), &e).is_err());
        let illegal = EmbeddingWitness {
            branches: vec![vec![1, 0], vec![1], vec![0]],
        };
        assert!(illegal.verify(&edge(3), &e).is_err());
    }

    #[test]
    fn canonical_forms() {
        let caps = Caps::default();
        let k4 = Hypergraph::complete(4, 3);
        let relabeled = k4.relabeled(&[2, 0, 3, 1]);
        assert_eq!(
            canonical_form(&k4, &caps).unwrap(),
            canonical_form(&relabeled, &caps).unwrap()
        );
        assert_ne!(
            canonical_form(&k4, &caps).unwrap(),
            canonical_form(&k4.without_edge(1), &caps).unwrap()
        );
        let e3 = edge(3);
        let e4 = Hypergraph::new(4, 3, vec![vec![0, 1, 2]]).unwrap();
        assert_ne!(
            canonical_form(&e3, &caps).unwrap(),
            canonical_form(&e4, &caps).unwrap()
        );
        assert!(canonical_form(&Hypergraph::empty(10, 3), &caps).is_err());
    }

    #[test]
    fn graph_counts_match_known_values() {
        let caps = Caps::default();
        // non-isomorphic 3-graphs on 4 and 5 vertices, simple graphs on 4 and 5
        assert_eq!(enumerate_graphs(4, 3, &caps).unwrap().len(), 5);
        assert_eq!(enumerate_graphs(5, 3, &caps).unwrap().len(), 34);
        assert_eq!(enumerate_graphs(4, 2, &caps).unwrap().len(), 11);
        assert_eq!(enumerate_graphs(5, 2, &caps).unwrap().len(), 34);
    }

    #[test]
    fn forbidden_family_examples() {
        let caps = Caps::default();
        let fam = forbidden_family(&example(), 4, false, &caps).unwrap();
        let k4 = canonical_form(&Hypergraph::complete(4, 3), &caps).unwrap();
        assert!(fam.iter().any(|g| canonical_form(g, &caps).unwrap() == k4));
        assert!(forbidden_family(&example(), 2, false, &caps)
            .unwrap()
            .is_empty());
        let full = Pattern::new(3, 1, vec![Profile::power(1, 0, 3)], vec![]).unwrap();
        assert!(forbidden_family(&full, 5, false, &caps).unwrap().is_empty());
        assert!(forbidden_family(&example(), 7, false, &caps).is_err());
    }

    #[test]
    fn freeness() {
        let k4 = Hypergraph::complete(4, 3);
        assert!(is_free(&k4, &[]));
        assert!(!is_free(&k4, std::slice::from_ref(&k4)));
        let witness = build_construction(&example(), &PartSizeTree::leaf(vec![1, 3])).unwrap();
        assert!(is_free(&witness, &[k4]));
    }

    #[test]
    fn ex_examples() {
        let caps = Caps::default();
        let r = ex_bruteforce_for_pattern(&example(), 4, &caps).unwrap();
        assert_eq!(r.value, 3);
        assert_eq!(r.extremal_graphs.len(), 1);
        let witness = build_construction(&example(), &PartSizeTree::leaf(vec![1, 3])).unwrap();
        assert_eq!(
            canonical_form(&r.extremal_graphs[0], &caps).unwrap(),
            canonical_form(&witness, &caps).unwrap()
        );
        assert_eq!(ex_bruteforce(5, 3, &[edge(3)], &caps).unwrap().value, 0);
        assert_eq!(ex_bruteforce(5, 3, &[], &caps).unwrap().value, 10);
    }

    #[test]
    fn blowups() {
        let k4 = Hypergraph::complete(4, 3);
        assert_eq!(blowup(&k4, &[1, 1, 1, 1]).unwrap(), k4);
        assert_eq!(blowup(&edge(3), &[2, 1, 1]).unwrap().edge_count(), 2);
        assert!(blowup(&edge(3), &[0, 1, 1]).is_err());
    }

    #[test]
    fn closure_membership() {
        let e3 = edge(3);
        assert!(blowup_closure_contains(&e3, std::slice::from_ref(&e3)).unwrap());
        let two = Hypergraph::new(6, 3, vec![vec![0, 1, 2], vec![3, 4, 5]]).unwrap();
        assert!(blowup_closure_contains(&e3, &[two]).unwrap());
        // 2 and 3 may share an image
        let pair = Hypergraph::new(4, 3, vec![vec![0, 1, 2], vec![0, 1, 3]]).unwrap();
        assert!(blowup_closure_contains(&e3, &[pair]).unwrap());
        let k4 = Hypergraph::complete(4, 3);
        assert!(!blowup_closure_contains(&e3, &[k4]).unwrap());
        assert!(!blowup_closure_contains(&e3, &[]).unwrap());
    }

    #[test]
    fn rigidity_of_worked_example() {
        let caps = Caps::default();
        let e = example();
        assert!(
            check_rigidity(&PartSizeTree::leaf(vec![1, 3]), &e, &caps)
                .unwrap()
                .rigid
        );
        let small = check_rigidity(&PartSizeTree::leaf(vec![1, 2]), &e, &caps).unwrap();
        assert!(!small.rigid);
        assert!(small.counterexample.is_some());
        // no edges at these sizes
        assert!(
            !check_rigidity(&PartSizeTree::leaf(vec![2, 1]), &e, &caps)
                .unwrap()
                .rigid
        );
        assert!(check_rigidity(&PartSizeTree::Empty { n: 3 }, &e, &caps).is_err());
    }
}
