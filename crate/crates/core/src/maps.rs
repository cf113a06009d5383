//! Backtracking over vertex maps `V(F) -> V(G)` that send every edge of `F`
//! onto an edge of `G`.
//!
//! With `injective` set these are subgraph embeddings; otherwise they are
//! homomorphisms. An edge whose image repeats a vertex is never accepted,
//! since its image would not be a `k`-set.

use std::collections::HashSet;

use crate::hypergraph::Hypergraph;

pub(crate) struct MapSearch {
    injective: bool,
    target_n: usize,
    target_edges: HashSet<u64>,
    /// Vertices of the source in search order; isolated vertices excluded.
    order: Vec<usize>,
    /// Edges (as source vertex lists) that become fully mapped at each step.
    closing: Vec<Vec<Vec<usize>>>,
    isolated: usize,
    source_n: usize,
}

impl MapSearch {
    /// Requires `g.n() <= 64`.
    pub(crate) fn new(f: &Hypergraph, g: &Hypergraph, injective: bool) -> Self {
        let n = f.n();
        let mut adj = vec![vec![0usize; n]; n];
        let deg = f.degrees();
        for e in f.edges() {
            for &a in e {
                for &b in e {
                    if a != b {
                        adj[a][b] += 1;
                    }
                }
            }
        }
        // Greedy order: most connections to already ordered vertices first.
        let mut order = Vec::new();
        let mut placed = vec![false; n];
        let active: Vec<usize> = (0..n).filter(|&v| deg[v] > 0).collect();
        while order.len() < active.len() {
            let next = active
                .iter()
                .copied()
                .filter(|&v| !placed[v])
                .max_by_key(|&v| {
                    let links: usize = order.iter().map(|&u: &usize| adj[v][u]).sum();
                    (links, deg[v], std::cmp::Reverse(v))
                })
                .expect("unplaced vertex");
            placed[next] = true;
            order.push(next);
        }
        let mut pos = vec![usize::MAX; n];
        for (i, &v) in order.iter().enumerate() {
            pos[v] = i;
        }
        let mut closing = vec![Vec::new(); order.len()];
        for e in f.edges() {
            let last = e.iter().map(|&v| pos[v]).max().expect("non-empty edge");
            closing[last].push(e.clone());
        }
        MapSearch {
            injective,
            target_n: g.n(),
            target_edges: g.edge_masks().into_iter().collect(),
            order,
            closing,
            isolated: n - active.len(),
            source_n: n,
        }
    }

    fn edge_ok(&self, e: &[usize], image: &[usize], k: usize) -> bool {
        let mask = e.iter().fold(0u64, |acc, &v| acc | 1 << image[v]);
        mask.count_ones() as usize == k && self.target_edges.contains(&mask)
    }

    /// Number of maps (counting isolated source vertices freely).
    pub(crate) fn count(&self) -> u128 {
        let mut image = vec![usize::MAX; self.source_n];
        let mut used = vec![false; self.target_n];
        let base = self.count_from(0, &mut image, &mut used);
        if self.injective {
            // isolated vertices take distinct unused targets
            let free = self.target_n.saturating_sub(self.order.len());
            let mut f = 1u128;
            for i in 0..self.isolated {
                f *= free.saturating_sub(i) as u128;
            }
            base * f
        } else {
            base * (self.target_n as u128).pow(self.isolated as u32)
        }
    }

    fn count_from(&self, i: usize, image: &mut [usize], used: &mut [bool]) -> u128 {
        if i == self.order.len() {
            return 1;
        }
        let v = self.order[i];
        let mut total = 0;
        for t in 0..self.target_n {
            if self.injective && used[t] {
                continue;
            }
            image[v] = t;
            if self.closing[i]
                .iter()
                .all(|e| self.edge_ok(e, image, e.len()))
            {
                used[t] = true;
                total += self.count_from(i + 1, image, used);
                used[t] = false;
            }
        }
        image[v] = usize::MAX;
        total
    }

    /// Some map, if one exists.
    pub(crate) fn find(&self) -> Option<Vec<usize>> {
        if self.injective && self.source_n > self.target_n {
            return None;
        }
        let mut image = vec![usize::MAX; self.source_n];
        let mut used = vec![false; self.target_n];
        if !self.find_from(0, &mut image, &mut used) {
            return None;
        }
        // place isolated vertices
        for slot in image.iter_mut().filter(|s| **s == usize::MAX) {
            *slot = if self.injective {
                let t = used.iter().position(|&u| !u)?;
                used[t] = true;
                t
            } else {
                0
            };
        }
        Some(image)
    }

    fn find_from(&self, i: usize, image: &mut [usize], used: &mut [bool]) -> bool {
        if i == self.order.len() {
            return true;
        }
        let v = self.order[i];
        for t in 0..self.target_n {
            if self.injective && used[t] {
                continue;
            }
            image[v] = t;
            if self.closing[i]
                .iter()
                .all(|e| self.edge_ok(e, image, e.len()))
            {
                used[t] = true;
                if self.find_from(i + 1, image, used) {
                    return true;
                }
                used[t] = false;
            }
        }
        image[v] = usize::MAX;
        false
    }
}

/// Subgraph embedding of `f` into `g`, if any.
pub(crate) fn find_embedding(f: &Hypergraph, g: &Hypergraph) -> Option<Vec<usize>> {
    if f.k() != g.k() && f.edge_count() > 0 {
        return None;
    }
    if f.n() > g.n() || f.edge_count() > g.edge_count() {
        return None;
    }
    MapSearch::new(f, g, true).find()
}
