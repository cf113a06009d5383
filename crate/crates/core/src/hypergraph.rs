//! Finite `k`-graphs.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::pattern::k_subsets;

/// A `k`-uniform hypergraph on vertices `0..n`. Edges are sorted vertex
/// lists, kept in lexicographic order without duplicates.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Hypergraph {
    n: usize,
    k: usize,
    edges: Vec<Vec<usize>>,
}

impl Hypergraph {
    pub fn new(n: usize, k: usize, edges: Vec<Vec<usize>>) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidHypergraph(
                "uniformity must be positive".into(),
            ));
        }
        let mut set = BTreeSet::new();
        for mut e in edges {
            e.sort_unstable();
            if e.len() != k {
                return Err(Error::InvalidHypergraph(format!(
                    "edge {e:?} has {} vertices, expected {k}",
                    e.len()
                )));
            }
            if e.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidHypergraph(format!(
                    "edge {e:?} repeats a vertex"
                )));
            }
            if e.last().is_some_and(|&v| v >= n) {
                return Err(Error::InvalidHypergraph(format!(
                    "edge {e:?} uses a vertex outside 0..{n}"
                )));
            }
            if !set.insert(e.clone()) {
                return Err(Error::InvalidHypergraph(format!("duplicate edge {e:?}")));
            }
        }
        Ok(Hypergraph {
            n,
            k,
            edges: set.into_iter().collect(),
        })
    }

    /// Builds from edges that are already sorted, in range and distinct
    /// (possibly unordered as a list).
    pub(crate) fn from_sorted_edges(n: usize, k: usize, mut edges: Vec<Vec<usize>>) -> Self {
        edges.sort();
        edges.dedup();
        Hypergraph { n, k, edges }
    }

    pub fn empty(n: usize, k: usize) -> Self {
        Hypergraph {
            n,
            k,
            edges: Vec::new(),
        }
    }

    /// `K_n^k`.
    pub fn complete(n: usize, k: usize) -> Self {
        Hypergraph {
            n,
            k,
            edges: k_subsets(n, k),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn edges(&self) -> &[Vec<usize>] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn contains_edge(&self, e: &[usize]) -> bool {
        self.edges.binary_search_by(|x| x.as_slice().cmp(e)).is_ok()
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.n];
        for e in &self.edges {
            for &v in e {
                d[v] += 1;
            }
        }
        d
    }

    /// Vertex sets of edges as bitmasks. Requires `n <= 64`.
    pub(crate) fn edge_masks(&self) -> Vec<u64> {
        debug_assert!(self.n <= 64);
        self.edges
            .iter()
            .map(|e| e.iter().fold(0u64, |acc, &v| acc | 1 << v))
            .collect()
    }

    /// Relabels vertex `v` as `perm[v]`.
    pub fn relabeled(&self, perm: &[usize]) -> Hypergraph {
        let edges = self
            .edges
            .iter()
            .map(|e| {
                let mut f: Vec<usize> = e.iter().map(|&v| perm[v]).collect();
                f.sort_unstable();
                f
            })
            .collect();
        Hypergraph::from_sorted_edges(self.n, self.k, edges)
    }

    /// `G[U]` with the vertices of `U` renumbered `0..|U|` in increasing order.
    pub fn induced(&self, vertices: &[usize]) -> Hypergraph {
        let mut index = vec![usize::MAX; self.n];
        let mut sorted = vertices.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        for (i, &v) in sorted.iter().enumerate() {
            index[v] = i;
        }
        let edges = self
            .edges
            .iter()
            .filter(|e| e.iter().all(|&v| index[v] != usize::MAX))
            .map(|e| e.iter().map(|&v| index[v]).collect())
            .collect();
        Hypergraph::from_sorted_edges(sorted.len(), self.k, edges)
    }

    pub fn remove_vertex(&self, v: usize) -> Hypergraph {
        let keep: Vec<usize> = (0..self.n).filter(|&u| u != v).collect();
        self.induced(&keep)
    }

    pub fn without_edge(&self, idx: usize) -> Hypergraph {
        let mut edges = self.edges.clone();
        edges.remove(idx);
        Hypergraph {
            n: self.n,
            k: self.k,
            edges,
        }
    }

    /// Adds an edge; returns `None` if it is already present.
    pub fn with_edge(&self, e: &[usize]) -> Option<Hypergraph> {
        match self.edges.binary_search_by(|x| x.as_slice().cmp(e)) {
            Ok(_) => None,
            Err(pos) => {
                let mut edges = self.edges.clone();
                edges.insert(pos, e.to_vec());
                Some(Hypergraph {
                    n: self.n,
                    k: self.k,
                    edges,
                })
            }
        }
    }

    /// Parses `n k` followed by one edge per line (0-based vertices).
    pub fn parse(text: &str) -> Result<Hypergraph> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(n, l)| (n + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());
        let (ln, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            msg: "missing `n k` header".into(),
        })?;
        let head = numbers(ln, header)?;
        if head.len() != 2 {
            return Err(Error::Parse {
                line: ln,
                msg: format!("expected `n k`, found `{header}`"),
            });
        }
        let mut edges = Vec::new();
        for (ln, line) in lines {
            edges.push(numbers(ln, line)?);
        }
        Hypergraph::new(head[0], head[1], edges)
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("{} {}\n", self.n, self.k);
        for e in &self.edges {
            let row: Vec<String> = e.iter().map(|v| v.to_string()).collect();
            let _ = writeln!(s, "{}", row.join(" "));
        }
        s
    }
}

fn numbers(line: usize, s: &str) -> Result<Vec<usize>> {
    s.split_whitespace()
        .map(|t| {
            t.parse().map_err(|_| Error::Parse {
                line,
                msg: format!("expected a non-negative integer, found `{t}`"),
            })
        })
        .collect()
}

/// Extremes of the vertex degrees.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DegreeReport {
    pub min: usize,
    pub max: usize,
    /// Smallest vertex attaining `min`; `None` on the empty vertex set.
    pub argmin: Option<usize>,
}

pub fn min_degree_report(g: &Hypergraph) -> DegreeReport {
    let d = g.degrees();
    let min = d.iter().copied().min().unwrap_or(0);
    DegreeReport {
        min,
        max: d.iter().copied().max().unwrap_or(0),
        argmin: d.iter().position(|&x| x == min),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_edges() {
        assert!(Hypergraph::new(3, 3, vec![vec![0, 1]]).is_err());
        assert!(Hypergraph::new(3, 3, vec![vec![0, 1, 1]]).is_err());
        assert!(Hypergraph::new(3, 3, vec![vec![0, 1, 3]]).is_err());
        assert!(Hypergraph::new(3, 3, vec![vec![0, 1, 2], vec![2, 1, 0]]).is_err());
        let g = Hypergraph::new(4, 3, vec![vec![3, 1, 0]]).unwrap();
        assert_eq!(g.edges(), &[vec![0, 1, 3]]);
    }

    #[test]
    fn text_round_trip() {
        let g = Hypergraph::complete(4, 3);
        let parsed = Hypergraph::parse(&g.to_text()).unwrap();
        assert_eq!(parsed, g);
        let with_comments = "# K4 minus an edge\n4 3\n0 1 2\n0 1 3 # second\n0 2 3\n";
        assert_eq!(Hypergraph::parse(with_comments).unwrap().edge_count(), 3);
    }

    #[test]
    fn degree_reports() {
        let e = min_degree_report(&Hypergraph::empty(5, 3));
        assert_eq!((e.min, e.max), (0, 0));
        let k4 = min_degree_report(&Hypergraph::complete(4, 3));
        assert_eq!((k4.min, k4.max, k4.argmin), (3, 3, Some(0)));
        let none = min_degree_report(&Hypergraph::empty(0, 3));
        assert_eq!(none.argmin, None);
    }

    #[test]
    fn induced_and_removal() {
        let k5 = Hypergraph::complete(5, 3);
        assert_eq!(k5.remove_vertex(2), Hypergraph::complete(4, 3));
        assert_eq!(k5.induced(&[4, 0, 2]).edges(), &[vec![0, 1, 2]]);
    }
}
