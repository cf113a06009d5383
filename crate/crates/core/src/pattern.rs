//! Patterns `(m, E, R)`, their profiles and structural predicates.
//!
//! A pattern over `k`-graphs has `m` parts, a set `E` of allowed profiles
//! (`k`-multisets over the parts, stored as multiplicity vectors) and a set
//! `R` of parts inside which the construction recurses.
//!
//! Parts are 0-based in this API. The text format and the CLI use 1-based
//! part indices.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A multiset over the parts `0..m`, stored as its multiplicity vector.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Profile(Vec<usize>);

impl Profile {
    pub fn new(mult: Vec<usize>) -> Self {
        Profile(mult)
    }

    /// The profile of a simple set of parts.
    pub fn from_set(m: usize, parts: &[usize]) -> Self {
        let mut mult = vec![0; m];
        for &p in parts {
            mult[p] += 1;
        }
        Profile(mult)
    }

    /// `<i^k>`.
    pub fn power(m: usize, i: usize, k: usize) -> Self {
        let mut mult = vec![0; m];
        mult[i] = k;
        Profile(mult)
    }

    pub fn mult(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn weight(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn get(&self, i: usize) -> usize {
        self.0[i]
    }

    pub fn is_simple(&self) -> bool {
        self.0.iter().all(|&d| d <= 1)
    }

    /// The profile with coordinate `i` raised by one.
    pub fn incremented(&self, i: usize) -> Profile {
        let mut mult = self.0.clone();
        mult[i] += 1;
        Profile(mult)
    }

    /// The profile with coordinate `i` lowered by one, if it is positive.
    pub fn decremented(&self, i: usize) -> Option<Profile> {
        if self.0[i] == 0 {
            return None;
        }
        let mut mult = self.0.clone();
        mult[i] -= 1;
        Some(Profile(mult))
    }

    /// Coordinates permuted so that part `i` becomes part `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Profile {
        let mut mult = vec![0; self.0.len()];
        for (i, &d) in self.0.iter().enumerate() {
            mult[perm[i]] = d;
        }
        Profile(mult)
    }
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, d) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{d}")?;
        }
        write!(f, ")")
    }
}

/// One broken pattern invariant.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub reason: String,
}

impl Violation {
    fn new(reason: impl Into<String>) -> Self {
        Violation {
            reason: reason.into(),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.reason)
    }
}

/// A pattern `(m, E, R)` for `k`-graphs.
///
/// Instances built through [`Pattern::new`] or parsed from text satisfy all
/// invariants. [`Pattern::from_parts_unchecked`] skips validation so that
/// [`Pattern::validate`] can report on arbitrary data.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Pattern {
    k: usize,
    m: usize,
    profiles: Vec<Profile>,
    recursive: Vec<usize>,
}

impl Pattern {
    /// Builds a validated pattern. `recursive` holds 0-based part indices.
    pub fn new(k: usize, m: usize, profiles: Vec<Profile>, recursive: Vec<usize>) -> Result<Self> {
        let p = Self::from_parts_unchecked(k, m, profiles, recursive);
        let violations = p.validate();
        if violations.is_empty() {
            Ok(p)
        } else {
            Err(Error::InvalidPattern(violations))
        }
    }

    pub fn from_parts_unchecked(
        k: usize,
        m: usize,
        mut profiles: Vec<Profile>,
        mut recursive: Vec<usize>,
    ) -> Self {
        profiles.sort();
        recursive.sort_unstable();
        Pattern {
            k,
            m,
            profiles,
            recursive,
        }
    }

    /// The pattern with no parts. Every construction over it is empty.
    pub fn empty(k: usize) -> Self {
        Pattern {
            k,
            m: 0,
            profiles: Vec::new(),
            recursive: Vec::new(),
        }
    }

    /// `(m, all k-subsets of [m], ∅)`, whose constructions are blow-ups of `K_m^k`.
    pub fn complete(k: usize, m: usize) -> Self {
        let profiles = k_subsets(m, k)
            .into_iter()
            .map(|s| Profile::from_set(m, &s))
            .collect();
        Self::from_parts_unchecked(k, m, profiles, Vec::new())
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// The allowed profiles `E`, sorted.
    pub fn profiles(&self) -> &[Profile] {
        &self.profiles
    }

    /// The recursive parts `R` (0-based, sorted).
    pub fn recursive(&self) -> &[usize] {
        &self.recursive
    }

    pub fn is_recursive(&self, i: usize) -> bool {
        self.recursive.binary_search(&i).is_ok()
    }

    pub fn contains_profile(&self, d: &Profile) -> bool {
        self.profiles.binary_search(d).is_ok()
    }

    /// Every invariant violation, empty iff the pattern is well formed.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if self.k < 2 {
            out.push(Violation::new(format!(
                "uniformity k={} must be at least 2",
                self.k
            )));
        }
        for d in &self.profiles {
            if d.len() != self.m {
                out.push(Violation::new(format!(
                    "profile {d} has length {} but m={}",
                    d.len(),
                    self.m
                )));
            } else if d.weight() != self.k {
                out.push(Violation::new(format!(
                    "profile weight ≠ k: {d} has weight {} but k={}",
                    d.weight(),
                    self.k
                )));
            }
        }
        for w in self.profiles.windows(2) {
            if w[0] == w[1] {
                out.push(Violation::new(format!("duplicate profile {}", w[0])));
            }
        }
        for &i in &self.recursive {
            if i >= self.m {
                out.push(Violation::new(format!(
                    "R index out of range: {} not in 1..={}",
                    i + 1,
                    self.m
                )));
            }
        }
        for w in self.recursive.windows(2) {
            if w[0] == w[1] {
                out.push(Violation::new(format!("duplicate R index {}", w[0] + 1)));
            }
        }
        out
    }

    fn check_index(&self, i: usize) -> Result<()> {
        if i >= self.m {
            Err(Error::IndexOutOfRange {
                index: i,
                parts: self.m,
            })
        } else {
            Ok(())
        }
    }

    /// The link `E_i`: all `(k-1)`-profiles `A` with `A + e_i ∈ E`.
    pub fn link(&self, i: usize) -> Result<BTreeSet<Profile>> {
        self.check_index(i)?;
        Ok(self
            .profiles
            .iter()
            .filter_map(|d| d.decremented(i))
            .collect())
    }

    /// `P - i`: drop part `i` from `R` and every profile that uses it, then
    /// relabel the remaining parts to `0..m-1`.
    pub fn remove_index(&self, i: usize) -> Result<Pattern> {
        self.check_index(i)?;
        let profiles = self
            .profiles
            .iter()
            .filter(|d| d.get(i) == 0)
            .map(|d| {
                let mut mult = d.mult().to_vec();
                mult.remove(i);
                Profile(mult)
            })
            .collect();
        let recursive = self
            .recursive
            .iter()
            .filter(|&&r| r != i)
            .map(|&r| if r > i { r - 1 } else { r })
            .collect();
        Ok(Self::from_parts_unchecked(
            self.k,
            self.m - 1,
            profiles,
            recursive,
        ))
    }

    /// The pattern with parts relabeled so that part `i` becomes `perm[i]`.
    pub fn relabeled(&self, perm: &[usize]) -> Pattern {
        let profiles = self.profiles.iter().map(|d| d.permuted(perm)).collect();
        let recursive = self.recursive.iter().map(|&r| perm[r]).collect();
        Self::from_parts_unchecked(self.k, self.m, profiles, recursive)
    }

    /// All permutations `h` of the parts with `h(R) = R` and `h(E) = E`,
    /// each given as the image vector `i -> h[i]`, in lexicographic order.
    pub fn automorphisms(&self) -> Vec<Vec<usize>> {
        let m = self.m;
        // Sorted column of multiplicities per part; automorphisms preserve it.
        let signature: Vec<(bool, Vec<usize>)> = (0..m)
            .map(|i| {
                let mut col: Vec<usize> = self.profiles.iter().map(|d| d.get(i)).collect();
                col.sort_unstable();
                (self.is_recursive(i), col)
            })
            .collect();
        let mut out = Vec::new();
        let mut perm = Vec::with_capacity(m);
        let mut used = vec![false; m];
        self.extend_automorphism(&signature, &mut perm, &mut used, &mut out);
        out
    }

    fn extend_automorphism(
        &self,
        signature: &[(bool, Vec<usize>)],
        perm: &mut Vec<usize>,
        used: &mut [bool],
        out: &mut Vec<Vec<usize>>,
    ) {
        let i = perm.len();
        if i == self.m {
            let image: BTreeSet<Profile> = self.profiles.iter().map(|d| d.permuted(perm)).collect();
            if image.len() == self.profiles.len() && image.iter().all(|d| self.contains_profile(d))
            {
                out.push(perm.clone());
            }
            return;
        }
        for j in 0..self.m {
            if !used[j] && signature[i] == signature[j] {
                used[j] = true;
                perm.push(j);
                self.extend_automorphism(signature, perm, used, out);
                perm.pop();
                used[j] = false;
            }
        }
    }

    /// Syntactic test for `Λ_P = 1`: some `<i^k> ∈ E`, or some `i ∈ R` and
    /// `j ≠ i` with `<i^{k-1}, j> ∈ E`.
    pub fn density_one_check(&self) -> bool {
        let k = self.k;
        self.profiles.iter().any(|d| {
            (0..self.m).any(|i| {
                let di = d.get(i);
                di == k || (di + 1 == k && self.is_recursive(i))
            })
        })
    }

    /// Ordered pairs `(i, j)`, `i ≠ j`, whose links satisfy `E_i ⊆ E_j`.
    ///
    /// In a minimal pattern any such pair has `i ∈ R`, `j ∉ R` and
    /// `E_i ≠ E_j`; pairs breaking that are flagged. A flagged pair proves
    /// non-minimality; an unflagged report proves nothing.
    pub fn link_dominance_report(&self) -> Vec<LinkDominance> {
        let links: Vec<BTreeSet<Profile>> = (0..self.m)
            .map(|i| {
                self.profiles
                    .iter()
                    .filter_map(|d| d.decremented(i))
                    .collect()
            })
            .collect();
        let mut out = Vec::new();
        for i in 0..self.m {
            for j in 0..self.m {
                if i != j && links[i].is_subset(&links[j]) {
                    let allowed =
                        self.is_recursive(i) && !self.is_recursive(j) && links[i] != links[j];
                    out.push(LinkDominance {
                        i,
                        j,
                        equal: links[i] == links[j],
                        violates_minimality: !allowed,
                    });
                }
            }
        }
        out
    }

    /// Parses the text format:
    ///
    /// ```text
    /// # comment
    /// k m
    /// R: i1 i2 ...
    /// d1 d2 ... dm
    /// ```
    ///
    /// with 1-based `R` indices and one profile (as multiplicities) per line.
    pub fn parse(text: &str) -> Result<Pattern> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(n, l)| (n + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());

        let (ln, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            msg: "missing `k m` header".into(),
        })?;
        let nums = parse_numbers(ln, header)?;
        if nums.len() != 2 {
            return Err(Error::Parse {
                line: ln,
                msg: format!("expected `k m`, found `{header}`"),
            });
        }
        let (k, m) = (nums[0], nums[1]);

        let (ln, rline) = lines.next().ok_or(Error::Parse {
            line: ln + 1,
            msg: "missing `R:` line".into(),
        })?;
        let rest = rline.strip_prefix("R:").ok_or(Error::Parse {
            line: ln,
            msg: format!("expected `R: ...`, found `{rline}`"),
        })?;
        let mut recursive = Vec::new();
        for i in parse_numbers(ln, rest)? {
            if i == 0 {
                return Err(Error::Parse {
                    line: ln,
                    msg: "R indices are 1-based".into(),
                });
            }
            recursive.push(i - 1);
        }

        let mut profiles = Vec::new();
        let mut seen = BTreeSet::new();
        for (ln, line) in lines {
            let mult = parse_numbers(ln, line)?;
            if mult.len() != m {
                return Err(Error::Parse {
                    line: ln,
                    msg: format!("profile has {} entries, expected m={m}", mult.len()),
                });
            }
            let d = Profile(mult);
            if !seen.insert(d.clone()) {
                return Err(Error::Parse {
                    line: ln,
                    msg: format!("duplicate profile {d}"),
                });
            }
            profiles.push(d);
        }
        Pattern::new(k, m, profiles, recursive)
    }

    /// Renders the text format accepted by [`Pattern::parse`].
    pub fn to_text(&self) -> String {
        let mut s = format!("{} {}\nR:", self.k, self.m);
        for r in &self.recursive {
            s.push_str(&format!(" {}", r + 1));
        }
        s.push('\n');
        for d in &self.profiles {
            let row: Vec<String> = d.mult().iter().map(|x| x.to_string()).collect();
            s.push_str(&row.join(" "));
            s.push('\n');
        }
        s
    }
}

impl FromStr for Pattern {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Pattern::parse(s)
    }
}

/// One entry of [`Pattern::link_dominance_report`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LinkDominance {
    pub i: usize,
    pub j: usize,
    pub equal: bool,
    pub violates_minimality: bool,
}

fn parse_numbers(line: usize, s: &str) -> Result<Vec<usize>> {
    s.split_whitespace()
        .map(|t| {
            t.parse::<usize>().map_err(|_| Error::Parse {
                line,
                msg: format!("expected a non-negative integer, found `{t}`"),
            })
        })
        .collect()
}

/// All `k`-subsets of `0..n` in lexicographic order.
pub fn k_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut cur: Vec<usize> = (0..k).collect();
    loop {
        out.push(cur.clone());
        let mut i = k;
        while i > 0 && cur[i - 1] == n - k + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return out;
        }
        cur[i - 1] += 1;
        for j in i..k {
            cur[j] = cur[j - 1] + 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(v: &[usize]) -> Profile {
        Profile::new(v.to_vec())
    }

    pub(crate) fn example() -> Pattern {
        Pattern::new(3, 2, vec![p(&[1, 2])], vec![0]).unwrap()
    }

    fn two_edge_star() -> Pattern {
        Pattern::new(2, 3, vec![p(&[1, 1, 0]), p(&[1, 0, 1])], vec![]).unwrap()
    }

    #[test]
    fn example_is_valid() {
        assert!(example().validate().is_empty());
    }

    #[test]
    fn short_profile_is_reported() {
        let bad = Pattern::from_parts_unchecked(3, 2, vec![p(&[1, 1])], vec![0]);
        let v = bad.validate();
        assert_eq!(v.len(), 1);
        assert!(v[0].reason.starts_with("profile weight ≠ k"));
    }

    #[test]
    fn recursive_index_out_of_range() {
        let bad = Pattern::from_parts_unchecked(3, 2, vec![p(&[1, 2])], vec![2]);
        let v = bad.validate();
        assert_eq!(v.len(), 1);
        assert!(v[0].reason.starts_with("R index out of range"));
    }

    #[test]
    fn links_of_example() {
        let e = example();
        assert_eq!(e.link(0).unwrap(), BTreeSet::from([p(&[0, 2])]));
        assert_eq!(e.link(1).unwrap(), BTreeSet::from([p(&[1, 1])]));
        assert!(e.link(2).is_err());
        let empty = Pattern::new(3, 2, vec![], vec![0]).unwrap();
        assert!(empty.link(0).unwrap().is_empty());
        assert!(empty.link(1).unwrap().is_empty());
    }

    #[test]
    fn remove_index_examples() {
        let e = example().remove_index(1).unwrap();
        assert_eq!(e.m(), 1);
        assert!(e.profiles().is_empty());
        assert_eq!(e.recursive(), &[0]);

        let s = two_edge_star().remove_index(2).unwrap();
        assert_eq!(s, Pattern::new(2, 2, vec![p(&[1, 1])], vec![]).unwrap());

        // part 3 is unused
        let q = Pattern::new(2, 3, vec![p(&[1, 1, 0])], vec![]).unwrap();
        let r = q.remove_index(2).unwrap();
        assert_eq!(r.profiles(), &[p(&[1, 1])]);

        let single = Pattern::new(3, 1, vec![p(&[3])], vec![]).unwrap();
        let gone = single.remove_index(0).unwrap();
        assert_eq!(gone.m(), 0);
        assert!(gone.profiles().is_empty() && gone.recursive().is_empty());
    }

    #[test]
    fn automorphisms() {
        assert_eq!(Pattern::complete(3, 4).automorphisms().len(), 24);
        assert_eq!(Pattern::complete(2, 3).automorphisms().len(), 6);
        assert_eq!(example().automorphisms(), vec![vec![0, 1]]);
        let single = Pattern::new(3, 1, vec![p(&[3])], vec![]).unwrap();
        assert_eq!(single.automorphisms(), vec![vec![0]]);
        // swapping parts 2 and 3 of the star
        assert_eq!(
            two_edge_star().automorphisms(),
            vec![vec![0, 1, 2], vec![0, 2, 1]]
        );
    }

    #[test]
    fn density_one() {
        for k in 2..6 {
            let full = Pattern::new(k, 1, vec![Profile::power(1, 0, k)], vec![]).unwrap();
            assert!(full.density_one_check());
            let mut mult = vec![k - 1, 1];
            let rec = Pattern::new(k, 2, vec![p(&mult)], vec![0]).unwrap();
            assert!(rec.density_one_check());
            // same profile without recursion is not enough
            mult.reverse();
            let norec = Pattern::new(k, 2, vec![p(&mult)], vec![0]).unwrap();
            assert_eq!(norec.density_one_check(), k == 2);
        }
        assert!(!example().density_one_check());
    }

    #[test]
    fn link_dominance() {
        let r = two_edge_star().link_dominance_report();
        let pairs: Vec<(usize, usize)> = r.iter().map(|d| (d.i, d.j)).collect();
        assert_eq!(pairs, vec![(1, 2), (2, 1)]);
        assert!(r.iter().all(|d| d.equal && d.violates_minimality));

        assert!(example().link_dominance_report().is_empty());

        let empty = Pattern::new(3, 3, vec![], vec![]).unwrap();
        assert_eq!(empty.link_dominance_report().len(), 6);
    }

    #[test]
    fn parse_round_trip() {
        let text = "# worked example\n3 2\nR: 1\n1 2  # the only profile\n";
        let e = Pattern::parse(text).unwrap();
        assert_eq!(e, example());
        assert_eq!(Pattern::parse(&e.to_text()).unwrap(), e);
    }

    #[test]
    fn parse_rejects_duplicates_and_bad_weights() {
        assert!(matches!(
            Pattern::parse("3 2\nR: 1\n1 2\n1 2\n"),
            Err(Error::Parse { line: 4, .. })
        ));
        assert!(matches!(
            Pattern::parse("3 2\nR: 1\n1 1\n"),
            Err(Error::InvalidPattern(_))
        ));
        assert!(matches!(
            Pattern::parse("3 2\nR: 3\n1 2\n"),
            Err(Error::InvalidPattern(_))
        ));
        assert!(Pattern::parse("3 2\n1 2\n").is_err());
        // empty R line is fine
        assert!(Pattern::parse("3 2\nR:\n1 2\n").is_ok());
    }

    #[test]
    fn subsets() {
        assert_eq!(k_subsets(4, 2).len(), 6);
        assert_eq!(k_subsets(5, 3)[0], vec![0, 1, 2]);
        assert!(k_subsets(2, 3).is_empty());
        assert_eq!(k_subsets(3, 0), vec![Vec::<usize>::new()]);
    }
}
