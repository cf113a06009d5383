//! Homomorphism densities and Lagrangian diagnostics for sequences of
//! hypergraphs.
//!
//! Limit functionals are never represented directly; everything here works on
//! a single finite hypergraph and reports numbers that a convergent sequence
//! would have to drive to zero.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::caps::Caps;
use crate::construction::binomial;
use crate::error::{Error, Result};
use crate::hypergraph::Hypergraph;
use crate::lagrangian::{maximize_lagrangian, LagrangianConfig, LagrangianResult};
use crate::maps::{find_embedding, MapSearch};
use crate::pattern::{Pattern, Profile};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DensityReport {
    /// `hom_count / map_count`, exact.
    pub t_value: BigRational,
    pub hom_count: BigUint,
    /// `v(g)^{v(f)}`.
    pub map_count: BigUint,
}

impl DensityReport {
    pub fn t_f64(&self) -> f64 {
        self.t_value.to_f64().unwrap_or(f64::NAN)
    }
}

fn ratio(num: BigUint, den: BigUint) -> BigRational {
    BigRational::new(num.into(), den.into())
}

/// Homomorphism density `t(f, g)`: the probability that a uniformly random
/// map `V(f) -> V(g)` sends every edge of `f` onto an edge of `g`.
///
/// A map that collapses an edge of `f` is never a homomorphism, because the
/// image of an edge has to be a `k`-set.
pub fn hom_density(f: &Hypergraph, g: &Hypergraph, caps: &Caps) -> Result<DensityReport> {
    if f.n() > caps.hom_source_vertices {
        return Err(Error::CapExceeded {
            what: "hom_density source vertices",
            value: f.n(),
            cap: caps.hom_source_vertices,
        });
    }
    if g.n() > caps.hom_target_vertices {
        return Err(Error::CapExceeded {
            what: "hom_density target vertices",
            value: g.n(),
            cap: caps.hom_target_vertices,
        });
    }
    if f.edge_count() > 0 && f.k() != g.k() {
        return Err(Error::DimensionMismatch {
            expected: f.k(),
            got: g.k(),
        });
    }
    let map_count = BigUint::from(g.n()).pow(f.n() as u32);
    if map_count.is_zero() {
        // v(g) = 0 and v(f) > 0: no maps at all; treat the density as 0.
        return Ok(DensityReport {
            t_value: BigRational::zero(),
            hom_count: BigUint::zero(),
            map_count,
        });
    }
    let hom_count = BigUint::from(MapSearch::new(f, g, false).count());
    Ok(DensityReport {
        t_value: ratio(hom_count.clone(), map_count.clone()),
        hom_count,
        map_count,
    })
}

/// Edge density `ρ(g) = |g| / C(v(g), k)`, with `ρ = 0` when `v(g) < k`.
pub fn edge_density(g: &Hypergraph) -> BigRational {
    let total = binomial(g.n(), g.k());
    if total.is_zero() {
        return BigRational::zero();
    }
    ratio(BigUint::from(g.edge_count()), total)
}

/// `k! |g| / v(g)^k`, which equals `t(K_k^k, g)`.
pub fn uniform_point_value(g: &Hypergraph) -> BigRational {
    if g.n() == 0 {
        return BigRational::zero();
    }
    let fact: BigUint = (1..=g.k()).map(BigUint::from).product();
    ratio(
        fact * BigUint::from(g.edge_count()),
        BigUint::from(g.n()).pow(g.k() as u32),
    )
}

/// The pattern `(v(g), edges as simple profiles, ∅)`, whose Lagrangian is
/// the hypergraph Lagrangian of `g`.
pub fn hypergraph_pattern(g: &Hypergraph) -> Result<Pattern> {
    let profiles = g
        .edges()
        .iter()
        .map(|e| Profile::from_set(g.n(), e))
        .collect();
    Pattern::new(g.k(), g.n(), profiles, Vec::new())
}

/// Hypergraph Lagrangian `Λ_g = max_x λ_g(x)` over the simplex on `V(g)`.
pub fn hypergraph_lagrangian(g: &Hypergraph, cfg: &LagrangianConfig) -> Result<LagrangianResult> {
    maximize_lagrangian(&hypergraph_pattern(g)?, cfg)
}

#[derive(Debug, Clone, Serialize)]
pub struct CtGap {
    pub density: BigRational,
    pub lagrangian: f64,
    /// `ρ(g) − Λ_g`, signed; small negative values are optimizer noise.
    pub gap: f64,
}

/// `ρ(g) − Λ_g`. Along a sequence converging to a limit of the kind
/// characterized by the recursive-blow-up theory, this gap tends to zero.
pub fn ct_gap(g: &Hypergraph, cfg: &LagrangianConfig) -> Result<CtGap> {
    let density = edge_density(g);
    let lagrangian = hypergraph_lagrangian(g, cfg)?.value;
    let gap = density.to_f64().unwrap_or(f64::NAN) - lagrangian;
    Ok(CtGap {
        density,
        lagrangian,
        gap,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct Condition3Violation {
    /// Index into the supplied family.
    pub index: usize,
    /// `t(K_k^k, F)`.
    pub member_density: BigRational,
    /// A copy of the member inside `g`.
    pub embedding: Vec<usize>,
}

/// Family members `F` with `t(K_k^k, F) > ρ(g)` that nevertheless occur as
/// subgraphs of `g`. Each one is a finite witness that a sequence through `g`
/// does not avoid members denser than itself.
pub fn ct_condition3_check(g: &Hypergraph, family: &[Hypergraph]) -> Vec<Condition3Violation> {
    let rho = edge_density(g);
    family
        .iter()
        .enumerate()
        .filter_map(|(index, f)| {
            if f.k() != g.k() {
                return None;
            }
            let member_density = uniform_point_value(f);
            if member_density <= rho {
                return None;
            }
            find_embedding(f, g).map(|embedding| Condition3Violation {
                index,
                member_density,
                embedding,
            })
        })
        .collect()
}
