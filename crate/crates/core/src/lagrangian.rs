//! Numerical pattern Lagrangians.
//!
//! For a pattern `P = (m, E, R)` the Lagrange polynomial is
//! `λ_E(x) = k! Σ_{D∈E} Π_i x_i^{D(i)} / D(i)!`. Optimal vectors satisfy
//! `Λ_P = λ_E(x) + Λ_P Σ_{i∈R} x_i^k`, so `Λ_P` is the supremum over the
//! simplex (minus its vertices) of the eliminated form
//! `g(x) = λ_E(x) / (1 − Σ_{i∈R} x_i^k)`. Every evaluation of `g` is a lower
//! bound for `Λ_P`; `p_n / C(n, k)` is an upper bound for every `n`.

use num_rational::BigRational;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::construction::{binomial, composition_count, PnTable};
use crate::error::{Error, Result};
use crate::pattern::Pattern;

/// Smallest admissible value of `1 − Σ_{i∈R} x_i^k`.
pub const DENOMINATOR_FLOOR: f64 = 1e-9;
/// Candidates with a coordinate above `1 − BASIS_EXCLUSION` count as basis vectors.
pub const BASIS_EXCLUSION: f64 = 1e-6;
/// Maximizers closer than this in the sup norm are merged.
pub const MAXIMIZER_DEDUP: f64 = 1e-5;
const SUM_TOLERANCE: f64 = 1e-12;
const ARMIJO: f64 = 1e-4;
/// Largest simplex grid (number of points) evaluated for seeding.
const GRID_POINT_CAP: usize = 200_000;
/// Largest number of size vectors the upper-bound DP may visit.
const UPPER_DP_BUDGET: usize = 50_000;

/// A point of the standard simplex.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct SimplexVector(Vec<f64>);

impl SimplexVector {
    pub fn new(x: Vec<f64>) -> Result<Self> {
        if x.iter().any(|&v| !v.is_finite() || v < 0.0) {
            return Err(Error::InvalidArgument(format!(
                "simplex coordinates must be finite and non-negative: {x:?}"
            )));
        }
        let s: f64 = x.iter().sum();
        if !x.is_empty() && (s - 1.0).abs() > SUM_TOLERANCE {
            return Err(Error::InvalidArgument(format!(
                "simplex coordinates sum to {s}, not 1"
            )));
        }
        Ok(SimplexVector(x))
    }

    pub fn uniform(m: usize) -> Self {
        SimplexVector(vec![1.0 / m as f64; m])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn max_coordinate(&self) -> f64 {
        self.0.iter().copied().fold(0.0, f64::max)
    }

    pub fn min_coordinate(&self) -> f64 {
        self.0.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Coordinates moved so that part `i` becomes part `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> SimplexVector {
        let mut y = vec![0.0; self.0.len()];
        for (i, &v) in self.0.iter().enumerate() {
            y[perm[i]] = v;
        }
        SimplexVector(y)
    }
}

/// `λ_E` compiled into monomials, together with the recursive parts.
#[derive(Debug, Clone)]
pub(crate) struct LagrangePolynomial {
    k: usize,
    m: usize,
    terms: Vec<(f64, Vec<(usize, i32)>)>,
    recursive: Vec<usize>,
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

impl LagrangePolynomial {
    pub(crate) fn new(p: &Pattern) -> Self {
        let kf = factorial(p.k());
        let terms = p
            .profiles()
            .iter()
            .map(|d| {
                let denom: f64 = d.mult().iter().map(|&e| factorial(e)).product();
                let vars = d
                    .mult()
                    .iter()
                    .enumerate()
                    .filter(|(_, &e)| e > 0)
                    .map(|(i, &e)| (i, e as i32))
                    .collect();
                (kf / denom, vars)
            })
            .collect();
        LagrangePolynomial {
            k: p.k(),
            m: p.m(),
            terms,
            recursive: p.recursive().to_vec(),
        }
    }

    pub(crate) fn lambda(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(c, vars)| c * vars.iter().map(|&(i, e)| x[i].powi(e)).product::<f64>())
            .sum()
    }

    pub(crate) fn grad_lambda(&self, x: &[f64]) -> Vec<f64> {
        let mut g = vec![0.0; self.m];
        for (c, vars) in &self.terms {
            for (a, &(j, ej)) in vars.iter().enumerate() {
                let mut t = c * ej as f64 * x[j].powi(ej - 1);
                for (b, &(i, ei)) in vars.iter().enumerate() {
                    if a != b {
                        t *= x[i].powi(ei);
                    }
                }
                g[j] += t;
            }
        }
        g
    }

    /// `1 − Σ_{i∈R} x_i^k`.
    pub(crate) fn denominator(&self, x: &[f64]) -> f64 {
        1.0 - self
            .recursive
            .iter()
            .map(|&i| x[i].powi(self.k as i32))
            .sum::<f64>()
    }

    /// `g`, or `None` below the denominator floor.
    pub(crate) fn g(&self, x: &[f64]) -> Option<f64> {
        let d = self.denominator(x);
        (d >= DENOMINATOR_FLOOR).then(|| self.lambda(x) / d)
    }

    fn grad_g(&self, x: &[f64]) -> Vec<f64> {
        let d = self.denominator(x);
        let l = self.lambda(x);
        let mut g = self.grad_lambda(x);
        for v in &mut g {
            *v /= d;
        }
        let k = self.k as f64;
        for &i in &self.recursive {
            // ∂/∂x_i of 1/d is k x_i^{k-1} / d^2
            g[i] += l * k * x[i].powi(self.k as i32 - 1) / (d * d);
        }
        g
    }

    /// `∂f/∂x_j` for `f = λ_E + value · Σ_{i∈R} x_i^k`.
    pub(crate) fn grad_f(&self, x: &[f64], value: f64) -> Vec<f64> {
        let mut g = self.grad_lambda(x);
        let k = self.k as f64;
        for &i in &self.recursive {
            g[i] += value * k * x[i].powi(self.k as i32 - 1);
        }
        g
    }
}

fn check_dim(p: &Pattern, x: &SimplexVector) -> Result<()> {
    if x.len() != p.m() {
        Err(Error::DimensionMismatch {
            expected: p.m(),
            got: x.len(),
        })
    } else {
        Ok(())
    }
}

/// `λ_E(x)`.
pub fn eval_lambda(p: &Pattern, x: &SimplexVector) -> Result<f64> {
    check_dim(p, x)?;
    Ok(LagrangePolynomial::new(p).lambda(x.as_slice()))
}

/// `∇λ_E(x)`, differentiated monomial by monomial.
pub fn grad_lambda(p: &Pattern, x: &SimplexVector) -> Result<Vec<f64>> {
    check_dim(p, x)?;
    Ok(LagrangePolynomial::new(p).grad_lambda(x.as_slice()))
}

/// `g(x) = λ_E(x) / (1 − Σ_{i∈R} x_i^k)`, a lower bound for `Λ_P`.
pub fn eval_g(p: &Pattern, x: &SimplexVector) -> Result<f64> {
    check_dim(p, x)?;
    let poly = LagrangePolynomial::new(p);
    let d = poly.denominator(x.as_slice());
    if d < DENOMINATOR_FLOOR {
        return Err(Error::DegenerateRecursiveMass { denominator: d });
    }
    Ok(poly.lambda(x.as_slice()) / d)
}

/// Euclidean projection onto the simplex.
pub(crate) fn project_to_simplex(v: &[f64]) -> Vec<f64> {
    let mut u = v.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (j, &uj) in u.iter().enumerate() {
        cumsum += uj;
        let t = (cumsum - 1.0) / (j + 1) as f64;
        if uj - t > 0.0 {
            theta = t;
        }
    }
    let mut x: Vec<f64> = v.iter().map(|&vi| (vi - theta).max(0.0)).collect();
    let s: f64 = x.iter().sum();
    for xi in &mut x {
        *xi /= s;
    }
    x
}

#[derive(Debug, Clone, Serialize)]
pub struct LagrangianConfig {
    /// Random Dirichlet(1,…,1) seeds.
    pub starts: usize,
    /// Subdivisions per coordinate of the seeding grid.
    pub grid_resolution: usize,
    /// Best grid points used as ascent seeds.
    pub grid_seeds: usize,
    /// Step-size tolerance of the ascent.
    pub tol: f64,
    pub max_iterations: usize,
    /// Largest `n` for the `p_n / C(n,k)` upper bound.
    pub dp_n_for_upper: usize,
    pub seed: u64,
}

impl Default for LagrangianConfig {
    fn default() -> Self {
        LagrangianConfig {
            starts: 50,
            grid_resolution: 20,
            grid_seeds: 32,
            tol: 1e-9,
            max_iterations: 10_000,
            dp_n_for_upper: 30,
            seed: 0x5eed,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Certificate {
    /// Best value found by multi-start ascent.
    Numeric,
    /// `Λ_P = 1` decided from the profiles alone.
    Syntactic,
    /// A pattern with at most one part, settled without search.
    Trivial,
}

#[derive(Debug, Clone, Serialize)]
pub struct LagrangianResult {
    pub value: f64,
    pub maximizer: SimplexVector,
    /// Distinct near-optimal points found, lexicographically sorted.
    pub maximizers: Vec<SimplexVector>,
    pub stationarity_residual: f64,
    pub lower_bound: f64,
    pub upper_bound: f64,
    /// `p_n / C(n,k)` behind `upper_bound`; `None` when the bound is trivial.
    pub upper_bound_exact: Option<BigRational>,
    pub upper_n: Option<usize>,
    pub starts_used: usize,
    pub converged: bool,
    pub certificate: Certificate,
}

#[derive(Debug, Clone)]
struct Ascent {
    x: Vec<f64>,
    g: f64,
    converged: bool,
}

fn ascend(poly: &LagrangePolynomial, seed: Vec<f64>, cfg: &LagrangianConfig) -> Option<Ascent> {
    let mut x = seed;
    let mut gx = poly.g(&x)?;
    let mut step = 1.0;
    for _ in 0..cfg.max_iterations {
        let grad = poly.grad_g(&x);
        let mut accepted = None;
        while step > 1e-18 {
            let trial: Vec<f64> = x.iter().zip(&grad).map(|(a, b)| a + step * b).collect();
            let y = project_to_simplex(&trial);
            // Vertices are never maximizers; stay strictly away from them so
            // that sup-at-a-vertex patterns still end at an admissible point.
            let inside = y.iter().all(|&v| v <= 1.0 - BASIS_EXCLUSION);
            if let Some(gy) = poly.g(&y).filter(|_| inside) {
                let ascent: f64 = grad
                    .iter()
                    .zip(y.iter().zip(&x))
                    .map(|(d, (a, b))| d * (a - b))
                    .sum();
                if gy >= gx + ARMIJO * ascent {
                    accepted = Some((y, gy));
                    break;
                }
            }
            step *= 0.5;
        }
        let Some((y, gy)) = accepted else {
            return Some(Ascent {
                x,
                g: gx,
                converged: true,
            });
        };
        let moved = x
            .iter()
            .zip(&y)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        x = y;
        gx = gy;
        if moved < cfg.tol {
            return Some(Ascent {
                x,
                g: gx,
                converged: true,
            });
        }
        step = (step * 2.0).min(1e6);
    }
    Some(Ascent {
        x,
        g: gx,
        converged: false,
    })
}

/// All points of the simplex with coordinates in `{0, 1/res, …, 1}`.
fn simplex_grid(m: usize, res: usize) -> Vec<Vec<f64>> {
    let mut out = Vec::new();
    let mut counts = vec![0usize; m];
    fn rec(pos: usize, left: usize, res: usize, counts: &mut [usize], out: &mut Vec<Vec<f64>>) {
        if pos == counts.len() - 1 {
            counts[pos] = left;
            out.push(counts.iter().map(|&c| c as f64 / res as f64).collect());
            return;
        }
        for c in 0..=left {
            counts[pos] = c;
            rec(pos + 1, left - c, res, counts, out);
        }
    }
    rec(0, res, res, &mut counts, &mut out);
    out
}

fn effective_grid_resolution(m: usize, requested: usize) -> usize {
    let mut res = requested.max(1);
    while res > 1 && composition_count(res, m) > GRID_POINT_CAP.into() {
        res -= 1;
    }
    res
}

fn dirichlet(rng: &mut ChaCha8Rng, m: usize) -> Vec<f64> {
    let mut v: Vec<f64> = (0..m).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
    let s: f64 = v.iter().sum();
    for x in &mut v {
        *x /= s;
    }
    v
}

fn lex_cmp(a: &[f64], b: &[f64]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            std::cmp::Ordering::Equal => continue,
            o => return o,
        }
    }
    std::cmp::Ordering::Equal
}

/// `p_n / C(n,k)` for the largest `n <= n_max` whose DP stays in budget.
fn upper_bound(p: &Pattern, n_max: usize) -> Option<(usize, BigRational)> {
    let k = p.k();
    let mut n = n_max;
    while n >= k && composition_count(n, p.m() + 1) > UPPER_DP_BUDGET.into() {
        n -= 1;
    }
    if n < k {
        return None;
    }
    let table = PnTable::build(p, n);
    Some((
        n,
        BigRational::new(table.value(n).clone().into(), binomial(n, k).into()),
    ))
}

/// Estimates `Λ_P` by multi-start projected gradient ascent of `g` and
/// brackets it between `g(maximizer)` and `p_n / C(n,k)`.
pub fn maximize_lagrangian(p: &Pattern, cfg: &LagrangianConfig) -> Result<LagrangianResult> {
    let violations = p.validate();
    if !violations.is_empty() {
        return Err(Error::InvalidPattern(violations));
    }
    let m = p.m();
    let poly = LagrangePolynomial::new(p);
    let upper = upper_bound(p, cfg.dp_n_for_upper);
    let (upper_n, upper_exact) = match upper {
        Some((n, r)) => (Some(n), Some(r)),
        None => (None, None),
    };
    let upper_bound = upper_exact.as_ref().and_then(|r| r.to_f64()).unwrap_or(1.0);
    let density_one = p.density_one_check();

    if m <= 1 || p.profiles().is_empty() {
        let maximizer = SimplexVector::uniform(m);
        let value = if density_one { 1.0 } else { 0.0 };
        let stationarity_residual = if m == 0 {
            0.0
        } else {
            stationarity_certificate(p, &maximizer, value)?.max_residual
        };
        return Ok(LagrangianResult {
            value,
            maximizers: vec![maximizer.clone()],
            maximizer,
            stationarity_residual,
            lower_bound: value,
            upper_bound,
            upper_bound_exact: upper_exact,
            upper_n,
            starts_used: 0,
            converged: true,
            certificate: Certificate::Trivial,
        });
    }

    let res = effective_grid_resolution(m, cfg.grid_resolution);
    let mut grid: Vec<(f64, Vec<f64>)> = simplex_grid(m, res)
        .into_iter()
        .filter(|x| x.iter().all(|&v| v < 1.0 - BASIS_EXCLUSION))
        .filter_map(|x| poly.g(&x).map(|g| (g, x)))
        .collect();
    grid.sort_by(|a, b| b.0.total_cmp(&a.0).then_with(|| lex_cmp(&a.1, &b.1)));
    let mut seeds: Vec<Vec<f64>> = grid
        .into_iter()
        .take(cfg.grid_seeds)
        .map(|(_, x)| x)
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    seeds.extend((0..cfg.starts).map(|_| dirichlet(&mut rng, m)));
    seeds.push(vec![1.0 / m as f64; m]);

    let runs: Vec<Ascent> = seeds
        .par_iter()
        .filter_map(|s| ascend(&poly, s.clone(), cfg))
        .filter(|a| a.x.iter().all(|&v| v <= 1.0 - BASIS_EXCLUSION))
        .collect();
    let starts_used = seeds.len();

    let Some(best) = runs.iter().map(|a| a.g).reduce(f64::max) else {
        return Err(Error::InvalidArgument(
            "no interior starting point has an admissible denominator".into(),
        ));
    };
    let near = 1e-9 * best.abs().max(1.0);
    let mut top: Vec<&Ascent> = runs.iter().filter(|a| a.g >= best - near).collect();
    top.sort_by(|a, b| lex_cmp(&a.x, &b.x));
    let mut maximizers: Vec<SimplexVector> = Vec::new();
    for a in &top {
        let close = maximizers.iter().any(|mx| {
            mx.0.iter()
                .zip(&a.x)
                .map(|(u, v)| (u - v).abs())
                .fold(0.0, f64::max)
                < MAXIMIZER_DEDUP
        });
        if !close {
            maximizers.push(SimplexVector(a.x.clone()));
        }
    }
    let lead = top[0];
    let maximizer = maximizers[0].clone();
    let lower_bound = lead.g;
    let converged = top.iter().all(|a| a.converged);

    let (value, certificate) = if density_one {
        (1.0, Certificate::Syntactic)
    } else {
        (best, Certificate::Numeric)
    };
    let stationarity_residual = stationarity_certificate(p, &maximizer, value)?.max_residual;

    Ok(LagrangianResult {
        value,
        maximizer,
        maximizers,
        stationarity_residual,
        lower_bound,
        upper_bound,
        upper_bound_exact: upper_exact,
        upper_n,
        starts_used,
        converged,
        certificate,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct StationarityReport {
    /// `|∂f/∂x_j − k·value|` per coordinate.
    pub residuals: Vec<f64>,
    pub max_residual: f64,
    /// Smallest coordinate of the point; optimal vectors stay away from 0.
    pub min_coordinate: f64,
}

/// First-order check at `x` for `f = λ_E + value · Σ_{i∈R} x_i^k`: at an
/// optimal vector every partial derivative equals `k · Λ_P`.
pub fn stationarity_certificate(
    p: &Pattern,
    x: &SimplexVector,
    value: f64,
) -> Result<StationarityReport> {
    check_dim(p, x)?;
    let poly = LagrangePolynomial::new(p);
    let target = p.k() as f64 * value;
    let residuals: Vec<f64> = poly
        .grad_f(x.as_slice(), value)
        .into_iter()
        .map(|d| (d - target).abs())
        .collect();
    Ok(StationarityReport {
        max_residual: residuals.iter().copied().fold(0.0, f64::max),
        residuals,
        min_coordinate: x.min_coordinate(),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct MinimalityReport {
    pub minimal: bool,
    pub value: f64,
    /// `Λ_P − Λ_{P−i}` for every part `i`.
    pub margins: Vec<f64>,
    /// False if any of the underlying optimizations hit its iteration cap.
    pub converged: bool,
}

/// `P` is minimal when removing any part strictly lowers the Lagrangian;
/// here "strictly" means by more than `tol`.
pub fn is_minimal(p: &Pattern, cfg: &LagrangianConfig, tol: f64) -> Result<MinimalityReport> {
    let full = maximize_lagrangian(p, cfg)?;
    let mut converged = full.converged;
    let mut margins = Vec::with_capacity(p.m());
    for i in 0..p.m() {
        let sub = maximize_lagrangian(&p.remove_index(i)?, cfg)?;
        converged &= sub.converged;
        margins.push(full.value - sub.value);
    }
    Ok(MinimalityReport {
        minimal: margins.iter().all(|&d| d > tol),
        value: full.value,
        margins,
        converged,
    })
}
