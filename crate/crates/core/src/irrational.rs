//! Two-part recursive patterns with irrational Lagrangians.
//!
//! For `k >= 3` pick a prime `ℓ < k` not dividing `k` and take
//! `P = (2, {<1^{k-ℓ}, 2^ℓ>}, {1})`. Eliminating `Λ_P` from the optimality
//! identity gives `Λ_P = C(k, ℓ) · max_{x∈(0,1)} r(x)` with
//! `r(x) = (1-x)^ℓ x^{k-ℓ} / (1 - x^k)`, and the maximizer is the unique root
//! in `(0, 1)` of `g(x) = ℓ(x^{k-1} + … + x + 1) − k`.
//!
//! Irrationality itself is a number-theoretic fact (irreducibility of `g`)
//! and is not something floating point can check. What is checked here are
//! the two numeric identities it rests on: the root of `g` maximizes `r`, and
//! `C(k, ℓ) r(root)` agrees with the optimizer's `Λ_P`.

use serde::Serialize;

use crate::construction::binomial;
use crate::error::{Error, Result};
use crate::lagrangian::{maximize_lagrangian, LagrangianConfig};
use crate::pattern::{Pattern, Profile};

pub const SUPPORTED_K: std::ops::RangeInclusive<usize> = 3..=12;

fn is_prime(n: usize) -> bool {
    n >= 2
        && (2..)
            .take_while(|d| d * d <= n)
            .all(|d| !n.is_multiple_of(d))
}

/// `2` for odd `k`, otherwise the smallest prime in `(k/2, k)`.
pub fn choose_ell(k: usize) -> Result<usize> {
    if k < 3 {
        return Err(Error::InvalidArgument(format!("k={k} must be at least 3")));
    }
    if k % 2 == 1 {
        return Ok(2);
    }
    let ell = (k / 2 + 1..k)
        .find(|&q| is_prime(q))
        .expect("Bertrand's postulate gives a prime in (k/2, k)");
    Ok(ell)
}

fn check_pair(k: usize, ell: usize) -> Result<()> {
    let ok =
        k >= 3 && is_prime(ell) && ell < k && !k.is_multiple_of(ell) && (k % 2 == 1 || 2 * ell > k);
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "(k, ℓ) = ({k}, {ell}) is not an admissible pair"
        )))
    }
}

/// `(2, {<1^{k-ℓ}, 2^ℓ>}, {1})` with `ℓ = choose_ell(k)`.
pub fn irrational_pattern(k: usize) -> Result<Pattern> {
    let ell = choose_ell(k)?;
    Pattern::new(k, 2, vec![Profile::new(vec![k - ell, ell])], vec![0])
}

/// `g(x) = ℓ(x^{k-1} + … + 1) − k`.
pub fn root_polynomial(k: usize, ell: usize, x: f64) -> f64 {
    let mut acc = 0.0;
    for _ in 0..k {
        acc = acc * x + 1.0;
    }
    ell as f64 * acc - k as f64
}

fn root_polynomial_derivative(k: usize, ell: usize, x: f64) -> f64 {
    // d/dx Σ_{j<k} x^j = Σ_{1<=j<k} j x^{j-1}
    let mut acc = 0.0;
    for j in (1..k).rev() {
        acc = acc * x + j as f64;
    }
    ell as f64 * acc
}

/// `r(x) = (1-x)^ℓ x^{k-ℓ} / (1 - x^k)`, extended by its limits `0` at the
/// endpoints.
pub fn r(k: usize, ell: usize, x: f64) -> f64 {
    if x <= 0.0 || x >= 1.0 {
        return 0.0;
    }
    (1.0 - x).powi(ell as i32) * x.powi((k - ell) as i32) / (1.0 - x.powi(k as i32))
}

/// The unique root of `g` in `(0, 1)`: bisection to `1e-12`, then three
/// Newton steps.
pub fn solve_g_root(k: usize, ell: usize) -> Result<f64> {
    check_pair(k, ell)?;
    // g(0) = ℓ - k < 0 and g(1) = kℓ - k > 0; g increases on (0, 1).
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if root_polynomial(k, ell, mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut x = 0.5 * (lo + hi);
    for _ in 0..3 {
        let d = root_polynomial_derivative(k, ell, x);
        if d != 0.0 {
            x -= root_polynomial(k, ell, x) / d;
        }
    }
    Ok(x)
}

#[derive(Debug, Clone, Serialize)]
pub struct IrrationalCertificate {
    pub k: usize,
    pub ell: usize,
    pub pattern: Pattern,
    pub root: f64,
    pub lambda_closed_form: f64,
    pub lambda_numeric: f64,
    pub poly_residual: f64,
    pub stationarity_residual: f64,
    /// First coordinate of the optimizer's maximizer.
    pub numeric_root: f64,
    pub tol: f64,
    pub passed: bool,
}

/// Compares `C(k, ℓ) r(root)` with the optimizer's value on
/// `irrational_pattern(k)`. The certificate passes when the two agree within
/// `tol` and the optimizer's stationarity residual is below `tol`.
pub fn verify_irrational_certificate(
    k: usize,
    tol: f64,
    cfg: &LagrangianConfig,
) -> Result<IrrationalCertificate> {
    if !SUPPORTED_K.contains(&k) {
        return Err(Error::InvalidArgument(format!(
            "k={k} outside the supported range {}..={}",
            SUPPORTED_K.start(),
            SUPPORTED_K.end()
        )));
    }
    let ell = choose_ell(k)?;
    let pattern = irrational_pattern(k)?;
    let root = solve_g_root(k, ell)?;
    let scale = binomial(k, ell)
        .to_string()
        .parse::<f64>()
        .expect("small binomial");
    let lambda_closed_form = scale * r(k, ell, root);
    let numeric = maximize_lagrangian(&pattern, cfg)?;
    let poly_residual = root_polynomial(k, ell, root).abs();
    let passed = (lambda_closed_form - numeric.value).abs() <= tol
        && numeric.stationarity_residual <= tol
        && root > 0.0
        && root < 1.0;
    Ok(IrrationalCertificate {
        k,
        ell,
        numeric_root: numeric.maximizer.as_slice()[0],
        pattern,
        root,
        lambda_closed_form,
        lambda_numeric: numeric.value,
        poly_residual,
        stationarity_residual: numeric.stationarity_residual,
        tol,
        passed,
    })
}
