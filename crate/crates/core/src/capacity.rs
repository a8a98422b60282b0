//! Capacity of (generalized) condensers `(S, E, δ)` whose plates are slits.
//!
//! Step 1 finds a preimage domain `G` with the preimage iteration. Step 2
//! solves, for each plate `k`, the integral equation with
//! `γ_k = log|η − α_k|` (`α_k` inside hole `k`), collects the constants
//! `h_{j,k}`, and solves the small system for the charges `a_k`; then
//! `cap = 2π Σ δ_k a_k`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::bie;
use crate::error::{Error, Result};
use crate::geometry::{psi_inv, StripSlitDomain};
use crate::gmres::GmresOptions;
use crate::kernel::KernelSet;
use crate::linalg::{solve_dense, DenseMatrix};
use crate::preimage::{iterate, IterationConfig, PreimageResult};

#[derive(Debug, Clone, PartialEq)]
pub struct CondenserSpec {
    pub domain: StripSlitDomain,
    /// Potential level of each plate.
    pub delta: Vec<f64>,
}

impl CondenserSpec {
    pub fn new(domain: StripSlitDomain, delta: Vec<f64>) -> Result<Self> {
        if delta.len() != domain.len() {
            return Err(Error::Geometry(format!("{} levels for {} plates", delta.len(), domain.len())));
        }
        if delta.iter().any(|d| !d.is_finite()) {
            return Err(Error::Domain("potential levels must be finite".into()));
        }
        Ok(Self { domain, delta })
    }

    /// Classical condenser: every plate at level 1.
    pub fn classical(domain: StripSlitDomain) -> Self {
        let m = domain.len();
        Self { domain, delta: vec![1.0; m] }
    }
}

#[derive(Debug, Clone)]
pub struct CapacityResult {
    pub cap: f64,
    /// Charges `a_1, …, a_m`.
    pub a: Vec<f64>,
    /// The additive constant of the potential; not needed for `cap`.
    pub c: f64,
    /// `h_{j,k}`, row `j` = boundary component, column `k` = plate.
    pub h: Vec<Vec<f64>>,
    pub preimage: PreimageResult,
    pub n: usize,
    pub r: f64,
}

/// Charges and constant of the potential on a computed preimage domain.
///
/// The charges do not depend on the levels `δ`; they only weight the sum for
/// the capacity. Returns `(a, c, h)`.
pub fn charges(pre: &PreimageResult, opts: GmresOptions) -> Result<(Vec<f64>, f64, Vec<Vec<f64>>)> {
    let md = &pre.map;
    let bp = &md.bp;
    let m = bp.m;
    // a constant angle cancels in A(s)/A(t), so θ ≡ 0 gives the kernel of the Dirichlet problem
    let ks = KernelSet::new(bp, &vec![0.0; m + 1], md.alpha)?;
    let mut h = vec![vec![0.0; m]; m + 1];
    for (k, p) in pre.params.iter().enumerate() {
        let alpha_k: Complex64 = psi_inv(p.center);
        let gamma: Vec<f64> = bp.eta.iter().map(|&e| (e - alpha_k).norm().ln()).collect();
        let sol = bie::solve(&ks, bp.n, gamma, None, opts)?;
        for j in 0..=m {
            h[j][k] = sol.h[j];
        }
    }
    let mut sys = DenseMatrix::zeros(m + 1, m + 1);
    for j in 0..=m {
        for k in 0..m {
            sys.set(j, k, h[j][k]);
        }
        sys.set(j, m, 1.0);
    }
    let mut rhs = vec![1.0; m + 1];
    rhs[0] = 0.0;
    let sol = solve_dense(&sys, &rhs)?;
    Ok((sol[..m].to_vec(), sol[m], h))
}

/// Capacity of the condenser: preimage iteration followed by the charge system.
pub fn capacity(spec: &CondenserSpec, cfg: &IterationConfig) -> Result<CapacityResult> {
    let pre = iterate(&spec.domain, cfg)?;
    capacity_on(pre, &spec.delta, cfg)
}

/// Step 2 alone, on an already computed preimage.
pub fn capacity_on(pre: PreimageResult, delta: &[f64], cfg: &IterationConfig) -> Result<CapacityResult> {
    if delta.len() != pre.params.len() {
        return Err(Error::Geometry(format!("{} levels for {} plates", delta.len(), pre.params.len())));
    }
    let (a, c, h) = charges(&pre, cfg.solver)?;
    let cap = 2.0 * PI * delta.iter().zip(&a).map(|(d, a)| d * a).sum::<f64>();
    Ok(CapacityResult { cap, a, c, h, preimage: pre, n: cfg.n, r: cfg.r })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elliptic::{exact_cap_horizontal, exact_cap_vertical};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn cfg(n: usize) -> IterationConfig {
        IterationConfig { n, ..Default::default() }
    }

    fn single(a: Complex64, b: Complex64, n: usize) -> f64 {
        let spec = CondenserSpec::classical(StripSlitDomain::from_endpoints(&[(a, b)]).unwrap());
        capacity(&spec, &cfg(n)).unwrap().cap
    }

    #[test]
    fn single_slits_match_the_exact_values() {
        let v = exact_cap_vertical(0.5).unwrap();
        assert!((single(c(0.0, -0.5), c(0.0, 0.5), 256) - v).abs() / v < 1e-10);
        let h = exact_cap_horizontal(0.5).unwrap();
        assert!((single(c(-0.5, 0.0), c(0.5, 0.0), 256) - h).abs() / h < 1e-10);
    }

    #[test]
    fn translation_along_the_strip_changes_nothing() {
        let base = single(c(-0.3, -0.2), c(0.4, 0.6), 1024);
        let moved = single(c(2.7, -0.2), c(3.4, 0.6), 1024);
        assert!((base - moved).abs() / base < 1e-9, "{base} {moved}");
    }

    #[test]
    fn levels_enter_linearly() {
        let dom = StripSlitDomain::from_endpoints(&[(c(-1.0, -0.5), c(-1.0, 0.5)), (c(1.0, 0.0), c(2.0, 0.5))]).unwrap();
        let pre = iterate(&dom, &cfg(256)).unwrap();
        let one = capacity_on(pre.clone(), &[1.0, 1.0], &cfg(256)).unwrap();
        let two = capacity_on(pre.clone(), &[2.0, 2.0], &cfg(256)).unwrap();
        let mixed = capacity_on(pre, &[1.0, 3.0], &cfg(256)).unwrap();
        assert!((two.cap - 2.0 * one.cap).abs() < 1e-12 * one.cap);
        assert_eq!(one.a, mixed.a);
        let expected = 2.0 * PI * (mixed.a[0] + 3.0 * mixed.a[1]);
        assert_eq!(mixed.cap, expected);
        assert!(one.a.iter().all(|&a| a > 0.0));
    }

    #[test]
    fn level_count_must_match() {
        let dom = StripSlitDomain::from_endpoints(&[(c(0.0, -0.5), c(0.0, 0.5))]).unwrap();
        assert!(CondenserSpec::new(dom, vec![1.0, 2.0]).is_err());
    }
}
