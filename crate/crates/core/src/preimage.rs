//! Fixed-point iteration for the preimage domain.
//!
//! Each slit is replaced by a thin ellipse of aspect ratio `r` in the strip;
//! the `Ψ⁻¹`-images of the ellipses bound the current preimage `G^k`. The map
//! of `G^k` onto a strip with slits of the prescribed angles is computed, the
//! centers and lengths of its slits are compared with the targets, and the
//! ellipse centers and axes are shifted by the discrepancies.

use std::time::Instant;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{build_preimage_boundary, check_ellipses, EllipseParams, StripSlitDomain};
use crate::gmres::GmresOptions;
use crate::map::{build_map_from, default_alpha, extract_slit_images_with, MapData, SlitExtraction};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationConfig {
    /// Nodes per boundary component (power of two).
    pub n: usize,
    /// Ellipse aspect ratio in (0, 1].
    pub r: f64,
    /// Stop once `E_k < eps`.
    pub eps: f64,
    pub max_iter: usize,
    pub solver: GmresOptions,
    /// Start each Krylov solve from the previous density.
    pub warm_start: bool,
    pub extraction: SlitExtraction,
}

impl Default for IterationConfig {
    fn default() -> Self {
        Self { n: 1024, r: 0.2, eps: 1e-14, max_iter: 100, solver: GmresOptions::default(), warm_start: true, extraction: SlitExtraction::Parabola }
    }
}

impl IterationConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.r > 0.0 && self.r <= 1.0) {
            return Err(Error::Domain(format!("r = {} not in (0, 1]", self.r)));
        }
        if !(self.eps > 0.0) {
            return Err(Error::Domain(format!("eps = {} must be positive", self.eps)));
        }
        if self.n < 8 || !self.n.is_power_of_two() {
            return Err(Error::Domain(format!("n = {} must be a power of two ≥ 8", self.n)));
        }
        if self.max_iter == 0 {
            return Err(Error::Domain("max_iter must be at least 1".into()));
        }
        Ok(())
    }
}

/// One outer iteration, as emitted in the JSON-lines log.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IterationRecord {
    pub k: usize,
    #[serde(rename = "E_k")]
    pub error: f64,
    pub gmres_iters: usize,
    pub elapsed_ms: u64,
}

#[derive(Debug, Clone)]
pub struct PreimageResult {
    /// Ellipses whose `Ψ⁻¹`-images bound the preimage of `map`.
    pub params: Vec<EllipseParams>,
    pub map: MapData,
    pub error_history: Vec<f64>,
    pub gmres_history: Vec<usize>,
    pub converged: bool,
    /// Set when an update produced an invalid geometry and the iteration stopped early.
    pub aborted: Option<String>,
}

impl PreimageResult {
    pub fn iterations(&self) -> usize {
        self.error_history.len()
    }
}

/// Thin ellipses on the slits: `z_j = c_j`, `a_j = (1 − r/2)·ℓ_j`.
pub fn initialize(omega: &StripSlitDomain, cfg: &IterationConfig) -> Result<Vec<EllipseParams>> {
    cfg.validate()?;
    let params: Vec<EllipseParams> = omega
        .slits()
        .iter()
        .map(|s| EllipseParams { center: s.center, major: (1.0 - 0.5 * cfg.r) * s.length, theta: s.theta, r: cfg.r })
        .collect();
    check_ellipses(&params)?;
    Ok(params)
}

pub fn iterate(omega: &StripSlitDomain, cfg: &IterationConfig) -> Result<PreimageResult> {
    iterate_observed(omega, cfg, None, |_| {})
}

/// Runs the iteration from `start` (or the standard initialization), calling
/// `observe` after every outer step.
pub fn iterate_observed<F>(
    omega: &StripSlitDomain,
    cfg: &IterationConfig,
    start: Option<Vec<EllipseParams>>,
    mut observe: F,
) -> Result<PreimageResult>
where
    F: FnMut(&IterationRecord),
{
    cfg.validate()?;
    let mut params = match start {
        Some(p) => {
            if p.len() != omega.len() {
                return Err(Error::Geometry(format!("{} start ellipses for {} slits", p.len(), omega.len())));
            }
            check_ellipses(&p)?;
            p
        }
        None => initialize(omega, cfg)?,
    };
    let mut theta = vec![0.0];
    theta.extend(omega.thetas());
    let m = omega.len() as f64;
    let shrink = 1.0 - 0.5 * cfg.r;

    let clock = Instant::now();
    let mut errors = Vec::new();
    let mut gmres_counts = Vec::new();
    let mut last: Option<(Vec<EllipseParams>, MapData)> = None;

    for k in 1..=cfg.max_iter {
        let step = (|| -> Result<MapData> {
            let bp = build_preimage_boundary(&params, cfg.n)?;
            let alpha = default_alpha(&bp)?;
            let warm = if cfg.warm_start { last.as_ref().map(|(_, md)| md.solution.rho.as_slice()) } else { None };
            build_map_from(bp, &theta, alpha, cfg.solver, warm)
        })();
        let map = match step {
            Ok(map) => map,
            Err(e @ Error::Overlap(_)) if last.is_some() => {
                let (params, map) = last.expect("checked");
                return Ok(PreimageResult {
                    params,
                    map,
                    error_history: errors,
                    gmres_history: gmres_counts,
                    converged: false,
                    aborted: Some(format!("iteration {k}: {e}")),
                });
            }
            Err(e) => return Err(e),
        };
        let images = extract_slit_images_with(&map, cfg.extraction)?;
        let mut err = 0.0;
        let mut next = params.clone();
        for ((p, img), slit) in next.iter_mut().zip(&images).zip(omega.slits()) {
            let dc = img.center - slit.center;
            let dl = img.length - slit.length;
            err += dc.norm() + dl.abs();
            p.center -= dc;
            p.major -= shrink * dl;
        }
        err /= 2.0 * m;
        errors.push(err);
        gmres_counts.push(map.solution.stats.iterations);
        observe(&IterationRecord {
            k,
            error: err,
            gmres_iters: map.solution.stats.iterations,
            elapsed_ms: clock.elapsed().as_millis() as u64,
        });
        let converged = err < cfg.eps;
        if converged || k == cfg.max_iter {
            return Ok(PreimageResult {
                params,
                map,
                error_history: errors,
                gmres_history: gmres_counts,
                converged,
                aborted: None,
            });
        }
        last = Some((std::mem::replace(&mut params, next), map));
    }
    unreachable!("loop returns on its last iteration")
}
