//! Uniform flow through the strip past the slits.
//!
//! A second map `Υ` from the same preimage `G` onto a strip with horizontal
//! slits gives the complex potential `W = Υ ∘ Φ⁻¹`. Walls and slits are
//! streamlines and the circulation around every slit is zero.

use std::f64::consts::FRAC_PI_2;
use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::BoundaryParametrization;
use crate::map::{build_map, MapData};
use crate::preimage::{IterationConfig, PreimageResult};

/// Default distance from `∂Ω` inside which grid points are masked.
pub const DEFAULT_EXCLUSION: f64 = 0.02;

/// `Υ`: the map of the preimage onto the strip with horizontal slits, same normalization as `Φ`.
pub fn horizontal_slit_map(pre: &PreimageResult, cfg: &IterationConfig) -> Result<MapData> {
    let md = &pre.map;
    build_map(&md.bp, &vec![0.0; md.m() + 1], md.alpha, cfg.solver)
}

/// Both maps needed to evaluate the potential.
#[derive(Debug, Clone)]
pub struct Flow {
    pub phi: MapData,
    pub upsilon: MapData,
}

impl Flow {
    pub fn new(pre: &PreimageResult, cfg: &IterationConfig) -> Result<Self> {
        Ok(Self { phi: pre.map.clone(), upsilon: horizontal_slit_map(pre, cfg)? })
    }

    /// The bare strip: both maps are `Ψ` and `W(z) = z`.
    pub fn without_slits(n: usize, cfg: &IterationConfig) -> Result<Self> {
        let bp = BoundaryParametrization::unit_circle(n)?;
        let md = build_map(&bp, &[0.0], Complex64::new(0.0, 0.0), cfg.solver)?;
        Ok(Self { phi: md.clone(), upsilon: md })
    }

    /// `W(z)` for points of `Ω`.
    pub fn potential(&self, z: &[Complex64]) -> Result<Vec<Complex64>> {
        let w = self.phi.inverse(z)?;
        self.upsilon.eval(&w)
    }

    /// Stream value on each slit: the height of the corresponding slit of `Υ`.
    pub fn slit_levels(&self) -> Vec<f64> {
        (1..=self.upsilon.m())
            .map(|j| {
                let z = &self.upsilon.zeta[self.upsilon.bp.range(j)];
                z.iter().map(|z| z.im).sum::<f64>() / z.len() as f64
            })
            .collect()
    }

    /// Largest `max − min` of `Im Υ` over any inner boundary component.
    pub fn slit_level_spread(&self) -> f64 {
        (1..=self.upsilon.m())
            .map(|j| {
                let im = self.upsilon.zeta[self.upsilon.bp.range(j)].iter().map(|z| z.im);
                let (lo, hi) = im.fold((f64::MAX, f64::MIN), |(lo, hi), v| (lo.min(v), hi.max(v)));
                hi - lo
            })
            .fold(0.0, f64::max)
    }

    /// Largest deviation of `|Im Υ|` from `π/2` on the unit circle, skipping the two nodes at `±1`.
    pub fn wall_deviation(&self) -> f64 {
        let n = self.upsilon.n();
        (0..n)
            .filter(|&i| i != 0 && i != n / 2)
            .map(|i| (self.upsilon.zeta[i].im.abs() - FRAC_PI_2).abs())
            .fold(0.0, f64::max)
    }
}

/// A rectangular grid, endpoints included.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub nx: usize,
    pub ny: usize,
}

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        let finite = [self.x_min, self.x_max, self.y_min, self.y_max].iter().all(|v| v.is_finite());
        if !finite || self.x_min >= self.x_max || self.y_min >= self.y_max {
            return Err(Error::Domain(format!("bad grid ranges {self:?}")));
        }
        if self.nx < 2 || self.ny < 2 {
            return Err(Error::Domain("grid needs at least 2 points per direction".into()));
        }
        if self.y_min < -FRAC_PI_2 || self.y_max > FRAC_PI_2 {
            return Err(Error::Domain("grid leaves the strip |Im z| ≤ π/2".into()));
        }
        Ok(())
    }

    /// Point `(ix, iy)`.
    pub fn point(&self, ix: usize, iy: usize) -> Complex64 {
        let x = self.x_min + (self.x_max - self.x_min) * ix as f64 / (self.nx - 1) as f64;
        let y = self.y_min + (self.y_max - self.y_min) * iy as f64 / (self.ny - 1) as f64;
        Complex64::new(x, y)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowField {
    pub grid: GridSpec,
    pub exclusion: f64,
    /// `Im W`, row-major in `y` then `x`; `None` where masked.
    pub psi: Vec<Option<f64>>,
    /// `true` where `psi` is undefined.
    pub mask: Vec<bool>,
    pub slit_levels: Vec<f64>,
    /// Points masked because the evaluation failed, not because of the geometry.
    pub failed: usize,
}

impl FlowField {
    pub fn get(&self, ix: usize, iy: usize) -> Option<f64> {
        self.psi[iy * self.grid.nx + ix]
    }

    pub fn masked(&self) -> usize {
        self.mask.iter().filter(|&&m| m).count()
    }

    /// CSV `x,y,psi`, empty `psi` for masked points.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "x,y,psi")?;
        for iy in 0..self.grid.ny {
            for ix in 0..self.grid.nx {
                let z = self.grid.point(ix, iy);
                match self.get(ix, iy) {
                    Some(p) => writeln!(w, "{},{},{}", z.re, z.im, p)?,
                    None => writeln!(w, "{},{},", z.re, z.im)?,
                }
            }
        }
        Ok(())
    }
}

/// Samples `Im W` on a grid, masking points within `exclusion` of the walls or slits.
pub fn stream_grid(flow: &Flow, grid: &GridSpec, exclusion: f64) -> Result<FlowField> {
    grid.validate()?;
    if !(exclusion >= 0.0) {
        return Err(Error::Domain(format!("exclusion {exclusion} must be non-negative")));
    }
    let slits = &flow.phi;
    let mut psi = Vec::with_capacity(grid.nx * grid.ny);
    let mut failed = 0;
    for iy in 0..grid.ny {
        for ix in 0..grid.nx {
            let z = grid.point(ix, iy);
            if FRAC_PI_2 - z.im.abs() <= exclusion.max(0.0) || slits.distance_to_slits(z) <= exclusion {
                psi.push(None);
                continue;
            }
            match flow.potential(&[z]) {
                Ok(w) if w[0].im.is_finite() => psi.push(Some(w[0].im)),
                _ => {
                    failed += 1;
                    psi.push(None);
                }
            }
        }
    }
    let mask = psi.iter().map(Option::is_none).collect();
    Ok(FlowField { grid: *grid, exclusion, psi, mask, slit_levels: flow.slit_levels(), failed })
}
