//! The JSON problem file shared by the command line tools.
//!
//! ```json
//! {
//!   "slits": [{"a": [0.0, -0.5], "b": [0.0, 0.5]}],
//!   "delta": [1.0],
//!   "numerics": {"n": 1024, "r": 0.2, "eps": 1e-14, "max_iter": 100,
//!                "solver_tol": 1e-14, "solver_maxit": 100},
//!   "study": {"family": "shift", "a": [0, -0.5], "b": [0, 0.5], "direction": [0, 1], "values": [0, 0.25]},
//!   "flow": {"x_min": -4, "x_max": 4, "y_min": -1.5, "y_max": 1.5, "nx": 81, "ny": 31}
//! }
//! ```
//!
//! Everything except `slits` is optional.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flow::{GridSpec, DEFAULT_EXCLUSION};
use crate::geometry::StripSlitDomain;
use crate::gmres::GmresOptions;
use crate::map::SlitExtraction;
use crate::preimage::IterationConfig;
use crate::study::{Family, Point};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SlitEntry {
    pub a: Point,
    pub b: Point,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Numerics {
    pub n: usize,
    pub r: f64,
    pub eps: f64,
    pub max_iter: usize,
    pub solver_tol: f64,
    pub solver_maxit: usize,
    pub extraction: SlitExtraction,
}

impl Default for Numerics {
    fn default() -> Self {
        IterationConfig::default().into()
    }
}

impl From<IterationConfig> for Numerics {
    fn from(c: IterationConfig) -> Self {
        Self {
            n: c.n,
            r: c.r,
            eps: c.eps,
            max_iter: c.max_iter,
            solver_tol: c.solver.tol,
            solver_maxit: c.solver.max_iter,
            extraction: c.extraction,
        }
    }
}

impl Numerics {
    pub fn config(&self) -> IterationConfig {
        IterationConfig {
            n: self.n,
            r: self.r,
            eps: self.eps,
            max_iter: self.max_iter,
            solver: GmresOptions { tol: self.solver_tol, max_iter: self.solver_maxit },
            extraction: self.extraction,
            ..Default::default()
        }
    }
}

fn default_exclusion() -> f64 {
    DEFAULT_EXCLUSION
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlowSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub nx: usize,
    pub ny: usize,
    #[serde(default = "default_exclusion")]
    pub exclusion: f64,
}

impl FlowSpec {
    pub fn grid(&self) -> GridSpec {
        GridSpec { x_min: self.x_min, x_max: self.x_max, y_min: self.y_min, y_max: self.y_max, nx: self.nx, ny: self.ny }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub slits: Vec<SlitEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<Vec<f64>>,
    #[serde(default)]
    pub numerics: Numerics,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub study: Option<Family>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub flow: Option<FlowSpec>,
}

impl ProblemFile {
    pub fn from_slits(slits: &[(Complex64, Complex64)]) -> Self {
        Self {
            slits: slits.iter().map(|(a, b)| SlitEntry { a: [a.re, a.im], b: [b.re, b.im] }).collect(),
            delta: None,
            numerics: Numerics::default(),
            study: None,
            flow: None,
        }
    }

    /// Parses and checks the file; the slits themselves are validated by [`ProblemFile::domain`].
    ///
    /// An empty slit list parses (the flow of the bare strip is still defined),
    /// but has no domain.
    pub fn parse(text: &str) -> Result<Self> {
        let p: Self = serde_json::from_str(text).map_err(|e| Error::Problem(e.to_string()))?;
        if let Some(d) = &p.delta {
            if d.len() != p.slits.len() {
                return Err(Error::Problem(format!("{} levels for {} slits", d.len(), p.slits.len())));
            }
        }
        Ok(p)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("problem files always serialize")
    }

    pub fn domain(&self) -> Result<StripSlitDomain> {
        if self.slits.is_empty() {
            return Err(Error::Problem("the slit list is empty".into()));
        }
        let ends: Vec<(Complex64, Complex64)> = self
            .slits
            .iter()
            .map(|s| (Complex64::new(s.a[0], s.a[1]), Complex64::new(s.b[0], s.b[1])))
            .collect();
        StripSlitDomain::from_endpoints(&ends)
    }

    /// Plate levels, all ones when the file has none.
    pub fn levels(&self) -> Vec<f64> {
        self.delta.clone().unwrap_or_else(|| vec![1.0; self.slits.len()])
    }

    pub fn config(&self) -> IterationConfig {
        self.numerics.config()
    }
}
