//! Capacity over one- and two-parameter families of slit configurations.

use std::io::Write;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::capacity::{capacity, CondenserSpec};
use crate::error::{Error, Result};
use crate::geometry::{SlitSpec, StripSlitDomain};
use crate::preimage::IterationConfig;

/// Smallest distance between randomly placed slits.
pub const RANDOM_MIN_GAP: f64 = 1e-3;

const RANDOM_MAX_ATTEMPTS: usize = 100_000;

/// A point written as `[re, im]`.
pub type Point = [f64; 2];

fn pt(p: Point) -> Complex64 {
    Complex64::new(p[0], p[1])
}

/// `count` equally spaced values from `min` to `max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl Sweep {
    pub fn values(&self) -> Result<Vec<f64>> {
        if self.count == 0 || !self.min.is_finite() || !self.max.is_finite() || self.min > self.max {
            return Err(Error::Problem(format!("bad sweep {self:?}")));
        }
        if self.count == 1 {
            return Ok(vec![self.min]);
        }
        let h = (self.max - self.min) / (self.count - 1) as f64;
        Ok((0..self.count).map(|k| self.min + h * k as f64).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum Family {
    /// `s·direction + [a, b]`.
    Shift { a: Point, b: Point, direction: Point, values: Vec<f64> },
    /// `(−x·direction + [a, b]) ∪ (x·direction + [a, b])`, with `r ≤ x/2` and, if `wall` is set, `r ≤ wall − x`.
    Pair {
        a: Point,
        b: Point,
        direction: Point,
        values: Vec<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        wall: Option<f64>,
    },
    /// `[a, x + iy]` over a grid of far endpoints.
    Endpoint { a: Point, x: Sweep, y: Sweep },
    /// `count` horizontal intervals of total length `total_length`, centers uniform in the box.
    Random { count: usize, samples: usize, total_length: f64, x: [f64; 2], y: [f64; 2] },
}

/// One sample: its label, its slits and the aspect ratio to use.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub param: String,
    pub slits: std::result::Result<Vec<SlitSpec>, String>,
    pub r: f64,
}

fn segment(a: Complex64, b: Complex64) -> std::result::Result<SlitSpec, String> {
    SlitSpec::new(a, b).map_err(|e| e.to_string())
}

impl Family {
    /// Expands the family into samples; `seed` drives the random family only.
    pub fn samples(&self, r: f64, seed: u64) -> Result<Vec<Sample>> {
        match self {
            Family::Shift { a, b, direction, values } => Ok(values
                .iter()
                .map(|&s| {
                    let d = pt(*direction) * s;
                    Sample { param: fmt(s), slits: segment(pt(*a) + d, pt(*b) + d).map(|s| vec![s]), r }
                })
                .collect()),
            Family::Pair { a, b, direction, values, wall } => Ok(values
                .iter()
                .map(|&x| {
                    let d = pt(*direction) * x;
                    let slits = segment(pt(*a) - d, pt(*b) - d)
                        .and_then(|l| segment(pt(*a) + d, pt(*b) + d).map(|r| vec![l, r]));
                    let mut rr = r.min(0.5 * x);
                    if let Some(w) = wall {
                        rr = rr.min(w - x);
                    }
                    Sample { param: fmt(x), slits, r: rr }
                })
                .collect()),
            Family::Endpoint { a, x, y } => {
                let (xs, ys) = (x.values()?, y.values()?);
                Ok(ys
                    .iter()
                    .flat_map(|&yv| xs.iter().map(move |&xv| (xv, yv)))
                    .map(|(xv, yv)| Sample {
                        param: format!("{}:{}", fmt(xv), fmt(yv)),
                        slits: segment(pt(*a), Complex64::new(xv, yv)).map(|s| vec![s]),
                        r,
                    })
                    .collect())
            }
            Family::Random { count, samples, total_length, x, y } => {
                if *count == 0 || !(*total_length > 0.0) || x[0] > x[1] || y[0] > y[1] {
                    return Err(Error::Problem("bad random family".into()));
                }
                let half = 0.5 * total_length / *count as f64;
                if x[1] - x[0] < 2.0 * half {
                    return Err(Error::Problem("random box too narrow for the intervals".into()));
                }
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                (0..*samples)
                    .map(|k| {
                        let slits = place_random(&mut rng, *count, half, *x, *y)?;
                        Ok(Sample { param: k.to_string(), slits: Ok(slits), r })
                    })
                    .collect()
            }
        }
    }
}

fn place_random(rng: &mut ChaCha8Rng, count: usize, half: f64, x: [f64; 2], y: [f64; 2]) -> Result<Vec<SlitSpec>> {
    let mut out: Vec<SlitSpec> = Vec::with_capacity(count);
    let mut attempts = 0;
    while out.len() < count {
        attempts += 1;
        if attempts > RANDOM_MAX_ATTEMPTS {
            return Err(Error::Problem(format!("could not place {count} separated intervals")));
        }
        let cx = rng.gen_range(x[0] + half..=x[1] - half);
        let cy = if y[0] < y[1] { rng.gen_range(y[0]..=y[1]) } else { y[0] };
        let s = SlitSpec::new(Complex64::new(cx - half, cy), Complex64::new(cx + half, cy))?;
        if out.iter().all(|o| o.distance_to(&s) >= RANDOM_MIN_GAP) {
            out.push(s);
        }
    }
    Ok(out)
}

/// Shortest decimal form that parses back to the same value.
fn fmt(v: f64) -> String {
    format!("{v}")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyRow {
    pub param: String,
    pub cap: Option<f64>,
    pub converged: bool,
    pub iters: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Evaluates the capacity for every sample; failures are recorded and the sweep goes on.
///
/// `delta` gives the plate levels (all ones when absent).
pub fn capacity_study<F>(
    family: &Family,
    delta: Option<&[f64]>,
    cfg: &IterationConfig,
    seed: u64,
    mut observe: F,
) -> Result<Vec<StudyRow>>
where
    F: FnMut(&StudyRow),
{
    cfg.validate()?;
    let mut rows = Vec::new();
    for sample in family.samples(cfg.r, seed)? {
        let run = || -> Result<(f64, bool, usize)> {
            let slits = sample.slits.clone().map_err(Error::Geometry)?;
            let domain = StripSlitDomain::new(slits)?;
            let cond = match delta {
                Some(d) => CondenserSpec::new(domain, d.to_vec())?,
                None => CondenserSpec::classical(domain),
            };
            let res = capacity(&cond, &IterationConfig { r: sample.r, ..*cfg })?;
            Ok((res.cap, res.preimage.converged, res.preimage.iterations()))
        };
        let row = match run() {
            Ok((cap, converged, iters)) => StudyRow { param: sample.param, cap: Some(cap), converged, iters, error: None },
            Err(e) => StudyRow { param: sample.param, cap: None, converged: false, iters: 0, error: Some(e.to_string()) },
        };
        observe(&row);
        rows.push(row);
    }
    Ok(rows)
}

/// CSV `param,cap,converged,iters`; `cap` is empty for failed samples.
pub fn write_study_csv<W: Write>(rows: &[StudyRow], mut w: W) -> std::io::Result<()> {
    writeln!(w, "param,cap,converged,iters")?;
    for r in rows {
        let cap = r.cap.map(|c| format!("{c}")).unwrap_or_default();
        writeln!(w, "{},{},{},{}", r.param, cap, r.converged, r.iters)?;
    }
    Ok(())
}
