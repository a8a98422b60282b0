//! The strip-with-slits domain, the intermediate ellipse domain, the preimage
//! domain inside the unit disk, and the elementary maps between strip and
//! disk coordinates.
//!
//! The strip is `S = {z : |Im z| < π/2}`. `psi` maps the unit disk onto `S`
//! and `psi_inv` maps back.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Tolerance for slit disjointness, in strip units.
pub const SLIT_SEPARATION_TOL: f64 = 1e-12;

/// Number of samples per ellipse used when checking for overlaps.
pub const OVERLAP_SAMPLES: usize = 256;

/// `Ψ(w) = log((1+w)/(1−w))`, the map from the unit disk onto the strip.
pub fn psi(w: Complex64) -> Result<Complex64> {
    let one = Complex64::new(1.0, 0.0);
    if w == one || w == -one {
        return Err(Error::Domain(format!("psi is singular at w = {w}")));
    }
    Ok((one + w).ln() - (one - w).ln())
}

/// `Ψ⁻¹(ζ) = tanh(ζ/2)`, the map from the strip onto the unit disk.
pub fn psi_inv(zeta: Complex64) -> Complex64 {
    (zeta * 0.5).tanh()
}

/// Derivative of `Ψ⁻¹` written in terms of its value `w = Ψ⁻¹(ζ)`.
#[inline]
pub fn psi_inv_deriv_from_value(w: Complex64) -> Complex64 {
    (Complex64::new(1.0, 0.0) - w * w) * 0.5
}

/// A rectilinear slit `[a, b]` strictly inside the strip.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlitSpec {
    pub a: Complex64,
    pub b: Complex64,
    pub center: Complex64,
    pub length: f64,
    /// Angle with the positive real axis, normalised to (−π/2, π/2].
    pub theta: f64,
}

impl SlitSpec {
    pub fn new(a: Complex64, b: Complex64) -> Result<Self> {
        if !(a.re.is_finite() && a.im.is_finite() && b.re.is_finite() && b.im.is_finite()) {
            return Err(Error::Geometry("slit endpoints must be finite".into()));
        }
        if a.im.abs() >= FRAC_PI_2 || b.im.abs() >= FRAC_PI_2 {
            return Err(Error::Geometry(format!(
                "slit [{a}, {b}] is not strictly inside the strip |Im z| < π/2"
            )));
        }
        let d = b - a;
        let length = d.norm();
        if length <= 0.0 {
            return Err(Error::Geometry(format!("slit [{a}, {b}] has zero length")));
        }
        Ok(Self {
            a,
            b,
            center: (a + b) * 0.5,
            length,
            theta: normalize_angle(d.arg()),
        })
    }

    /// Unit vector along the slit, `e^{iθ}`.
    pub fn direction(&self) -> Complex64 {
        Complex64::from_polar(1.0, self.theta)
    }

    pub fn translated(&self, shift: Complex64) -> Result<Self> {
        Self::new(self.a + shift, self.b + shift)
    }

    pub fn distance_to_point(&self, p: Complex64) -> f64 {
        point_segment_distance(p, self.a, self.b)
    }

    pub fn distance_to(&self, other: &SlitSpec) -> f64 {
        segment_distance(self.a, self.b, other.a, other.b)
    }
}

/// Maps an angle onto (−π/2, π/2]; a line and its reversal are the same set.
pub fn normalize_angle(theta: f64) -> f64 {
    let mut t = theta % PI;
    if t <= -FRAC_PI_2 {
        t += PI;
    } else if t > FRAC_PI_2 {
        t -= PI;
    }
    t
}

fn cross(u: Complex64, v: Complex64) -> f64 {
    u.re * v.im - u.im * v.re
}

pub fn point_segment_distance(p: Complex64, a: Complex64, b: Complex64) -> f64 {
    let d = b - a;
    let len2 = d.norm_sqr();
    if len2 == 0.0 {
        return (p - a).norm();
    }
    let s = (((p - a) * d.conj()).re / len2).clamp(0.0, 1.0);
    (p - (a + d * s)).norm()
}

/// Exact Euclidean distance between the closed segments `[a, b]` and `[c, d]`.
pub fn segment_distance(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> f64 {
    let (r, s) = (b - a, d - c);
    let denom = cross(r, s);
    if denom != 0.0 {
        let t = cross(c - a, s) / denom;
        let u = cross(c - a, r) / denom;
        if (0.0..=1.0).contains(&t) && (0.0..=1.0).contains(&u) {
            return 0.0;
        }
    }
    point_segment_distance(a, c, d)
        .min(point_segment_distance(b, c, d))
        .min(point_segment_distance(c, a, b))
        .min(point_segment_distance(d, a, b))
}

/// The target domain: the strip minus `m ≥ 1` pairwise disjoint slits.
#[derive(Debug, Clone, PartialEq)]
pub struct StripSlitDomain {
    slits: Vec<SlitSpec>,
}

impl StripSlitDomain {
    pub fn new(slits: Vec<SlitSpec>) -> Result<Self> {
        if slits.is_empty() {
            return Err(Error::Geometry("at least one slit is required".into()));
        }
        for i in 0..slits.len() {
            for j in i + 1..slits.len() {
                let d = slits[i].distance_to(&slits[j]);
                if d <= SLIT_SEPARATION_TOL {
                    return Err(Error::Geometry(format!(
                        "slits {i} and {j} intersect or touch (distance {d:e})"
                    )));
                }
            }
        }
        Ok(Self { slits })
    }

    pub fn from_endpoints(endpoints: &[(Complex64, Complex64)]) -> Result<Self> {
        let slits = endpoints
            .iter()
            .map(|&(a, b)| SlitSpec::new(a, b))
            .collect::<Result<Vec<_>>>()?;
        Self::new(slits)
    }

    pub fn slits(&self) -> &[SlitSpec] {
        &self.slits
    }

    pub fn len(&self) -> usize {
        self.slits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slits.is_empty()
    }

    pub fn thetas(&self) -> Vec<f64> {
        self.slits.iter().map(|s| s.theta).collect()
    }

    /// Distance from `z` to the nearest slit.
    pub fn distance_to_slits(&self, z: Complex64) -> f64 {
        self.slits
            .iter()
            .map(|s| s.distance_to_point(z))
            .fold(f64::INFINITY, f64::min)
    }

    /// Whether `z` lies in the strip and at least `margin` away from every slit.
    pub fn contains(&self, z: Complex64, margin: f64) -> bool {
        z.im.abs() < FRAC_PI_2 && self.distance_to_slits(z) > margin
    }
}

/// An ellipse `z + 0.5·a·e^{iθ}(cos t − i·r·sin t)` in the strip.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipseParams {
    pub center: Complex64,
    /// Length of the major axis.
    pub major: f64,
    pub theta: f64,
    /// Minor-to-major axis ratio.
    pub r: f64,
}

impl EllipseParams {
    pub fn point(&self, t: f64) -> Complex64 {
        self.center
            + Complex64::from_polar(0.5 * self.major, self.theta) * Complex64::new(t.cos(), -self.r * t.sin())
    }

    pub fn derivative(&self, t: f64) -> Complex64 {
        -Complex64::from_polar(0.5 * self.major, self.theta) * Complex64::new(t.sin(), self.r * t.cos())
    }

    /// Largest `|Im|` reached on the ellipse.
    pub fn max_abs_im(&self) -> f64 {
        let (s, c) = self.theta.sin_cos();
        self.center.im.abs() + 0.5 * self.major * (s * s + self.r * self.r * c * c).sqrt()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.r > 0.0 && self.r <= 1.0) {
            return Err(Error::Domain(format!("aspect ratio r = {} not in (0, 1]", self.r)));
        }
        if !(self.major > 0.0) {
            return Err(Error::Geometry(format!("ellipse axis {} must be positive", self.major)));
        }
        if self.max_abs_im() >= FRAC_PI_2 {
            return Err(Error::Overlap(format!(
                "ellipse centred at {} reaches the strip wall; choose a smaller r",
                self.center
            )));
        }
        Ok(())
    }

    /// Whether `p` lies strictly inside the ellipse.
    pub fn contains(&self, p: Complex64) -> bool {
        let q = (p - self.center) * Complex64::from_polar(1.0, -self.theta);
        let (u, v) = (q.re / (0.5 * self.major), q.im / (0.5 * self.major * self.r));
        u * u + v * v < 1.0
    }
}

/// Samples `(η̂(t_i), η̂'(t_i))` of an ellipse at `n` equidistant nodes.
pub fn parametrize_ellipse(p: &EllipseParams, n: usize) -> (Vec<Complex64>, Vec<Complex64>) {
    (0..n)
        .map(|i| {
            let t = node(i, n);
            (p.point(t), p.derivative(t))
        })
        .unzip()
}

/// `t_i = 2πi/n`.
#[inline]
pub fn node(i: usize, n: usize) -> f64 {
    2.0 * PI * i as f64 / n as f64
}

/// Checks that every ellipse is valid and that no two of them meet.
pub fn check_ellipses(params: &[EllipseParams]) -> Result<()> {
    for p in params {
        p.validate()?;
    }
    let polys: Vec<Vec<Complex64>> = params
        .iter()
        .map(|p| parametrize_ellipse(p, OVERLAP_SAMPLES).0)
        .collect();
    for i in 0..params.len() {
        for j in i + 1..params.len() {
            if params[i].contains(params[j].center)
                || params[j].contains(params[i].center)
                || polylines_meet(&polys[i], &polys[j])
            {
                return Err(Error::Overlap(format!(
                    "ellipses {} and {} intersect; choose a smaller r",
                    i + 1,
                    j + 1
                )));
            }
        }
    }
    Ok(())
}

/// Minimum distance between two closed polylines.
pub fn polyline_distance(p: &[Complex64], q: &[Complex64]) -> f64 {
    let mut best = f64::INFINITY;
    for i in 0..p.len() {
        let (a, b) = (p[i], p[(i + 1) % p.len()]);
        for k in 0..q.len() {
            best = best.min(segment_distance(a, b, q[k], q[(k + 1) % q.len()]));
            if best == 0.0 {
                return 0.0;
            }
        }
    }
    best
}

fn polylines_meet(p: &[Complex64], q: &[Complex64]) -> bool {
    polyline_distance(p, q) <= SLIT_SEPARATION_TOL
}

/// Discrete winding number of a closed sampled curve about `p`.
pub fn winding_number(curve: &[Complex64], p: Complex64) -> f64 {
    let n = curve.len();
    let mut total = 0.0;
    for i in 0..n {
        let a = curve[i] - p;
        let b = curve[(i + 1) % n] - p;
        total += (b / a).arg();
    }
    total / (2.0 * PI)
}

/// Sampled boundary `Γ = Γ_0 ∪ … ∪ Γ_m` of a preimage domain.
///
/// Component 0 is the unit circle, traversed counterclockwise; the inner
/// components are traversed clockwise so the domain lies to the left. Node
/// `i` of component `j` has global index `j·n + i`.
#[derive(Debug, Clone)]
pub struct BoundaryParametrization {
    pub n: usize,
    pub m: usize,
    pub eta: Vec<Complex64>,
    pub eta_dot: Vec<Complex64>,
    pub eta_ddot: Vec<Complex64>,
    /// `Ψ(η)` at every node; infinite where `η = ±1`.
    pub psi_eta: Vec<Complex64>,
    /// How each component was generated, used for accurate chords.
    pub shapes: Vec<CurveShape>,
}

/// The analytic description of a boundary component, when there is one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CurveShape {
    UnitCircle,
    /// `Ψ⁻¹` of the ellipse.
    MappedEllipse(EllipseParams),
    Sampled,
}

const CHORD_DIRECT_MIN: f64 = 0.05;

/// Same-component chords `η(t_j) − η(t_i)` without cancellation.
///
/// Nearby nodes on thin curves lose most of their digits when subtracted
/// directly; here the difference is formed from half-angle products.
pub struct ChordEval<'a> {
    bp: &'a BoundaryParametrization,
    sin_tab: Vec<f64>,
    cos_tab: Vec<f64>,
    cosh_half: Vec<Complex64>,
}

impl<'a> ChordEval<'a> {
    pub fn new(bp: &'a BoundaryParametrization) -> Self {
        let n = bp.n;
        let (sin_tab, cos_tab) = (0..2 * n).map(|k| (PI * k as f64 / n as f64).sin_cos()).unzip();
        let cosh_half = bp
            .psi_eta
            .iter()
            .enumerate()
            .map(|(i, &p)| match bp.shapes[i / n] {
                CurveShape::MappedEllipse(_) => (p * 0.5).cosh(),
                _ => Complex64::new(0.0, 0.0),
            })
            .collect();
        Self { bp, sin_tab, cos_tab, cosh_half }
    }

    /// `η_j − η_i` for global node indices.
    pub fn chord(&self, i: usize, j: usize) -> Complex64 {
        let bp = self.bp;
        let n = bp.n;
        let c = i / n;
        let plain = bp.eta[j] - bp.eta[i];
        // long chords keep their relative accuracy when subtracted directly
        if j / n != c || plain.norm_sqr() > CHORD_DIRECT_MIN * CHORD_DIRECT_MIN {
            return plain;
        }
        let (il, jl) = (i % n, j % n);
        // σ = (t_j + t_i)/2 and δ = (t_j − t_i)/2 as multiples of π/n
        let sig = (jl + il) % (2 * n);
        let del = (jl + 2 * n - il) % (2 * n);
        let sd = self.sin_tab[del];
        match bp.shapes[c] {
            CurveShape::UnitCircle => {
                Complex64::new(-self.sin_tab[sig], self.cos_tab[sig]) * (2.0 * sd)
            }
            CurveShape::MappedEllipse(p) => {
                let dh = Complex64::from_polar(p.major, p.theta)
                    * Complex64::new(-self.sin_tab[sig] * sd, -p.r * self.cos_tab[sig] * sd);
                (dh * 0.5).sinh() / (self.cosh_half[i] * self.cosh_half[j])
            }
            CurveShape::Sampled => plain,
        }
    }
}

impl BoundaryParametrization {
    /// Unit circle only (`m = 0`).
    pub fn unit_circle(n: usize) -> Result<Self> {
        check_node_count(n, 4)?;
        let mut bp = Self {
            n,
            m: 0,
            eta: Vec::with_capacity(n),
            eta_dot: Vec::with_capacity(n),
            eta_ddot: Vec::with_capacity(n),
            psi_eta: Vec::with_capacity(n),
            shapes: Vec::new(),
        };
        bp.push_circle();
        Ok(bp)
    }

    fn push_circle(&mut self) {
        let n = self.n;
        for i in 0..n {
            let e = Complex64::from_polar(1.0, node(i, n));
            self.eta.push(e);
            self.eta_dot.push(Complex64::i() * e);
            self.eta_ddot.push(-e);
            self.psi_eta.push(circle_psi(i, n));
        }
        self.shapes.push(CurveShape::UnitCircle);
    }

    /// Builds a boundary from samples of arbitrary closed curves; derivatives are spectral.
    pub fn from_samples(n: usize, components: &[Vec<Complex64>]) -> Result<Self> {
        check_node_count(n, 4)?;
        if components.is_empty() {
            return Err(Error::Geometry("at least the outer component is required".into()));
        }
        let mut bp = Self {
            n,
            m: components.len() - 1,
            eta: Vec::new(),
            eta_dot: Vec::new(),
            eta_ddot: Vec::new(),
            psi_eta: Vec::new(),
            shapes: vec![CurveShape::Sampled; components.len()],
        };
        for c in components {
            if c.len() != n {
                return Err(Error::Geometry(format!("component has {} samples, expected {n}", c.len())));
            }
            let d = crate::spectral::trig_derivative(c);
            let dd = crate::spectral::trig_derivative(&d);
            bp.eta.extend_from_slice(c);
            bp.eta_dot.extend(d);
            bp.eta_ddot.extend(dd);
            bp.psi_eta
                .extend(c.iter().map(|&w| psi(w).unwrap_or(Complex64::new(f64::INFINITY, 0.0))));
        }
        Ok(bp)
    }

    pub fn total(&self) -> usize {
        self.n * (self.m + 1)
    }

    pub fn component_of(&self, index: usize) -> usize {
        index / self.n
    }

    pub fn range(&self, j: usize) -> std::ops::Range<usize> {
        j * self.n..(j + 1) * self.n
    }

    pub fn component(&self, j: usize) -> &[Complex64] {
        &self.eta[self.range(j)]
    }

    /// Whether `p` is inside the outer curve and outside every inner curve,
    /// judged by discrete winding numbers (exactly for the unit circle).
    pub fn contains(&self, p: Complex64) -> bool {
        let inside = match self.shapes[0] {
            CurveShape::UnitCircle => p.norm() < 1.0,
            _ => winding_number(self.component(0), p) >= 0.5,
        };
        if !inside {
            return false;
        }
        (1..=self.m).all(|j| winding_number(self.component(j), p).abs() < 0.5)
    }

    /// Smallest distance from `p` to any boundary node.
    pub fn node_distance(&self, p: Complex64) -> f64 {
        self.eta.iter().map(|&e| (e - p).norm()).fold(f64::INFINITY, f64::min)
    }

    /// Distance from `p` to the sampled boundary polylines.
    pub fn polyline_distance(&self, p: Complex64) -> f64 {
        let mut best = f64::INFINITY;
        for j in 0..=self.m {
            let c = self.component(j);
            for i in 0..c.len() {
                best = best.min(point_segment_distance(p, c[i], c[(i + 1) % c.len()]));
            }
        }
        best
    }
}

fn check_node_count(n: usize, min: usize) -> Result<()> {
    if n < min || !n.is_power_of_two() {
        return Err(Error::Domain(format!(
            "node count n = {n} must be a power of two and at least {min}"
        )));
    }
    Ok(())
}

/// `Ψ(e^{it})` at node `i`, exact on the walls: `ln|cot(t/2)| ± iπ/2`.
fn circle_psi(i: usize, n: usize) -> Complex64 {
    if i == 0 || 2 * i == n {
        return Complex64::new(if i == 0 { f64::INFINITY } else { f64::NEG_INFINITY }, 0.0);
    }
    let t = node(i, n);
    let c = 1.0 / (0.5 * t).tan();
    Complex64::new(c.abs().ln(), FRAC_PI_2.copysign(c))
}

/// Boundary of the preimage domain `G`: the unit circle and the `Ψ⁻¹`-images
/// of the given ellipses.
pub fn build_preimage_boundary(params: &[EllipseParams], n: usize) -> Result<BoundaryParametrization> {
    check_node_count(n, 8)?;
    check_ellipses(params)?;
    let m = params.len();
    let mut bp = BoundaryParametrization {
        n,
        m,
        eta: Vec::with_capacity((m + 1) * n),
        eta_dot: Vec::with_capacity((m + 1) * n),
        eta_ddot: Vec::with_capacity((m + 1) * n),
        psi_eta: Vec::with_capacity((m + 1) * n),
        shapes: Vec::with_capacity(m + 1),
    };
    bp.push_circle();
    let one = Complex64::new(1.0, 0.0);
    for (j, p) in params.iter().enumerate() {
        let (eh, ehd) = parametrize_ellipse(p, n);
        for i in 0..n {
            let w = psi_inv(eh[i]);
            let q = (one - w * w) * 0.5;
            let wd = q * ehd[i];
            // η̂'' = −(η̂ − z) for the ellipse parametrisation
            let ehdd = -(eh[i] - p.center);
            let wdd = -w * wd * ehd[i] + q * ehdd;
            bp.eta.push(w);
            bp.eta_dot.push(wd);
            bp.eta_ddot.push(wdd);
            bp.psi_eta.push(eh[i]);
        }
        bp.shapes.push(CurveShape::MappedEllipse(*p));
        if bp.component(j + 1).iter().any(|w| w.norm() >= 1.0) {
            return Err(Error::Overlap(format!("curve {} leaves the unit disk", j + 1)));
        }
    }
    Ok(bp)
}
