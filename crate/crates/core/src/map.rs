//! The conformal map `Φ` from a preimage domain `G` onto a strip with slits
//! of prescribed angles, its boundary image, and its inverse.
//!
//! With `ρ, h` from the boundary integral equation, the auxiliary function
//! `f` has boundary values `(γ + h + iρ)/A` and
//!
//! ```text
//! Φ(w) = c + (w − α)·f(w) + Ψ(w),    c = −(i − α)·f(i),
//! ```
//!
//! which fixes `Φ(±1) = ±∞` and `Φ(i) = iπ/2`. For `α = 0` this is the
//! familiar `Φ(w) = −i f(i) + w f(w) + Ψ(w)`.

use std::f64::consts::FRAC_PI_2;
use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bie::{self, BieSolution};
use crate::error::{Error, Result};
use crate::geometry::{node, point_segment_distance, psi, psi_inv, BoundaryParametrization};
use crate::gmres::GmresOptions;
use crate::kernel::KernelSet;
use crate::spectral::{trig_derivative, TrigInterpolant};

/// Slit images shorter than this are reported as degenerate.
pub const MIN_SLIT_LENGTH: f64 = 1e-13;

/// Points closer than this to a slit image are treated as outside `Ω`.
pub const SLIT_CLEARANCE: f64 = 1e-10;

/// One slit of the image domain: `center + x·e^{iθ}`, `|x| ≤ length/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlitImage {
    pub center: Complex64,
    pub length: f64,
    pub theta: f64,
}

#[derive(Debug, Clone)]
pub struct MapData {
    pub bp: BoundaryParametrization,
    pub theta: Vec<f64>,
    pub alpha: Complex64,
    /// Boundary values of `f`.
    pub f_boundary: Vec<Complex64>,
    /// `f(i)`, read at node `n/4` of the unit circle.
    pub f_at_i: Complex64,
    /// The additive constant `c = −(i − α)·f(i)`.
    pub constant: Complex64,
    /// `ζ(t) = Φ(η(t))`; infinite at the two nodes `η = ±1`.
    pub zeta: Vec<Complex64>,
    /// `Ψ⁻¹(ζ(t))`, the boundary of the bounded image `Ψ⁻¹(Ω)`.
    pub zeta_disk: Vec<Complex64>,
    pub zeta_disk_dot: Vec<Complex64>,
    pub solution: BieSolution,
}

/// `γ = 0` on the unit circle and `Im[e^{−iθ_j}Ψ(η)]` on the inner curves.
pub fn strip_gamma(bp: &BoundaryParametrization, theta: &[f64]) -> Result<Vec<f64>> {
    if theta.len() != bp.m + 1 {
        return Err(Error::Geometry(format!("expected {} angles, got {}", bp.m + 1, theta.len())));
    }
    let mut gamma = vec![0.0; bp.n];
    for j in 1..=bp.m {
        let rot = Complex64::from_polar(1.0, -theta[j]);
        for i in bp.range(j) {
            let p = bp.psi_eta[i];
            if !(p.re.is_finite() && p.im.is_finite()) {
                return Err(Error::Domain(format!("inner curve {j} touches ±1")));
            }
            gamma.push((rot * p).im);
        }
    }
    Ok(gamma)
}

/// Default base point: the candidate `Ψ⁻¹(x)`, `x ∈ {−3, −2.5, …, 3}`, inside
/// `G` that is farthest from the boundary.
///
/// If every real candidate falls inside a hole, the same abscissae are tried
/// at heights `±0.5, ±1` in the strip.
pub fn default_alpha(bp: &BoundaryParametrization) -> Result<Complex64> {
    let pick = |ys: &[f64]| {
        ys.iter()
            .flat_map(|&y| (0..=12).map(move |k| psi_inv(Complex64::new(-3.0 + 0.5 * k as f64, y))))
            .filter(|&w| bp.contains(w))
            .map(|w| (w, bp.polyline_distance(w)))
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .map(|(w, _)| w)
    };
    pick(&[0.0])
        .or_else(|| pick(&[0.5, -0.5, 1.0, -1.0]))
        .ok_or_else(|| Error::Geometry("no base point candidate lies inside the domain".into()))
}

/// Solves the boundary integral equation for `Φ` and assembles its boundary data.
pub fn build_map(
    bp: &BoundaryParametrization,
    theta: &[f64],
    alpha: Complex64,
    opts: GmresOptions,
) -> Result<MapData> {
    build_map_from(bp.clone(), theta, alpha, opts, None)
}

/// As [`build_map`], taking ownership of the boundary and optionally warm-starting the solver.
pub fn build_map_from(
    bp: BoundaryParametrization,
    theta: &[f64],
    alpha: Complex64,
    opts: GmresOptions,
    initial_rho: Option<&[f64]>,
) -> Result<MapData> {
    let gamma = strip_gamma(&bp, theta)?;
    let ks = KernelSet::new(&bp, theta, alpha)?;
    let initial = initial_rho.filter(|r| r.len() == bp.total());
    let solution = bie::solve(&ks, bp.n, gamma, initial, opts)?;
    let a = ks.a;
    drop(ks.n_matrix);
    drop(ks.m1_matrix);
    Ok(assemble_map(bp, theta.to_vec(), alpha, &a, solution))
}

fn assemble_map(
    bp: BoundaryParametrization,
    theta: Vec<f64>,
    alpha: Complex64,
    a: &[Complex64],
    solution: BieSolution,
) -> MapData {
    let n = bp.n;
    let h = solution.h_samples(n);
    let f_boundary: Vec<Complex64> = (0..bp.total())
        .map(|i| Complex64::new(solution.gamma[i] + h[i], solution.rho[i]) / a[i])
        .collect();
    let f_at_i = f_boundary[n / 4];
    let constant = -(Complex64::i() - alpha) * f_at_i;
    let mut zeta = Vec::with_capacity(bp.total());
    let mut zeta_disk = Vec::with_capacity(bp.total());
    for i in 0..bp.total() {
        let d = constant + (bp.eta[i] - alpha) * f_boundary[i];
        zeta.push(d + bp.psi_eta[i]);
        if i < n {
            // on the unit circle Ψ⁻¹(Ψ(η) + d) = (η + T)/(1 + ηT), T = tanh(d/2)
            let t = (d * 0.5).tanh();
            zeta_disk.push((bp.eta[i] + t) / (1.0 + bp.eta[i] * t));
        } else {
            zeta_disk.push(psi_inv(zeta[i]));
        }
    }
    let zeta_disk_dot: Vec<Complex64> = zeta_disk.chunks(n).flat_map(trig_derivative).collect();
    MapData { bp, theta, alpha, f_boundary, f_at_i, constant, zeta, zeta_disk, zeta_disk_dot, solution }
}

impl MapData {
    pub fn n(&self) -> usize {
        self.bp.n
    }

    pub fn m(&self) -> usize {
        self.bp.m
    }

    /// `f(w)` at interior points of `G`.
    pub fn eval_f(&self, points: &[Complex64]) -> Result<Vec<Complex64>> {
        for &w in points {
            if !self.bp.contains(w) {
                return Err(Error::OutsideDomain(w));
            }
        }
        bie::cauchy_eval(&self.bp, &self.f_boundary, points)
    }

    /// `Φ(w)` at interior points of `G`.
    pub fn eval(&self, points: &[Complex64]) -> Result<Vec<Complex64>> {
        let f = self.eval_f(points)?;
        points
            .iter()
            .zip(f)
            .map(|(&w, f)| Ok(self.constant + (w - self.alpha) * f + psi(w)?))
            .collect()
    }

    /// `Φ⁻¹(z) = g(Ψ⁻¹(z))` with `g` evaluated by a Cauchy sum over the boundary of `Ψ⁻¹(Ω)`.
    pub fn inverse(&self, points: &[Complex64]) -> Result<Vec<Complex64>> {
        let mut disk = Vec::with_capacity(points.len());
        for &z in points {
            if !(z.im.abs() < FRAC_PI_2) || !z.re.is_finite() {
                return Err(Error::OutsideDomain(z));
            }
            if self.distance_to_slits(z) < SLIT_CLEARANCE {
                return Err(Error::OutsideDomain(z));
            }
            disk.push(psi_inv(z));
        }
        let mut out = Vec::with_capacity(points.len());
        for (&z, &zt) in points.iter().zip(&disk) {
            let (num, den) = self.disk_sums(zt)?;
            // near the walls far out, den alone is poor but the quotient is not
            let w = num / den;
            if !w.is_finite() || !self.bp.contains(w) {
                return Err(Error::OutsideDomain(z));
            }
            out.push(w);
        }
        Ok(out)
    }

    fn disk_sums(&self, zt: Complex64) -> Result<(Complex64, Complex64)> {
        let mut num = Complex64::new(0.0, 0.0);
        let mut den = Complex64::new(0.0, 0.0);
        let mut dmin = f64::INFINITY;
        for ((&e, &d), &g) in self.zeta_disk.iter().zip(&self.zeta_disk_dot).zip(&self.bp.eta) {
            let diff = e - zt;
            dmin = dmin.min(diff.norm());
            let q = d / diff;
            num += g * q;
            den += q;
        }
        if dmin < bie::ON_BOUNDARY_TOL {
            return Err(Error::OnBoundary(zt, dmin));
        }
        Ok((num, den))
    }

    /// Distance from `z` to the sampled slit images `ζ_j`, `j ≥ 1`.
    pub fn distance_to_slits(&self, z: Complex64) -> f64 {
        let n = self.n();
        let mut best = f64::INFINITY;
        for j in 1..=self.m() {
            let c = &self.zeta[self.bp.range(j)];
            for i in 0..n {
                best = best.min(point_segment_distance(z, c[i], c[(i + 1) % n]));
            }
        }
        best
    }

    pub fn slit_images(&self) -> Result<Vec<SlitImage>> {
        extract_slit_images(self)
    }

    /// CSV dump `index,component,zeta_re,zeta_im,f_re,f_im` of the boundary data.
    pub fn write_boundary_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "index,component,zeta_re,zeta_im,f_re,f_im")?;
        for i in 0..self.bp.total() {
            let (z, f) = (self.zeta[i], self.f_boundary[i]);
            writeln!(w, "{},{},{},{},{},{}", i % self.n(), self.bp.component_of(i), z.re, z.im, f.re, f.im)?;
        }
        Ok(())
    }
}

/// How the endpoints of a slit image are located on the sampled boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SlitExtraction {
    /// Extreme nodes only; biased by `O(h²)` unless an endpoint falls on a node.
    Nodes,
    /// Vertex of the parabola through the extreme node and its neighbours.
    #[default]
    Parabola,
    /// Parabola start, then Newton's method on the trigonometric interpolant.
    Newton,
}

/// Extremal value of `u` near its extreme node `i`.
fn locate_extremum(u: &[f64], i: usize, rule: SlitExtraction, interp: Option<&TrigInterpolant>) -> f64 {
    let n = u.len();
    let h = 2.0 * std::f64::consts::PI / n as f64;
    let (um, u0, up) = (u[(i + n - 1) % n], u[i], u[(i + 1) % n]);
    let t0 = node(i, n);
    let curv = um - 2.0 * u0 + up;
    if rule == SlitExtraction::Nodes || curv == 0.0 {
        return u0;
    }
    let x = 0.5 * (um - up) / curv;
    let mut val = u0 + 0.25 * (up - um) * x;
    if let (SlitExtraction::Newton, Some(ui)) = (rule, interp) {
        let mut t = t0 + h * x;
        for _ in 0..30 {
            let d2 = ui.eval(t, 2).re;
            if d2 == 0.0 {
                break;
            }
            let step = ui.eval(t, 1).re / d2;
            if (t - step - t0).abs() > h {
                break;
            }
            t -= step;
            if step.abs() < 1e-15 {
                break;
            }
        }
        val = ui.eval(t, 0).re;
    }
    val
}

/// Center and length of each slit image, by projecting `ζ_j` onto its direction.
pub fn extract_slit_images(md: &MapData) -> Result<Vec<SlitImage>> {
    extract_slit_images_with(md, SlitExtraction::default())
}

pub fn extract_slit_images_with(md: &MapData, rule: SlitExtraction) -> Result<Vec<SlitImage>> {
    let mut out = Vec::with_capacity(md.m());
    for j in 1..=md.m() {
        let zeta = &md.zeta[md.bp.range(j)];
        let rot = Complex64::from_polar(1.0, -md.theta[j]);
        let u: Vec<f64> = zeta.iter().map(|&z| (rot * z).re).collect();
        let (imax, _) = u.iter().enumerate().fold((0, f64::NEG_INFINITY), |b, (i, &v)| if v > b.1 { (i, v) } else { b });
        let (imin, _) = u.iter().enumerate().fold((0, f64::INFINITY), |b, (i, &v)| if v < b.1 { (i, v) } else { b });
        let ui = (rule == SlitExtraction::Newton).then(|| TrigInterpolant::from_real(&u));
        let umax = locate_extremum(&u, imax, rule, ui.as_ref());
        let umin = locate_extremum(&u, imin, rule, ui.as_ref());
        let length = umax - umin;
        if !(length >= MIN_SLIT_LENGTH) {
            return Err(Error::DegenerateSlit { component: j, length });
        }
        // the normal coordinate is constant along the image
        let v = 0.5 * ((rot * zeta[imax]).im + (rot * zeta[imin]).im);
        let center = Complex64::from_polar(1.0, md.theta[j]) * Complex64::new(0.5 * (umax + umin), v);
        out.push(SlitImage { center, length, theta: md.theta[j] });
    }
    Ok(out)
}

/// Convenience wrapper for [`MapData::inverse`].
pub fn inverse_map(md: &MapData, z: &[Complex64]) -> Result<Vec<Complex64>> {
    md.inverse(z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::StripSlitDomain;
    use crate::preimage::{iterate, IterationConfig};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn converged(slits: &[(Complex64, Complex64)], n: usize) -> MapData {
        let dom = StripSlitDomain::from_endpoints(slits).unwrap();
        let pre = iterate(&dom, &IterationConfig { n, ..Default::default() }).unwrap();
        assert!(pre.converged);
        pre.map
    }

    #[test]
    fn no_holes_gives_the_strip_map_itself() {
        let bp = BoundaryParametrization::unit_circle(64).unwrap();
        let md = build_map(&bp, &[0.0], c(0.0, 0.0), GmresOptions::default()).unwrap();
        assert!(md.f_boundary.iter().all(|f| f.norm() < 1e-13));
        let w = [c(0.3, -0.2), c(-0.5, 0.5)];
        let z = md.eval(&w).unwrap();
        for (w, z) in w.iter().zip(z) {
            assert!((z - psi(*w).unwrap()).norm() < 1e-13);
        }
    }

    #[test]
    fn normalization_and_outer_boundary() {
        let md = converged(&[(c(-0.5, -0.4), c(0.6, 0.3))], 256);
        let n = md.n();
        assert!((md.zeta[n / 4] - c(0.0, FRAC_PI_2)).norm() < 1e-14);
        for i in (0..n).filter(|&i| i != 0 && i != n / 2) {
            assert!((md.zeta[i].im.abs() - FRAC_PI_2).abs() < 1e-10, "node {i}");
        }
        // the upper half circle goes to the upper edge
        assert!(md.zeta[n / 8].im > 0.0 && md.zeta[3 * n / 4].im < 0.0);
    }

    #[test]
    fn slit_images_are_flat_and_on_target() {
        let slits = [(c(-1.0, 0.0), c(-1.0, 1.0)), (c(1.0, 0.0), c(2.0, -0.5))];
        let md = converged(&slits, 512);
        let dom = StripSlitDomain::from_endpoints(&slits).unwrap();
        for (j, s) in (1..=2).zip(dom.slits()) {
            let rot = Complex64::from_polar(1.0, -s.theta);
            let v: Vec<f64> = md.zeta[md.bp.range(j)].iter().map(|&z| (rot * z).im).collect();
            let spread = v.iter().cloned().fold(f64::MIN, f64::max) - v.iter().cloned().fold(f64::MAX, f64::min);
            assert!(spread < 1e-10, "slit {j}: {spread}");
        }
        for (img, s) in md.slit_images().unwrap().iter().zip(dom.slits()) {
            assert!((img.center - s.center).norm() < 1e-12);
            assert!((img.length - s.length).abs() < 1e-12);
        }
    }

    #[test]
    fn inverse_round_trip() {
        let slits = [(c(-0.3, -0.7), c(-0.3, 0.7))];
        let md = converged(&slits, 256);
        let mut pts = Vec::new();
        for i in 0..20 {
            for k in 0..10 {
                let z = c(-4.0 + 8.0 * i as f64 / 19.0, -1.3 + 2.6 * k as f64 / 9.0);
                if md.distance_to_slits(z) >= 0.05 {
                    pts.push(z);
                }
            }
        }
        let w = md.inverse(&pts).unwrap();
        assert!(w.iter().all(|&w| md.bp.contains(w)));
        let back = md.eval(&w).unwrap();
        let err = pts.iter().zip(&back).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(err < 1e-8, "{err}");
    }

    #[test]
    fn inverse_rejects_boundary_and_slits() {
        let md = converged(&[(c(0.0, -0.5), c(0.0, 0.5))], 128);
        assert!(md.inverse(&[c(0.0, FRAC_PI_2)]).is_err());
        assert!(md.inverse(&[c(0.0, 0.2)]).is_err());
        assert!(md.inverse(&[c(0.3, 0.2)]).is_ok());
    }

    #[test]
    fn extremum_rules_on_a_known_curve() {
        // u(t) = cos(t − 0.01) on 64 nodes, maximum 1 between nodes
        let n = 64;
        let u: Vec<f64> = (0..n).map(|i| (node(i, n) - 0.01).cos()).collect();
        let ui = TrigInterpolant::from_real(&u);
        let nodes = locate_extremum(&u, 0, SlitExtraction::Nodes, None);
        let par = locate_extremum(&u, 0, SlitExtraction::Parabola, None);
        let newton = locate_extremum(&u, 0, SlitExtraction::Newton, Some(&ui));
        assert!((1.0 - nodes) > 1e-5);
        assert!((1.0 - par).abs() < 1e-6);
        assert!((1.0 - newton).abs() < 1e-15);
    }
}
