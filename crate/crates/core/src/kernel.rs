//! The generalized Neumann kernel `N` and the split form of the singular
//! kernel `M`, discretised by the Nyström method with the trapezoidal rule.
//!
//! With `K(s,t) = (1/π)·(A(s)/A(t))·η'(t)/(η(t) − η(s))` we have `N = Im K`
//! and `M = Re K`. `M` carries a cotangent singularity on each component,
//! so it is stored as the continuous remainder
//!
//! ```text
//! M1(s,t) = M(s,t) + (1/2π)·cot((s−t)/2)   (same component)
//! M1(s,t) = M(s,t)                          (different components)
//! ```
//!
//! and the cotangent part is applied as a Fourier multiplier.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::{BoundaryParametrization, ChordEval};
use crate::linalg::DenseMatrix;
use crate::spectral::{conjugate, trig_derivative};

/// Minimum distance between a base point and the boundary.
const BASE_POINT_CLEARANCE: f64 = 1e-10;

/// Memory ceiling for the two dense kernel matrices.
pub const MAX_DENSE_BYTES: usize = 4 << 30;

/// Matrix-free application of the two boundary operators.
///
/// Every method includes the trapezoidal weights, so `apply_n` returns the
/// samples of `∫_J N(s,t) x(t) dt`. A fast (e.g. multipole) backend only
/// needs to implement this trait.
pub trait KernelOperator: Sync {
    /// Number of unknowns, `(m+1)·n`.
    fn size(&self) -> usize;

    fn apply_n(&self, x: &[f64], out: &mut [f64]);

    fn apply_m(&self, x: &[f64]) -> Vec<f64>;

    /// `(I − N) x`.
    fn apply_i_minus_n(&self, x: &[f64], out: &mut [f64]) {
        self.apply_n(x, out);
        for (o, xi) in out.iter_mut().zip(x) {
            *o = xi - *o;
        }
    }
}

/// `A(t) = e^{i(π/2 − θ(t))}·(η(t) − α)` where `θ` is constant per component.
pub fn build_a(bp: &BoundaryParametrization, theta: &[f64], alpha: Complex64) -> Result<Vec<Complex64>> {
    if theta.len() != bp.m + 1 {
        return Err(Error::Geometry(format!(
            "expected {} angles (θ_0..θ_m), got {}",
            bp.m + 1,
            theta.len()
        )));
    }
    if bp.polyline_distance(alpha) < BASE_POINT_CLEARANCE || !bp.contains(alpha) {
        return Err(Error::BasePoint(alpha));
    }
    let mut a = Vec::with_capacity(bp.total());
    for (j, &th) in theta.iter().enumerate() {
        let rot = Complex64::from_polar(1.0, FRAC_PI_2 - th);
        a.extend(bp.eta[bp.range(j)].iter().map(|&e| rot * (e - alpha)));
    }
    Ok(a)
}

/// Which parts of the kernel to assemble.
#[derive(Clone, Copy)]
struct Parts {
    n: bool,
    m1: bool,
}

fn assemble(
    bp: &BoundaryParametrization,
    a: &[Complex64],
    a_dot: &[Complex64],
    parts: Parts,
) -> Result<(Option<DenseMatrix>, Option<DenseMatrix>)> {
    let total = bp.total();
    if a.len() != total || a_dot.len() != total {
        return Err(Error::Geometry(format!("A has {} samples, expected {total}", a.len())));
    }
    let count = parts.n as usize + parts.m1 as usize;
    if count * total * total * std::mem::size_of::<f64>() > MAX_DENSE_BYTES {
        return Err(Error::Domain(format!("{total} unknowns exceed the dense kernel memory ceiling")));
    }
    let n = bp.n;
    let inv_pi = 1.0 / PI;
    // cot(πk/n) for the same-component split, k = (i − j) mod n
    let cot_tab: Vec<f64> = (0..n)
        .map(|k| if k == 0 { 0.0 } else { 1.0 / (PI * k as f64 / n as f64).tan() })
        .collect();
    let chords = ChordEval::new(bp);
    let b: Vec<Complex64> = bp.eta_dot.iter().zip(a).map(|(d, a)| d / a).collect();
    let mut nm = parts.n.then(|| DenseMatrix::zeros(total, total));
    let mut mm = parts.m1.then(|| DenseMatrix::zeros(total, total));
    let mut nrow = vec![0.0; total];
    let mut mrow = vec![0.0; total];
    for i in 0..total {
        let ci = i / n;
        let il = i % n;
        let ai = a[i] * inv_pi;
        for j in 0..total {
            if i == j {
                continue;
            }
            let d = chords.chord(i, j);
            let d2 = d.norm_sqr();
            if d2 == 0.0 {
                return Err(Error::CoincidentNodes(i, j));
            }
            let k = ai * b[j] * d.conj() / d2;
            nrow[j] = k.im;
            mrow[j] = if j / n == ci {
                k.re + 0.5 * inv_pi * cot_tab[(il + n - j % n) % n]
            } else {
                k.re
            };
        }
        let diag = (bp.eta_ddot[i] / (2.0 * bp.eta_dot[i]) - a_dot[i] / a[i]) * inv_pi;
        nrow[i] = diag.im;
        mrow[i] = diag.re;
        if let Some(m) = nm.as_mut() {
            m.row_mut(i).copy_from_slice(&nrow);
        }
        if let Some(m) = mm.as_mut() {
            m.row_mut(i).copy_from_slice(&mrow);
        }
    }
    Ok((nm, mm))
}

/// `A'` by spectral differentiation on each component.
fn spectral_a_dot(bp: &BoundaryParametrization, a: &[Complex64]) -> Vec<Complex64> {
    a.chunks(bp.n).flat_map(trig_derivative).collect()
}

/// Nyström matrix of the generalized Neumann kernel (kernel values, no weights).
///
/// Diagonal entries are the limits `(1/π)·Im[η''/(2η') − A'/A]`.
pub fn build_n(bp: &BoundaryParametrization, a: &[Complex64]) -> Result<DenseMatrix> {
    let a_dot = spectral_a_dot(bp, a);
    Ok(assemble(bp, a, &a_dot, Parts { n: true, m1: false })?.0.expect("assembled"))
}

/// Continuous remainder `M1` of the kernel `M`, diagonal `(1/π)·Re[η''/(2η') − A'/A]`.
pub fn build_m1(bp: &BoundaryParametrization, a: &[Complex64]) -> Result<DenseMatrix> {
    let a_dot = spectral_a_dot(bp, a);
    Ok(assemble(bp, a, &a_dot, Parts { n: false, m1: true })?.1.expect("assembled"))
}

/// `M γ = M1 γ − K γ`, with `K` the periodic conjugation operator applied per component.
pub fn apply_m(gamma: &[f64], n: usize, m1: &DenseMatrix) -> Vec<f64> {
    let mut out = vec![0.0; gamma.len()];
    m1.matvec_scaled(gamma, 2.0 * PI / n as f64, &mut out);
    for (chunk, g) in out.chunks_mut(n).zip(gamma.chunks(n)) {
        for (o, k) in chunk.iter_mut().zip(conjugate(g)) {
            *o -= k;
        }
    }
    out
}

/// Assembled kernels for one boundary, angle vector and base point.
#[derive(Debug, Clone)]
pub struct KernelSet {
    pub a: Vec<Complex64>,
    pub n_matrix: DenseMatrix,
    pub m1_matrix: DenseMatrix,
    pub theta: Vec<f64>,
    pub alpha: Complex64,
    nodes: usize,
}

impl KernelSet {
    pub fn new(bp: &BoundaryParametrization, theta: &[f64], alpha: Complex64) -> Result<Self> {
        let a = build_a(bp, theta, alpha)?;
        // θ is constant per component, so A' = e^{i(π/2−θ)}·η' exactly
        let a_dot: Vec<Complex64> = (0..bp.total())
            .map(|i| Complex64::from_polar(1.0, FRAC_PI_2 - theta[bp.component_of(i)]) * bp.eta_dot[i])
            .collect();
        let (n_matrix, m1_matrix) = assemble(bp, &a, &a_dot, Parts { n: true, m1: true })?;
        Ok(Self {
            a,
            n_matrix: n_matrix.expect("assembled"),
            m1_matrix: m1_matrix.expect("assembled"),
            theta: theta.to_vec(),
            alpha,
            nodes: bp.n,
        })
    }

    pub fn nodes_per_component(&self) -> usize {
        self.nodes
    }
}

impl KernelOperator for KernelSet {
    fn size(&self) -> usize {
        self.a.len()
    }

    fn apply_n(&self, x: &[f64], out: &mut [f64]) {
        self.n_matrix.matvec_scaled(x, 2.0 * PI / self.nodes as f64, out);
    }

    fn apply_m(&self, x: &[f64]) -> Vec<f64> {
        apply_m(x, self.nodes, &self.m1_matrix)
    }
}
