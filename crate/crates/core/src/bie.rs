//! Solving `(I − N)ρ = −Mγ`, recovering the piecewise constant `h`, and
//! Cauchy-integral evaluation of analytic functions from boundary values.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::BoundaryParametrization;
use crate::gmres::{gmres, GmresOptions};
use crate::kernel::KernelOperator;
use crate::linalg::norm_inf;

/// Points closer than this to a boundary node are rejected by [`cauchy_eval`].
pub const ON_BOUNDARY_TOL: f64 = 1e-13;

/// Iteration statistics of one Krylov solve.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SolverStats {
    pub iterations: usize,
    /// Final relative residual `‖b − (I−N)ρ‖₂/‖b‖₂`.
    pub residual: f64,
    pub history: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct BieSolution {
    pub rho: Vec<f64>,
    /// `h_0, …, h_m`, the per-component means of `[Mρ − (I−N)γ]/2`.
    pub h: Vec<f64>,
    /// Standard deviation of that field on each component; zero in exact arithmetic.
    pub h_spread: Vec<f64>,
    pub gamma: Vec<f64>,
    pub stats: SolverStats,
}

impl BieSolution {
    /// `h` expanded to one value per node.
    pub fn h_samples(&self, n: usize) -> Vec<f64> {
        self.h.iter().flat_map(|&h| std::iter::repeat(h).take(n)).collect()
    }
}

fn check_options(opts: &GmresOptions) -> Result<()> {
    if !(opts.tol > 0.0 && opts.tol <= 1e-6) {
        return Err(Error::Domain(format!("solver tolerance {} not in (0, 1e-6]", opts.tol)));
    }
    if opts.max_iter == 0 {
        return Err(Error::Domain("solver needs at least one iteration".into()));
    }
    Ok(())
}

/// Solves `(I − N)ρ = −Mγ` by restart-free GMRES, optionally warm-started.
pub fn solve_rho(
    op: &dyn KernelOperator,
    gamma: &[f64],
    initial: Option<&[f64]>,
    opts: GmresOptions,
) -> Result<(Vec<f64>, SolverStats)> {
    check_options(&opts)?;
    if gamma.len() != op.size() {
        return Err(Error::Geometry(format!("γ has {} samples, expected {}", gamma.len(), op.size())));
    }
    if gamma.iter().any(|g| !g.is_finite()) {
        return Err(Error::Domain("right-hand side γ is not finite".into()));
    }
    let rhs: Vec<f64> = op.apply_m(gamma).into_iter().map(|v| -v).collect();
    let out = gmres(|x, y| op.apply_i_minus_n(x, y), &rhs, initial, opts);
    if !out.converged {
        return Err(Error::NonConvergence { iterations: out.iterations, residual: out.residual, history: out.history });
    }
    Ok((out.x, SolverStats { iterations: out.iterations, residual: out.residual, history: out.history }))
}

/// Per-component mean and standard deviation of `[Mρ − (I−N)γ]/2`.
pub fn compute_h(op: &dyn KernelOperator, n: usize, rho: &[f64], gamma: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let m_rho = op.apply_m(rho);
    let mut ing = vec![0.0; gamma.len()];
    op.apply_i_minus_n(gamma, &mut ing);
    let field: Vec<f64> = m_rho.iter().zip(&ing).map(|(a, b)| 0.5 * (a - b)).collect();
    field
        .chunks(n)
        .map(|c| {
            let mean = c.iter().sum::<f64>() / c.len() as f64;
            let var = c.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / c.len() as f64;
            (mean, var.sqrt())
        })
        .unzip()
}

/// Solves the equation and recovers `h` in one go.
pub fn solve(
    op: &dyn KernelOperator,
    n: usize,
    gamma: Vec<f64>,
    initial: Option<&[f64]>,
    opts: GmresOptions,
) -> Result<BieSolution> {
    let (rho, stats) = solve_rho(op, &gamma, initial, opts)?;
    let (h, h_spread) = compute_h(op, n, &rho, &gamma);
    Ok(BieSolution { rho, h, h_spread, gamma, stats })
}

/// `‖(I−N)ρ + Mγ‖_∞ / ‖Mγ‖_∞`.
pub fn residual_inf(op: &dyn KernelOperator, rho: &[f64], gamma: &[f64]) -> f64 {
    let mg = op.apply_m(gamma);
    let mut r = vec![0.0; rho.len()];
    op.apply_i_minus_n(rho, &mut r);
    let num = norm_inf(&r.iter().zip(&mg).map(|(a, b)| a + b).collect::<Vec<_>>());
    let den = norm_inf(&mg);
    if den == 0.0 {
        num
    } else {
        num / den
    }
}

/// Normalised trapezoidal Cauchy sum over a sampled closed contour (which may
/// consist of several components):
///
/// ```text
/// f(w) ≈ Σ f(η_i)·η'_i/(η_i − w)  /  Σ η'_i/(η_i − w)
/// ```
///
/// The denominator is the same sum for `f ≡ 1`, which equals `2πi·n/2π` for
/// interior points of a positively oriented boundary.
pub fn cauchy_sum(
    nodes: &[Complex64],
    derivs: &[Complex64],
    values: &[Complex64],
    points: &[Complex64],
) -> Result<Vec<Complex64>> {
    points
        .iter()
        .map(|&w| {
            let mut num = Complex64::new(0.0, 0.0);
            let mut den = Complex64::new(0.0, 0.0);
            let mut dmin = f64::INFINITY;
            for ((&e, &d), &f) in nodes.iter().zip(derivs).zip(values) {
                let diff = e - w;
                dmin = dmin.min(diff.norm());
                let q = d / diff;
                num += f * q;
                den += q;
            }
            if dmin < ON_BOUNDARY_TOL {
                return Err(Error::OnBoundary(w, dmin));
            }
            Ok(num / den)
        })
        .collect()
}

/// Cauchy evaluation of a function analytic in the domain bounded by `bp`.
pub fn cauchy_eval(
    bp: &BoundaryParametrization,
    boundary_values: &[Complex64],
    points: &[Complex64],
) -> Result<Vec<Complex64>> {
    if boundary_values.len() != bp.total() {
        return Err(Error::Geometry(format!(
            "{} boundary values for {} nodes",
            boundary_values.len(),
            bp.total()
        )));
    }
    cauchy_sum(&bp.eta, &bp.eta_dot, boundary_values, points)
}

/// Flags points within five local node spacings of the sampled boundary,
/// where trapezoidal Cauchy sums lose accuracy.
pub fn near_boundary(nodes: &[Complex64], derivs: &[Complex64], n: usize, points: &[Complex64]) -> Vec<bool> {
    let h = 2.0 * PI / n as f64;
    points
        .iter()
        .map(|&w| {
            nodes
                .iter()
                .zip(derivs)
                .any(|(&e, &d)| (e - w).norm() < 5.0 * h * d.norm())
        })
        .collect()
}
