//! Restart-free GMRES for real nonsymmetric systems given only a matrix-vector
//! product. Arnoldi uses modified Gram–Schmidt and the least-squares problem
//! is updated with Givens rotations.

use crate::linalg::{dot, norm2};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GmresOptions {
    /// Stop when `‖b − A x‖₂ ≤ tol·‖b‖₂`.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for GmresOptions {
    fn default() -> Self {
        Self { tol: 1e-14, max_iter: 100 }
    }
}

#[derive(Debug, Clone)]
pub struct GmresOutcome {
    pub x: Vec<f64>,
    pub iterations: usize,
    /// Relative residual estimated by the Givens recurrence.
    pub residual: f64,
    /// Relative residual after each iteration, starting with the initial one.
    pub history: Vec<f64>,
    pub converged: bool,
}

pub fn gmres<F>(apply: F, b: &[f64], x0: Option<&[f64]>, opts: GmresOptions) -> GmresOutcome
where
    F: Fn(&[f64], &mut [f64]),
{
    let n = b.len();
    let bnorm = norm2(b);
    let mut x = x0.map_or_else(|| vec![0.0; n], <[f64]>::to_vec);
    if bnorm == 0.0 {
        return GmresOutcome { x: vec![0.0; n], iterations: 0, residual: 0.0, history: vec![0.0], converged: true };
    }
    let mut r = vec![0.0; n];
    apply(&x, &mut r);
    for (ri, bi) in r.iter_mut().zip(b) {
        *ri = bi - *ri;
    }
    let beta = norm2(&r);
    let mut history = vec![beta / bnorm];
    if beta <= opts.tol * bnorm {
        return GmresOutcome { x, iterations: 0, residual: beta / bnorm, history, converged: true };
    }

    let k_max = opts.max_iter.min(n);
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(k_max + 1);
    basis.push(r.iter().map(|v| v / beta).collect());
    // Hessenberg columns, each of length j + 2
    let mut h: Vec<Vec<f64>> = Vec::with_capacity(k_max);
    let mut cs: Vec<f64> = Vec::with_capacity(k_max);
    let mut sn: Vec<f64> = Vec::with_capacity(k_max);
    let mut g = vec![beta];
    let mut residual = beta;
    let mut iterations = 0;
    let mut w = vec![0.0; n];

    for j in 0..k_max {
        apply(&basis[j], &mut w);
        let mut col = vec![0.0; j + 2];
        for (i, v) in basis.iter().enumerate() {
            let hij = dot(&w, v);
            col[i] = hij;
            for (wk, vk) in w.iter_mut().zip(v) {
                *wk -= hij * vk;
            }
        }
        let hnext = norm2(&w);
        col[j + 1] = hnext;

        for i in 0..j {
            let t = cs[i] * col[i] + sn[i] * col[i + 1];
            col[i + 1] = -sn[i] * col[i] + cs[i] * col[i + 1];
            col[i] = t;
        }
        let (c, s) = givens(col[j], col[j + 1]);
        col[j] = c * col[j] + s * col[j + 1];
        col[j + 1] = 0.0;
        cs.push(c);
        sn.push(s);
        let gj = g[j];
        g[j] = c * gj;
        g.push(-s * gj);
        h.push(col);

        iterations = j + 1;
        residual = g[j + 1].abs();
        history.push(residual / bnorm);
        if residual <= opts.tol * bnorm || hnext == 0.0 {
            break;
        }
        basis.push(w.iter().map(|v| v / hnext).collect());
    }

    // back substitution on the triangular factor
    let k = iterations;
    let mut y = vec![0.0; k];
    for i in (0..k).rev() {
        let mut s = g[i];
        for l in i + 1..k {
            s -= h[l][i] * y[l];
        }
        y[i] = s / h[i][i];
    }
    for (l, yl) in y.iter().enumerate() {
        for (xi, vi) in x.iter_mut().zip(&basis[l]) {
            *xi += yl * vi;
        }
    }
    let rel = residual / bnorm;
    GmresOutcome { x, iterations, residual: rel, history, converged: rel <= opts.tol }
}

fn givens(a: f64, b: f64) -> (f64, f64) {
    if b == 0.0 {
        (1.0, 0.0)
    } else {
        let r = a.hypot(b);
        (a / r, b / r)
    }
}
