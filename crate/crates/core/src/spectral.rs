//! FFT-based operations on samples of 2π-periodic functions taken at the
//! equidistant nodes `t_i = 2πi/n`.
//!
//! Everything here assumes `n` is a power of two. The Nyquist mode is dropped
//! by differentiation and conjugation; for resolved boundary data it carries
//! only rounding noise.

use std::cell::RefCell;
use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn plans(n: usize) -> (Arc<dyn Fft<f64>>, Arc<dyn Fft<f64>>) {
    PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        (p.plan_fft_forward(n), p.plan_fft_inverse(n))
    })
}

/// Signed wavenumber of FFT bin `k`; the Nyquist bin maps to `None`.
#[inline]
fn wavenumber(k: usize, n: usize) -> Option<f64> {
    let half = n / 2;
    if k < half {
        Some(k as f64)
    } else if k == half {
        None
    } else {
        Some(k as f64 - n as f64)
    }
}

fn apply_multiplier(samples: &[Complex64], mult: impl Fn(Option<f64>) -> Complex64) -> Vec<Complex64> {
    let n = samples.len();
    debug_assert!(n.is_power_of_two(), "spectral routines need a power-of-two length");
    let (fwd, inv) = plans(n);
    let mut buf = samples.to_vec();
    fwd.process(&mut buf);
    let scale = 1.0 / n as f64;
    for (k, c) in buf.iter_mut().enumerate() {
        *c *= mult(wavenumber(k, n)) * scale;
    }
    inv.process(&mut buf);
    buf
}

/// Spectral derivative of one period of samples: the coefficient of `e^{ikt}`
/// is multiplied by `ik`.
pub fn trig_derivative(samples: &[Complex64]) -> Vec<Complex64> {
    apply_multiplier(samples, |k| match k {
        Some(k) => Complex64::new(0.0, k),
        None => Complex64::new(0.0, 0.0),
    })
}

/// Real-valued variant of [`trig_derivative`].
pub fn trig_derivative_real(samples: &[f64]) -> Vec<f64> {
    let z: Vec<Complex64> = samples.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    trig_derivative(&z).into_iter().map(|c| c.re).collect()
}

/// Periodic conjugate function (Hilbert transform on the circle),
///
/// ```text
/// (Kγ)(s) = (1/2π) PV ∫ cot((s−t)/2) γ(t) dt,
/// ```
///
/// realised as the multiplier `−i·sign(k)` with the mean removed.
pub fn conjugate(samples: &[f64]) -> Vec<f64> {
    let z: Vec<Complex64> = samples.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    apply_multiplier(&z, |k| match k {
        Some(k) if k > 0.0 => Complex64::new(0.0, -1.0),
        Some(k) if k < 0.0 => Complex64::new(0.0, 1.0),
        _ => Complex64::new(0.0, 0.0),
    })
    .into_iter()
    .map(|c| c.re)
    .collect()
}

/// Trigonometric interpolant of one period of samples, evaluable off-grid.
#[derive(Debug, Clone)]
pub struct TrigInterpolant {
    /// (wavenumber, coefficient) pairs, Nyquist excluded.
    coeffs: Vec<(f64, Complex64)>,
    nyquist: Complex64,
    n: usize,
}

impl TrigInterpolant {
    pub fn new(samples: &[Complex64]) -> Self {
        let n = samples.len();
        let (fwd, _) = plans(n);
        let mut buf = samples.to_vec();
        fwd.process(&mut buf);
        let scale = 1.0 / n as f64;
        let mut coeffs = Vec::with_capacity(n);
        let mut nyquist = Complex64::new(0.0, 0.0);
        for (k, c) in buf.into_iter().enumerate() {
            match wavenumber(k, n) {
                Some(w) => coeffs.push((w, c * scale)),
                None => nyquist = c * scale,
            }
        }
        Self { coeffs, nyquist, n }
    }

    pub fn from_real(samples: &[f64]) -> Self {
        let z: Vec<Complex64> = samples.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Self::new(&z)
    }

    /// Value of the `order`-th derivative at parameter `t`.
    ///
    /// The Nyquist mode is included (as `cos(nt/2)`) only for `order == 0`,
    /// so the interpolant reproduces the samples exactly at the nodes.
    pub fn eval(&self, t: f64, order: u32) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for &(k, c) in &self.coeffs {
            let factor = Complex64::new(0.0, k).powu(order);
            acc += c * factor * Complex64::from_polar(1.0, k * t);
        }
        if order == 0 {
            acc += self.nyquist * (0.5 * self.n as f64 * t).cos();
        }
        acc
    }

    /// Parameter value of node `i`.
    pub fn node(&self, i: usize) -> f64 {
        2.0 * PI * i as f64 / self.n as f64
    }
}
