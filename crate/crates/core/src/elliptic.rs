//! Complete elliptic integrals by the arithmetic–geometric mean, the Grötzsch
//! ring modulus `μ(r)`, and the closed-form capacities of a single slit.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};

const AGM_MAX_ITER: usize = 64;

/// Arithmetic–geometric mean of two non-negative numbers.
pub fn agm(mut a: f64, mut b: f64) -> f64 {
    for _ in 0..AGM_MAX_ITER {
        if (a - b).abs() <= 1e-16 * a {
            break;
        }
        let next = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = next;
    }
    0.5 * (a + b)
}

/// `√(1 − r²)` without cancellation near `r = 1`.
pub fn complementary(r: f64) -> f64 {
    ((1.0 - r) * (1.0 + r)).sqrt()
}

/// Complete elliptic integral of the first kind `K(r)` for modulus `r ∈ [0, 1)`.
pub fn elliptic_k(r: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&r) {
        return Err(Error::Domain(format!("K(r) needs 0 ≤ r < 1, got {r}")));
    }
    Ok(PI / (2.0 * agm(1.0, complementary(r))))
}

/// `μ(r) = (π/2)·K(√(1−r²))/K(r)` for `r ∈ (0, 1)`.
///
/// Evaluated as `(π/2)·AGM(1, r')/AGM(1, r)` so neither `r` nor `r'` is
/// reconstructed from the other.
pub fn mu(r: f64) -> Result<f64> {
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::Domain(format!("μ(r) needs 0 < r < 1, got {r}")));
    }
    Ok(mu_pair(r, complementary(r)))
}

/// `μ` from a modulus and its complement supplied independently, which keeps
/// full relative accuracy when `r` is close to 1.
fn mu_pair(r: f64, rc: f64) -> f64 {
    FRAC_PI_2 * agm(1.0, rc) / agm(1.0, r)
}

/// `cap(S, [−si, si]) = 2π/μ(sin s)` for `0 < s < π/2`.
pub fn exact_cap_vertical(s: f64) -> Result<f64> {
    if !(s > 0.0 && s < FRAC_PI_2) {
        return Err(Error::Domain(format!("vertical slit half-length must be in (0, π/2), got {s}")));
    }
    Ok(2.0 * PI / mu_pair(s.sin(), s.cos()))
}

/// `cap(S, [−s, s]) = 2π/μ(tanh s)` for `s > 0`.
pub fn exact_cap_horizontal(s: f64) -> Result<f64> {
    if !(s > 0.0 && s.is_finite()) {
        return Err(Error::Domain(format!("horizontal slit half-length must be positive, got {s}")));
    }
    let t = s.tanh();
    if t >= 1.0 {
        return Err(Error::Domain(format!("tanh({s}) rounds to 1")));
    }
    Ok(2.0 * PI / mu_pair(t, 1.0 / s.cosh()))
}
