//! Fixtures shared by the benchmarks.

use stripmap_core::geometry::build_preimage_boundary;
use stripmap_core::preimage::initialize;
use stripmap_core::{BoundaryParametrization, Complex64, IterationConfig, StripSlitDomain};

/// Two vertical slits of length 1, centred at `±1.5`.
pub fn two_slits() -> StripSlitDomain {
    StripSlitDomain::from_endpoints(&[
        (Complex64::new(-1.5, -0.5), Complex64::new(-1.5, 0.5)),
        (Complex64::new(1.5, -0.5), Complex64::new(1.5, 0.5)),
    ])
    .expect("valid slits")
}

/// The first-guess preimage boundary of `domain` with `n` nodes per curve.
pub fn first_guess(domain: &StripSlitDomain, n: usize) -> BoundaryParametrization {
    let cfg = IterationConfig { n, ..Default::default() };
    let params = initialize(domain, &cfg).expect("initial ellipses");
    build_preimage_boundary(&params, n).expect("boundary")
}

/// Angles of the strip walls followed by the slit angles.
pub fn angles(domain: &StripSlitDomain) -> Vec<f64> {
    let mut theta = vec![0.0];
    theta.extend(domain.thetas());
    theta
}
