//! Property tests for the numerical building blocks.

use std::f64::consts::{FRAC_PI_2, PI};

use proptest::prelude::*;

use crate::bie::cauchy_sum;
use crate::elliptic::{complementary, mu};
use crate::geometry::{node, parametrize_ellipse};
use crate::gmres::{gmres, GmresOptions};
use crate::kernel::{KernelOperator, KernelSet};
use crate::linalg::DenseMatrix;
use crate::spectral::{conjugate, trig_derivative_real};
use crate::{psi, psi_inv, BoundaryParametrization, Complex64, EllipseParams};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// A trig polynomial of degree below `n/2` and its exact derivative and conjugate.
fn trig_poly(coef: &[(f64, f64)], n: usize) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let mut f = vec![0.0; n];
    let mut df = vec![0.0; n];
    let mut cf = vec![0.0; n];
    for i in 0..n {
        let t = node(i, n);
        for (k, &(a, b)) in coef.iter().enumerate() {
            let k = (k + 1) as f64;
            let (s, co) = (k * t).sin_cos();
            f[i] += a * co + b * s;
            df[i] += k * (b * co - a * s);
            cf[i] += a * s - b * co;
        }
    }
    (f, df, cf)
}

proptest! {
    #[test]
    fn psi_inverts_psi_inv(x in -6.0f64..6.0, y in -1.55f64..1.55) {
        let z = c(x, y);
        let back = psi(psi_inv(z)).unwrap();
        prop_assert!((back - z).norm() <= 1e-13, "{z} -> {back}");
    }

    #[test]
    fn psi_maps_the_disk_into_the_strip(rho in 0.0f64..0.999, t in 0.0f64..(2.0 * PI)) {
        let w = Complex64::from_polar(rho, t);
        let z = psi(w).unwrap();
        prop_assert!(z.im.abs() < FRAC_PI_2);
        prop_assert!((psi_inv(z) - w).norm() <= 1e-12 / (1.0 - rho));
    }

    #[test]
    fn spectral_derivative_and_conjugate_are_exact(coef in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..60)) {
        let n = 128;
        let (f, df, cf) = trig_poly(&coef, n);
        let d = trig_derivative_real(&f);
        let g = conjugate(&f);
        let scale = coef.len() as f64;
        for i in 0..n {
            prop_assert!((d[i] - df[i]).abs() <= 1e-12 * scale * scale);
            prop_assert!((g[i] - cf[i]).abs() <= 1e-12 * scale);
        }
    }

    #[test]
    fn conjugating_twice_removes_the_mean_and_flips_sign(coef in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..30), mean in -2.0f64..2.0) {
        let n = 64;
        let (f, _, _) = trig_poly(&coef, n);
        let shifted: Vec<f64> = f.iter().map(|v| v + mean).collect();
        let gg = conjugate(&conjugate(&shifted));
        for i in 0..n {
            prop_assert!((gg[i] + f[i]).abs() <= 1e-12);
        }
    }

    // below r ≈ 0.02 the round trip r → r' → r'' cancels and costs ~1e-16/r² in μ
    #[test]
    fn grotzsch_modulus_identity(r in 0.02f64..0.999999) {
        let p = mu(r).unwrap() * mu(complementary(r)).unwrap();
        prop_assert!((p - PI * PI / 4.0).abs() <= 1e-12);
    }

    #[test]
    fn grotzsch_modulus_decreases(r in 0.01f64..0.98, dr in 0.001f64..0.01) {
        prop_assert!(mu(r).unwrap() > mu(r + dr).unwrap());
    }

    #[test]
    fn cauchy_sum_reproduces_polynomials(
        coef in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..20),
        rho in 0.0f64..0.8,
        t in 0.0f64..(2.0 * PI),
    ) {
        let n = 128;
        let p = |z: Complex64| coef.iter().rev().fold(c(0.0, 0.0), |acc, &(a, b)| acc * z + c(a, b));
        let nodes: Vec<Complex64> = (0..n).map(|i| Complex64::from_polar(1.0, node(i, n))).collect();
        let derivs: Vec<Complex64> = nodes.iter().map(|z| c(0.0, 1.0) * z).collect();
        let values: Vec<Complex64> = nodes.iter().map(|&z| p(z)).collect();
        let w = Complex64::from_polar(rho, t);
        let got = cauchy_sum(&nodes, &derivs, &values, &[w]).unwrap()[0];
        prop_assert!((got - p(w)).norm() <= 1e-12 * coef.len() as f64);
    }

    #[test]
    fn ellipse_samples_satisfy_the_conic_equation(
        x in -2.0f64..2.0, y in -0.5f64..0.5, major in 0.1f64..2.0, theta in -1.5f64..1.5, r in 0.05f64..1.0,
    ) {
        let p = EllipseParams { center: c(x, y), major, theta, r };
        let (pts, ders) = parametrize_ellipse(&p, 32);
        let rot = Complex64::from_polar(1.0, -theta);
        for (z, d) in pts.iter().zip(&ders) {
            let q = (z - p.center) * rot;
            let (u, v) = (q.re / (0.5 * major), q.im / (0.5 * major * r));
            prop_assert!((u * u + v * v - 1.0).abs() <= 1e-12);
            // tangent is perpendicular to the gradient of the conic
            let dq = d * rot;
            let dot = u * dq.re / (0.5 * major) + v * dq.im / (0.5 * major * r);
            prop_assert!(dot.abs() <= 1e-12 * (1.0 + d.norm()));
        }
    }

    #[test]
    fn gmres_solution_is_linear_in_the_right_hand_side(
        b1 in prop::collection::vec(-1.0f64..1.0, 24),
        b2 in prop::collection::vec(-1.0f64..1.0, 24),
        s in -3.0f64..3.0,
    ) {
        let n = 24;
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|i| (0..n).map(|j| if i == j { 4.0 } else { ((i * 7 + j * 3) % 11) as f64 / 22.0 - 0.25 }).collect())
            .collect();
        let a = DenseMatrix::from_rows(&rows);
        let opts = GmresOptions { tol: 1e-14, max_iter: 100 };
        let solve = |b: &[f64]| gmres(|x, y| a.matvec_scaled(x, 1.0, y), b, None, opts).x;
        let combo: Vec<f64> = b1.iter().zip(&b2).map(|(x, y)| x + s * y).collect();
        let (x1, x2, x) = (solve(&b1), solve(&b2), solve(&combo));
        for i in 0..n {
            prop_assert!((x[i] - x1[i] - s * x2[i]).abs() <= 1e-12 * (1.0 + s.abs()));
        }
    }

    #[test]
    fn neumann_operator_is_linear(
        g1 in prop::collection::vec(-1.0f64..1.0, 64),
        g2 in prop::collection::vec(-1.0f64..1.0, 64),
        s in -2.0f64..2.0,
    ) {
        let bp = BoundaryParametrization::unit_circle(64).unwrap();
        let ks = KernelSet::new(&bp, &[0.3], c(0.1, -0.2)).unwrap();
        let combo: Vec<f64> = g1.iter().zip(&g2).map(|(x, y)| x + s * y).collect();
        let (m1, m2, m) = (ks.apply_m(&g1), ks.apply_m(&g2), ks.apply_m(&combo));
        let mut n1 = vec![0.0; 64];
        let mut n2 = vec![0.0; 64];
        let mut n = vec![0.0; 64];
        ks.apply_n(&g1, &mut n1);
        ks.apply_n(&g2, &mut n2);
        ks.apply_n(&combo, &mut n);
        for i in 0..64 {
            prop_assert!((m[i] - m1[i] - s * m2[i]).abs() <= 1e-12);
            prop_assert!((n[i] - n1[i] - s * n2[i]).abs() <= 1e-12);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn capacity_respects_the_symmetries_of_the_strip(
        x in -1.0f64..1.0, y in -0.6f64..0.6, len in 0.3f64..1.2, angle in -1.5f64..1.5,
    ) {
        use crate::{capacity, CondenserSpec, IterationConfig, StripSlitDomain};
        let h = Complex64::from_polar(0.5 * len, angle);
        let (a, b) = (c(x, y) - h, c(x, y) + h);
        let cfg = IterationConfig { n: 256, ..Default::default() };
        let cap = |a: Complex64, b: Complex64| {
            let d = StripSlitDomain::from_endpoints(&[(a, b)]).unwrap();
            capacity(&CondenserSpec::classical(d), &cfg).unwrap().cap
        };
        let base = cap(a, b);
        prop_assert!((cap(-a, -b) - base).abs() <= 1e-9 * base);
        prop_assert!((cap(a.conj(), b.conj()) - base).abs() <= 1e-9 * base);
    }
}
