mod common;

use std::f64::consts::PI;

use hypfull::hypfun::{
    atkinson_bounds, dodecahedron_volume_closed_form, fullerene_bound, lob, lobachevsky, two_face_bound, v3, v8,
};
use proptest::prelude::*;

#[test]
fn matches_quadrature_on_fundamental_interval() {
    for i in 0..=64 {
        let theta = PI / 2.0 * i as f64 / 64.0;
        let q = common::lobachevsky_quadrature(theta);
        assert!((lob(theta) - q).abs() < 1e-12, "θ = {theta}: {} vs {q}", lob(theta));
    }
}

#[test]
fn matches_fourier_series() {
    for theta in [0.1, 0.5, 1.0, PI / 3.0, 2.0, 2.9, -1.3, 7.5] {
        let f = common::lobachevsky_fourier(theta, 2_000_000);
        assert!((lob(theta) - f).abs() < 1e-6, "θ = {theta}");
    }
}

#[test]
fn quadrature_oracle_reproduces_constants() {
    let q3 = 3.0 * common::lobachevsky_quadrature(PI / 3.0);
    let q8 = 8.0 * common::lobachevsky_quadrature(PI / 4.0);
    assert!((q3 - v3()).abs() < 1e-12);
    assert!((q8 - v8()).abs() < 1e-12);
    // printed values are truncated, not rounded
    assert!((0.0..1e-6).contains(&(q3 - 1.014941)));
    assert!((0.0..1e-6).contains(&(q8 - 3.663862)));
    // Λ(π/6) = (3/2) Λ(π/3)
    assert!((lob(PI / 6.0) - 1.5 * lob(PI / 3.0)).abs() < 1e-13);
}

#[test]
fn maximum_at_pi_over_six() {
    let m = lob(PI / 6.0);
    for i in 1..100 {
        let t = PI * i as f64 / 100.0;
        assert!(lob(t) <= m + 1e-15);
    }
}

#[test]
fn dodecahedron_closed_form_from_oracle() {
    // θ from cos(π/2 - θ) = 1/(2 cos(π/5)), with Λ evaluated by quadrature
    let theta = PI / 2.0 - (1.0 / (2.0 * (PI / 5.0).cos())).acos();
    let q = |x: f64| {
        let r = x.rem_euclid(PI);
        if r <= PI / 2.0 {
            common::lobachevsky_quadrature(r)
        } else {
            -common::lobachevsky_quadrature(PI - r)
        }
    };
    let v = 2.5 * (2.0 * q(theta) + q(theta + PI / 5.0) + q(theta - PI / 5.0) + q(PI / 2.0 - 2.0 * theta));
    assert!((v - dodecahedron_volume_closed_form()).abs() < 1e-11);
    assert!((v - 4.306208).abs() < 1e-6);
}

#[test]
fn rejects_non_finite() {
    assert!(lobachevsky(f64::NAN).is_err());
    assert!(lobachevsky(f64::INFINITY).is_err());
}

#[test]
fn bound_formulas_against_constants() {
    for n in (24..=120).step_by(2) {
        let (lo, hi) = atkinson_bounds(n).unwrap();
        assert!((lo - (n as f64 - 2.0) * v8() / 32.0).abs() < 1e-12);
        assert!((hi - (n as f64 - 10.0) * 5.0 * v3() / 8.0).abs() < 1e-12);
        let f = fullerene_bound(n).unwrap();
        assert!((f - (n as f64 - 14.0) * 5.0 * v3() / 8.0).abs() < 1e-12);
        assert!(lo < f && f < two_face_bound(n, 6, 6).unwrap() && f < hi);
    }
}

proptest! {
    #[test]
    fn odd(theta in -20.0f64..20.0) {
        prop_assert!((lob(-theta) + lob(theta)).abs() < 1e-13);
    }

    #[test]
    fn pi_periodic(theta in -20.0f64..20.0, k in -5i32..5) {
        prop_assert!((lob(theta + k as f64 * PI) - lob(theta)).abs() < 1e-12);
    }

    #[test]
    fn duplication(theta in -4.0f64..4.0) {
        // Λ(2θ) = 2Λ(θ) + 2Λ(θ + π/2)
        let lhs = lob(2.0 * theta);
        let rhs = 2.0 * lob(theta) + 2.0 * lob(theta + PI / 2.0);
        prop_assert!((lhs - rhs).abs() < 1e-12);
    }

    #[test]
    fn agrees_with_quadrature(theta in 0.0f64..PI / 2.0) {
        prop_assert!((lob(theta) - common::lobachevsky_quadrature(theta)).abs() < 1e-12);
    }
}
