//! Modified Bessel functions and the disc model against an independent
//! trapezoid-rule evaluation of `K_m(x) = ∫₀^∞ e^{−x cosh t} cosh(mt) dt`.

use proptest::prelude::*;
use robin_spectra::exact_models::*;

/// Trapezoid rule; spectrally accurate for this doubly exponentially
/// decaying, even integrand.
fn k_trapezoid(m: usize, x: f64) -> f64 {
    let mf = m as f64;
    let log_f = |t: f64| -x * t.cosh() + mf * t;
    let peak_t = if mf > x { (mf / x).asinh() } else { 0.0 };
    let peak = log_f(peak_t);
    let mut end = peak_t + 1.0;
    while log_f(end) > peak - 50.0 {
        end += 0.5;
    }
    let n = 8000;
    let h = end / n as f64;
    let f = |t: f64| (log_f(t) - peak).exp() * 0.5 * (1.0 + (-2.0 * mf * t).exp());
    let sum: f64 = (1..n).map(|i| f(i as f64 * h)).sum::<f64>() + 0.5 * (f(0.0) + f(end));
    sum * h * peak.exp()
}

#[test]
fn k_matches_trapezoid() {
    for m in 0..=10 {
        for &x in &[0.1, 0.3, 1.0, 2.0, 2.5, 5.0, 12.0, 30.0, 50.0] {
            let k = bessel_k(m, x).unwrap();
            let q = k_trapezoid(m, x);
            assert!(((k - q) / q).abs() < 1e-10, "m={m} x={x}: {k} vs {q}");
        }
    }
}

#[test]
fn tabulated_values() {
    assert!((bessel_k(0, 1.0f64).unwrap() - 0.42102443824070834).abs() < 1e-13);
    assert!((bessel_k(1, 1.0f64).unwrap() - 0.6019072301972346).abs() < 1e-13);
}

#[test]
fn logderiv_limits() {
    assert!(bessel_logderiv(0, 1e-6).unwrap() < 0.1);
    assert!((bessel_logderiv(2, 0.01f64).unwrap() - 2.0).abs() < 1e-3);
    let mut prev = f64::INFINITY;
    for &x in &[20.0, 40.0, 80.0, 160.0] {
        for m in 0..3 {
            let mf = m as f64;
            let gap = (bessel_logderiv(m, x).unwrap() - (x + 0.5 + (4.0 * mf * mf - 1.0) / (8.0 * x))).abs();
            if m == 2 {
                assert!(gap < prev);
                prev = gap;
            }
        }
    }
}

#[test]
fn disc_examples() {
    let d = disc_exterior_eigenvalue(1.0f64, 5.0, 0).unwrap();
    assert!((d.u_root - 4.525).abs() < 5e-3, "{}", d.u_root);
    assert!(d.lambda > -25.0);
    assert!(disc_exterior_eigenvalue(1.0, 1.0, 1).is_err());
    assert_eq!(disc_exterior_asymptotic(1.0, 10.0, 0), -90.5);
    assert_eq!(d.multiplicity, 1);
    assert_eq!(disc_exterior_eigenvalue(1.0, 5.0, 2).unwrap().multiplicity, 2);
}

#[test]
fn large_radius_tends_to_halfplane() {
    let beta = 3.0f64;
    let far = disc_exterior_eigenvalue(1e3, beta, 0).unwrap().lambda;
    assert!((far - halfplane_threshold(beta)).abs() < 1e-2);
}

#[test]
fn quadrant() {
    assert_eq!(quadrant_eigenvalue(3.0), -18.0);
    let diff = (quadrant_numeric(4.0f64, 3.0).unwrap() + 18.0).abs();
    assert!(diff <= 8.0 * 9.0 * (-12.0f64).exp());
    assert_eq!(halfplane_threshold(10.0), -100.0);
}

proptest! {
    #[test]
    fn k_positive_decreasing(m in 0usize..12, x in 0.05f64..60.0) {
        let k = bessel_k(m, x).unwrap();
        prop_assert!(k > 0.0);
        prop_assert!(bessel_k(m, x * 1.01).unwrap() < k);
    }

    #[test]
    fn logderiv_increasing_above_x(m in 0usize..12, x in 0.05f64..60.0) {
        let l = bessel_logderiv(m, x).unwrap();
        prop_assert!(l > x);
        prop_assert!(bessel_logderiv(m, x * 1.01).unwrap() > l);
    }

    #[test]
    fn disc_root_in_range(r in 0.5f64..3.0, beta in 4.0f64..60.0, m in 0usize..3) {
        let d = disc_exterior_eigenvalue(r, beta, m).unwrap();
        prop_assert!(d.lambda < 0.0 && d.lambda > -beta * beta);
        let l = bessel_logderiv(m, d.u_root).unwrap();
        prop_assert!((l - beta * r).abs() < 1e-8 * beta * r);
    }
}
