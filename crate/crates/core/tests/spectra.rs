//! Eigensolver, comparison operator, strip models and trial bounds.

use nalgebra::{DMatrix, SymmetricEigen};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use robin_spectra::comparison::*;
use robin_spectra::curve::CurveSpec;
use robin_spectra::eigensolve::*;
use robin_spectra::fem::LongitudinalEnds;
use robin_spectra::linalg::{CooBuilder, CsrMatrix};
use robin_spectra::profile::ProfileSpec;
use robin_spectra::strip::*;
use robin_spectra::transverse::{robin_robin_eigenvalue, t_dirichlet_eigenvalue};
use robin_spectra::variational::{trial_rayleigh_bound, TrialFunctionSpec};
use robin_spectra::{Curve, Pencil, Strip};

/// Generalized eigenvalues of `(A, B)` via `L⁻¹ A L⁻ᵀ`.
fn dense_oracle(a: &CsrMatrix<f64>, b: &CsrMatrix<f64>) -> Vec<f64> {
    let n = a.dim();
    let to = |m: &CsrMatrix<f64>| DMatrix::from_fn(n, n, |i, j| m.get(i, j));
    let l = to(b).cholesky().expect("B is SPD").l();
    let li = l.try_inverse().unwrap();
    let c = &li * to(a) * li.transpose();
    let c = (&c + c.transpose()) * 0.5;
    let mut v: Vec<f64> = SymmetricEigen::new(c).eigenvalues.iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

/// Random banded symmetric `A` and SPD banded `B`.
fn random_pencil(n: usize, band: usize, seed: u64) -> Pencil {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut a = CooBuilder::new(n);
    let mut b = CooBuilder::new(n);
    for i in 0..n {
        a.push(i, i, rng.gen_range(-5.0..5.0) + 2.0 * band as f64);
        b.push(i, i, 2.0 * band as f64 + 1.0);
        for j in i + 1..(i + band + 1).min(n) {
            a.push_sym(i, j, rng.gen_range(-1.0..1.0));
            b.push_sym(i, j, rng.gen_range(-0.9..0.9));
        }
    }
    Pencil::new(a.build(), b.build(), "random")
}

#[test]
fn tridiagonal_example() {
    let a = CsrMatrix::from_dense(&[vec![2.0, -1.0, 0.0], vec![-1.0, 2.0, -1.0], vec![0.0, -1.0, 2.0]]);
    let p = Pencil::new(a, CsrMatrix::identity(3), "tridiag");
    let v = lowest_eigenpairs(&p, 3, 1e-12).unwrap().values;
    let s = 2f64.sqrt();
    for (x, e) in v.iter().zip([2.0 - s, 2.0, 2.0 + s]) {
        assert!((x - e).abs() < 1e-12);
    }
    let d = Pencil::new(CsrMatrix::from_dense(&[vec![1.0, 0.0, 0.0], vec![0.0, 2.0, 0.0], vec![0.0, 0.0, 3.0]]), CsrMatrix::identity(3), "diag");
    assert!((lowest_eigenpairs(&d, 1, 1e-12).unwrap().values[0] - 1.0).abs() < 1e-14);
}

#[test]
fn dense_path_matches_nalgebra() {
    let p = random_pencil(50, 49, 3);
    let got = lowest_eigenpairs(&p, 5, 1e-10).unwrap().values;
    let want = dense_oracle(&p.a, &p.b);
    for (g, w) in got.iter().zip(&want) {
        assert!((g - w).abs() < 1e-10 * w.abs().max(1.0), "{g} vs {w}");
    }
}

#[test]
fn sparse_path_matches_nalgebra() {
    let p = random_pencil(700, 4, 11);
    let got = lowest_eigenpairs(&p, 6, 1e-10).unwrap().values;
    let want = dense_oracle(&p.a, &p.b);
    for (g, w) in got.iter().zip(&want) {
        assert!((g - w).abs() < 1e-8 * w.abs().max(1.0), "{g} vs {w}");
    }
}

#[test]
fn classification() {
    let s = Spectrum { values: vec![-110.0, -99.0, -50.0], vectors: None, residuals: vec![0.0; 3], threshold: None, discrete_flags: vec![] };
    assert_eq!(classify_discrete(s, -100.0, 0.5).discrete_flags, [true, false, false]);
    let empty = Spectrum::<f64> { values: vec![], vectors: None, residuals: vec![], threshold: None, discrete_flags: vec![] };
    assert!(classify_discrete(empty, 0.0, 0.0).discrete_flags.is_empty());
}

#[test]
fn comparison_examples() {
    let tau = 2.0 * std::f64::consts::PI;
    let free = Comparison1DProblem::from_profile(ProfileSpec::Zero, ComparisonGeometry::Circle { perimeter: tau }, 512);
    assert!(mu_eigenvalues(&free, 1, 1e-9).unwrap().values[0].abs() < 1e-10);
    let unit = Comparison1DProblem::from_profile(ProfileSpec::Constant { value: 1.0 }, ComparisonGeometry::Circle { perimeter: tau }, 1024);
    let mu = mu_eigenvalues(&unit, 5, 1e-9).unwrap().values;
    for (m, e) in mu.iter().zip([-0.25, 0.75, 0.75, 3.75, 3.75]) {
        assert!((m - e).abs() < 1e-4, "{m} vs {e}");
    }
    let s = 10.0;
    let line = Comparison1DProblem::from_profile(ProfileSpec::Zero, ComparisonGeometry::LineTruncated { s_trunc: s }, 1024);
    let mu1 = mu_eigenvalues(&line, 1, 1e-9).unwrap().values[0];
    assert!((mu1 - (std::f64::consts::PI / (2.0 * s)).powi(2)).abs() < 1e-7);
    assert_eq!(negative_count(&line).unwrap(), 0);
}

#[test]
fn truncation_error_decays_with_window() {
    let sech = |s: f64| Comparison1DProblem::from_profile(ProfileSpec::Sech { amp: 1.0, center: 0.0, width: 1.0 }, ComparisonGeometry::LineTruncated { s_trunc: s }, (s * 50.0) as usize);
    let short = truncation_error(&sech(5.0), 1, 1e-10).unwrap();
    let long = truncation_error(&sech(20.0), 1, 1e-10).unwrap();
    assert!(long < short / 10.0, "{long} vs {short}");
}

fn straight() -> Curve {
    CurveSpec::Straight.build().unwrap()
}

fn small_mesh() -> StripMesh {
    StripMesh { n_s: 24, n_u: 8, degree_s: 3, degree_u: 4, stretch: 1.0 }
}

#[test]
fn flat_strip_separates() {
    let (beta, a, s) = (5.0, 3.0, 4.0);
    let m = Strip::new(straight(), StripSide::Interior, beta).with_width(a).with_truncation(s).with_mesh(StripMesh { n_u: 12, ..small_mesh() });
    let v = strip_eigenvalues(&m, 1, 1e-10).unwrap().values[0];
    let exact = t_dirichlet_eigenvalue(a, beta).unwrap() + (std::f64::consts::PI / (2.0 * s)).powi(2);
    assert!((v - exact).abs() < 1e-6 * exact.abs(), "{v} vs {exact}");
    let sep = separated_bounds(&m, 1).unwrap();
    assert!((sep.upper[0] - sep.lower[0]).abs() < 0.05, "{sep:?}");
}

#[test]
fn flat_waveguide() {
    let m = Strip::new(straight(), StripSide::Waveguide { d: 1.0 }, 1.0)
        .with_truncation(4.0)
        .with_ends(LongitudinalEnds::Neumann)
        .with_mesh(StripMesh { n_s: 8, n_u: 16, degree_s: 1, degree_u: 4, stretch: 0.0 });
    let v = strip_eigenvalues(&m, 1, 1e-10).unwrap().values[0];
    let exact = robin_robin_eigenvalue(1.0, 1.0, -1.0).unwrap();
    assert!(((v - exact) / exact).abs() < 1e-8);
    assert_eq!(m.threshold().unwrap(), exact);
}

#[test]
fn disc_exterior_enclosed() {
    let circle: Curve = CurveSpec::Circle { radius: 1.0 }.build().unwrap();
    let beta = 6.0;
    let m = Strip::new(circle, StripSide::Exterior, beta).with_mesh(StripMesh { n_s: 64, n_u: 12, degree_s: 3, degree_u: 4, stretch: 2.0 });
    let e = bracket_eigenvalues(&m, 1, 1e-10).unwrap();
    let exact = robin_spectra::exact_models::disc_exterior_eigenvalue(1.0, beta, 0).unwrap().lambda;
    assert!(e.ordered());
    assert!(e.lower[0] <= exact + 1e-6 && exact <= e.upper[0] + 1e-6, "{e:?} vs {exact}");
}

#[test]
fn convex_bump_binds_concave_does_not() {
    let bump = |amp: f64| -> Curve {
        CurveSpec::FromCurvature { profile: ProfileSpec::Sech { amp, center: 0.0, width: 1.0 }, window: [-30.0, 30.0], anchor: Some(0.0), initial_angle: 0.0, closed: false }
            .build()
            .unwrap()
    };
    let model = |c: Curve| {
        Strip::new(c, StripSide::Interior, 10.0)
            .with_truncation(10.0)
            .with_ends(LongitudinalEnds::Neumann)
            .with_mesh(StripMesh { n_s: 100, n_u: 12, degree_s: 2, degree_u: 4, stretch: 2.0 })
    };
    assert!(!weighted_form_check(&model(bump(1.0)), 1e-2).unwrap());
    let flat = Strip::new(straight(), StripSide::Interior, 5.0).with_truncation(6.0).with_ends(LongitudinalEnds::Neumann).with_mesh(small_mesh());
    assert!(concavity_check(&flat, 1e-2).unwrap());
    assert!(concavity_check(&model(bump(1.0)), 1e-2).is_err());
}

#[test]
fn trial_quotient_bounds_eigenvalue() {
    let bump: Curve = CurveSpec::LineBump { separation: 8.0 }.build().unwrap();
    let beta = 20.0;
    let m = Strip::new(bump, StripSide::Interior, beta).with_truncation(8.0).with_mesh(StripMesh { n_s: 160, n_u: 12, degree_s: 2, degree_u: 4, stretch: 2.0 });
    let lambda = strip_eigenvalues(&m, 1, 1e-10).unwrap().values[0];
    let spec = TrialFunctionSpec::defaults(&m, 1).unwrap();
    let q = trial_rayleigh_bound(&m, &spec).unwrap().quotient;
    assert!(q >= lambda - 1e-6, "{q} < {lambda}");
    // Stays within C β^{2/3} of −(β + γ*/2)², C ≈ 6 for this curve.
    let gamma_star = m.stats().unwrap().gamma_star;
    let c = (q + (beta + gamma_star / 2.0).powi(2)) / beta.powf(2.0 / 3.0);
    assert!(c > 0.0 && c < 7.0, "{c}");
}

#[test]
fn flat_trial_stays_above_threshold() {
    let m = Strip::new(straight(), StripSide::Interior, 10.0).with_truncation(8.0);
    let spec = TrialFunctionSpec::defaults(&m, 1).unwrap();
    assert!(trial_rayleigh_bound(&m, &spec).unwrap().quotient >= -100.0);
}

#[test]
fn sweep_report_shape() {
    let bump: Curve = CurveSpec::LineBump { separation: 8.0 }.build().unwrap();
    let r = robin_spectra::asymptotics::sweep(&[6.0, 8.0, 10.0, 12.0], 1, 1e-9, |beta| {
        Ok(Strip::new(bump.clone(), StripSide::Interior, beta).with_truncation(6.0).with_mesh(StripMesh { n_s: 60, n_u: 8, degree_s: 2, degree_u: 3, stretch: 1.0 }))
    })
    .unwrap();
    assert_eq!(r.computed.len(), 4);
    assert!(r.computed_lower.iter().zip(&r.computed).all(|(l, u)| l[0] <= u[0]));
    assert!(r.fitted_exponent[0].is_some());
    assert_eq!(r.bound_state_onset(1), Some(6.0));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn bracketing_order_holds(beta in 6.0f64..12.0, sep in 4.0f64..10.0, exterior in any::<bool>()) {
        let c: Curve = CurveSpec::LineBump { separation: sep }.build().unwrap();
        let side = if exterior { StripSide::Exterior } else { StripSide::Interior };
        let m = Strip::new(c, side, beta).with_truncation(6.0).with_mesh(StripMesh { n_s: 48, n_u: 8, degree_s: 2, degree_u: 3, stretch: 1.0 });
        let e = bracket_eigenvalues(&m, 2, 1e-9).unwrap();
        prop_assert!(e.ordered());
    }

    #[test]
    fn solver_is_seed_independent(seed in 0u64..1000) {
        let p = random_pencil(500, 3, 5);
        let opts = SolverOptions { seed, tol: 1e-10, ..SolverOptions::default() };
        let a = lowest_eigenpairs_with(&p, 3, &opts).unwrap().values;
        let b = lowest_eigenpairs(&p, 3, 1e-10).unwrap().values;
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() < 1e-8 * y.abs().max(1.0));
        }
    }
}
