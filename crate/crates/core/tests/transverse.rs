//! Transverse interval problems against a lumped finite-difference oracle
//! diagonalized by nalgebra, with Richardson extrapolation.

use nalgebra::{DMatrix, SymmetricEigen};
use proptest::prelude::*;
use robin_spectra::transverse::*;

/// Lowest eigenvalue of `−φ''` on `[0, a]` with `φ'(0) = −σ₀φ(0)` and far
/// end Dirichlet (`None`) or `φ'(a) = −σ_a φ(a)`; `n` cells.
fn fd_lowest(a: f64, sigma0: f64, far: Option<f64>, n: usize) -> f64 {
    let h = a / n as f64;
    let size = if far.is_some() { n + 1 } else { n };
    let mut k = DMatrix::<f64>::zeros(size, size);
    let mut mass = vec![h; size];
    mass[0] = h / 2.0;
    for c in 0..n {
        let (i, j) = (c, c + 1);
        for (p, q, v) in [(i, i, 1.0), (j, j, 1.0), (i, j, -1.0), (j, i, -1.0)] {
            if p < size && q < size {
                k[(p, q)] += v / h;
            }
        }
    }
    k[(0, 0)] -= sigma0;
    if let Some(sa) = far {
        mass[n] = h / 2.0;
        k[(n, n)] += sa;
    }
    for i in 0..size {
        for j in 0..size {
            k[(i, j)] /= (mass[i] * mass[j]).sqrt();
        }
    }
    SymmetricEigen::new(k).eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
}

fn fd_extrapolated(a: f64, sigma0: f64, far: Option<f64>) -> f64 {
    let coarse = fd_lowest(a, sigma0, far, 400);
    let fine = fd_lowest(a, sigma0, far, 800);
    (4.0 * fine - coarse) / 3.0
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

#[test]
fn dirichlet_fd_oracle() {
    let z = t_dirichlet_eigenvalue(1.0, 2.0).unwrap();
    assert!(rel(z, fd_extrapolated(1.0, 2.0, None)) < 1e-6);
}

#[test]
fn robin_fd_oracle() {
    let z = t_neumann_eigenvalue(1.0, 5.0, -0.2).unwrap();
    assert!(rel(z, fd_extrapolated(1.0, 5.0, Some(-0.2))) < 1e-6);
}

#[test]
fn documented_intervals() {
    let e = (-20.0f64).exp();
    let zd = t_dirichlet_eigenvalue(2.0, 10.0).unwrap();
    assert!(zd >= -100.0 && zd <= -100.0 + 400.0 * e);
    let zn = t_neumann_eigenvalue(2.0, 10.0, 0.3).unwrap();
    assert!(zn <= -100.0 && zn >= -100.0 - 1125.0 * e);
    assert!(t_neumann_eigenvalue(2.0, 10.0, 0.0).unwrap() <= zd);
}

#[test]
fn threshold_oracle() {
    // −ζ² is the lowest eigenvalue of the Neumann–Robin interval (0, b).
    let z = robin_neumann_threshold(1.0f64, 1.0).unwrap();
    assert!((z - 1.1997).abs() < 1e-3, "{z}");
    let fd = fd_extrapolated(1.0, 1.0, Some(0.0));
    assert!(rel(-z * z, fd) < 1e-6);
    assert!(robin_neumann_threshold(2.0f64, 1.0).unwrap() < z);
    assert!((robin_neumann_threshold(40.0f64, 1.0).unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn mixed_mode_without_robin() {
    let a = 1.3;
    let p = TransverseProblem::new(a, 0.0, FarBc::Dirichlet).unwrap();
    let pencil = assemble_transverse_with(&p, 32, 4, 0.0).unwrap();
    let coarse = robin_spectra::eigensolve::lowest_eigenpairs(&assemble_transverse(&p, 64).unwrap(), 1, 1e-9).unwrap().values[0];
    assert!(rel(coarse, (std::f64::consts::PI / (2.0 * a)).powi(2)) < 1e-3);
    let v = robin_spectra::eigensolve::lowest_eigenpairs(&pencil, 1, 1e-9).unwrap().values[0];
    let exact = (std::f64::consts::PI / (2.0 * a)).powi(2);
    assert!(rel(v, exact) < 1e-6);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn neumann_below_dirichlet(a in 0.5f64..4.0, s in 1.1f64..20.0) {
        let sigma0 = s * 4.0 / (3.0 * a);
        let zd = t_dirichlet_eigenvalue(a, sigma0).unwrap();
        let zn = t_neumann_eigenvalue(a, sigma0, 0.0).unwrap();
        prop_assert!(zn <= zd);
        prop_assert!(zd >= -sigma0 * sigma0 * (1.0 + 8.0 * f64::EPSILON));
    }

    #[test]
    fn fe_agrees_with_transcendental(a in 0.5f64..3.0, s in 1.1f64..8.0, t in -0.5f64..0.5) {
        let sigma0 = s * 4.0 / (3.0 * a);
        let exact = t_neumann_eigenvalue(a, sigma0, t * sigma0).unwrap();
        let p = TransverseProblem::new(a, sigma0, FarBc::Robin(t * sigma0)).unwrap();
        let pencil = assemble_transverse_with(&p, 48, 4, 1.0).unwrap();
        let fe = robin_spectra::eigensolve::lowest_eigenpairs(&pencil, 1, 1e-6).unwrap().values[0];
        prop_assert!(fe >= exact - 1e-9 * exact.abs());
        prop_assert!(rel(fe, exact) < 1e-7);
    }

    #[test]
    fn regime_violations_rejected(a in 0.1f64..2.0, f in 0.1f64..0.99) {
        prop_assert!(t_dirichlet_eigenvalue(a, f * 4.0 / (3.0 * a)).is_err());
    }
}
