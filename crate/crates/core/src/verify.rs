//! Acceptance checks with fixed parameters and tolerances, one runner per
//! check. Used by the `acceptance` test target and by `robinspec verify`.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::asymptotics::{discreteness_margin, fit_remainder_exponent, predict_interior, predict_refined_lower, predict_waveguide};
use crate::comparison::{mu_eigenvalues, Comparison1DProblem, ComparisonGeometry};
use crate::curve::{CurveSpec, Topology};
use crate::eigensolve::lowest_eigenpairs;
use crate::error::Result;
use crate::exact_models::{bessel_k, bessel_logderiv, disc_exterior_eigenvalue, quadrant_eigenvalue, quadrant_numeric};
use crate::fem::LongitudinalEnds;
use crate::profile::ProfileSpec;
use crate::quadrature::adaptive;
use crate::strip::{bracket_eigenvalues, strip_eigenvalues, weighted_form_lowest, StripMesh, StripModel, StripSide};
use crate::transverse::{assemble_transverse_with, robin_robin_eigenvalue, t_dirichlet_eigenvalue, t_neumann_eigenvalue, FarBc, TransverseProblem};
use crate::variational::deformation_functional;

/// Result of one check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Outcome {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl std::fmt::Display for Outcome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[{}] {:>2} {:<32} {:>8.2}s  {}", if self.passed { "PASS" } else { "FAIL" }, self.id, self.name, self.seconds, self.detail)
    }
}

type Runner = fn() -> Result<(bool, String)>;

/// Identifiers, names and runners of all checks, in order.
pub const CHECKS: [(u8, &str, Runner); 12] = [
    (1, "disc exact vs strip", disc_vs_strip),
    (2, "disc remainder exponent", disc_remainder),
    (3, "unit circle comparison", circle_comparison),
    (4, "Poschl-Teller comparison", poschl_teller),
    (5, "transverse sandwiches", transverse_sandwiches),
    (6, "bracketing order", bracketing_order),
    (7, "interior remainder scaling", interior_remainder),
    (8, "quadrant separability", quadrant),
    (9, "deformation functional", deformation),
    (10, "concavity non-existence", concavity),
    (11, "waveguide", waveguide),
    (12, "Bessel layer", bessel_layer),
];

/// Runs check `id`; errors count as failures.
pub fn run(id: u8) -> Option<Outcome> {
    let (id, name, runner) = CHECKS.iter().find(|c| c.0 == id).copied()?;
    let t = Instant::now();
    let (passed, detail) = match runner() {
        Ok(r) => r,
        Err(e) => (false, format!("error: {e}")),
    };
    Some(Outcome { id, name, passed, detail, seconds: t.elapsed().as_secs_f64() })
}

pub fn run_all() -> Vec<Outcome> {
    CHECKS.iter().filter_map(|c| run(c.0)).collect()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn disc_vs_strip() -> Result<(bool, String)> {
    let circle = CurveSpec::Circle { radius: 1.0 }.build::<f64>()?;
    let mut ok = true;
    let mut worst: f64 = 0.0;
    let mut slowest: f64 = 0.0;
    for beta in [8.0, 16.0, 32.0] {
        let t = Instant::now();
        let model = StripModel::new(circle.clone(), StripSide::Exterior, beta);
        let values = strip_eigenvalues(&model, 5, 1e-9)?.values;
        slowest = slowest.max(t.elapsed().as_secs_f64());
        // m = 0 is simple, m ≥ 1 doubly degenerate.
        for (m, idx) in [(0usize, &[0usize][..]), (1, &[1, 2]), (2, &[3, 4])] {
            let exact = disc_exterior_eigenvalue(1.0, beta, m)?.lambda;
            for &j in idx {
                let e = rel(values[j], exact);
                worst = worst.max(e);
                ok &= e <= 5e-3;
            }
        }
    }
    ok &= slowest <= 60.0;
    Ok((ok, format!("max rel err {worst:.2e} (tol 5e-3), slowest beta {slowest:.1}s (limit 60s)")))
}

fn disc_remainder() -> Result<(bool, String)> {
    let betas = [10.0f64, 20.0, 40.0, 80.0, 160.0];
    let mut ok = true;
    let mut parts = Vec::new();
    for m in 0..3usize {
        let res: Vec<f64> = betas
            .iter()
            .map(|&b| {
                let mf = m as f64;
                disc_exterior_eigenvalue(1.0, b, m).map(|d| d.lambda + (b - 0.5).powi(2) - (mf * mf - 0.25))
            })
            .collect::<Result<_>>()?;
        let fit = fit_remainder_exponent(&betas, &res)?;
        ok &= (fit.exponent + 1.0).abs() <= 0.2;
        parts.push(format!("m={m}: p={:.3}", fit.exponent));
    }
    Ok((ok, format!("{} (target -1 ± 0.2)", parts.join(", "))))
}

fn circle_comparison() -> Result<(bool, String)> {
    let circle = CurveSpec::Circle { radius: 1.0 }.build::<f64>()?;
    let perimeter = match circle.topology() {
        Topology::ClosedLoop { perimeter } => perimeter,
        Topology::InfiniteLine => unreachable!("circle is closed"),
    };
    let problem = Comparison1DProblem::from_curve(&circle, ComparisonGeometry::Circle { perimeter }, 2048);
    let mu = mu_eigenvalues(&problem, 5, 1e-9)?.values;
    let d1 = (mu[0] + 0.25).abs();
    let d23 = (mu[1] - mu[2]).abs();
    let d45 = (mu[3] - mu[4]).abs();
    let ok = d1 <= 1e-4 && d23 <= 1e-6 && d45 <= 1e-6;
    Ok((ok, format!("mu1 = {:.8}, |mu2-mu3| = {d23:.1e}, |mu4-mu5| = {d45:.1e}", mu[0])))
}

fn poschl_teller() -> Result<(bool, String)> {
    let exact = -((2f64.sqrt() - 1.0) / 2.0).powi(2);
    let problem = Comparison1DProblem::from_profile(ProfileSpec::Sech { amp: 1.0, center: 0.0, width: 1.0 }, ComparisonGeometry::LineTruncated { s_trunc: 40.0 }, 4096);
    let mu1 = mu_eigenvalues(&problem, 1, 1e-9)?.values[0];
    let ok = (mu1 - exact).abs() <= 1e-4;
    Ok((ok, format!("mu1 = {mu1:.8}, closed form {exact:.8}")))
}

/// Finite-element value of the transverse problem (degree 4, clustered nodes).
fn transverse_fe(problem: &TransverseProblem<f64>) -> Result<f64> {
    let stretch = (problem.a * problem.sigma0 / 8.0).clamp(0.5, 4.0);
    let pencil = assemble_transverse_with(problem, 64, 4, stretch)?;
    Ok(lowest_eigenpairs(&pencil, 1, 1e-6)?.values[0])
}

fn transverse_sandwiches() -> Result<(bool, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut inside = 0;
    let mut worst: f64 = 0.0;
    let cases = 100;
    for _ in 0..cases {
        let a: f64 = rng.gen_range(0.5..4.0);
        let floor = (4.0 / 3.0) / a * 1.05;
        let sigma0: f64 = rng.gen_range(floor..floor.max(2.0) + 28.0);
        let sigma_a: f64 = rng.gen_range(-0.5..0.5) * sigma0;
        let zd = t_dirichlet_eigenvalue(a, sigma0)?;
        let zn = t_neumann_eigenvalue(a, sigma0, sigma_a)?;
        let s2 = sigma0 * sigma0;
        let e = (-a * sigma0).exp();
        // Once aσ0 is large the intervals are narrower than one ulp of σ0².
        let ulp = 8.0 * f64::EPSILON * s2;
        let d_ok = zd >= -s2 - ulp && zd <= -s2 + 4.0 * s2 * e + ulp;
        let n_ok = zn <= -s2 + ulp && zn >= -s2 - 11.25 * s2 * e - ulp;
        if d_ok && n_ok {
            inside += 1;
        }
        let fd = transverse_fe(&TransverseProblem::new(a, sigma0, FarBc::Dirichlet)?)?;
        let fn_ = transverse_fe(&TransverseProblem::new(a, sigma0, FarBc::Robin(sigma_a))?)?;
        worst = worst.max(rel(fd, zd)).max(rel(fn_, zn));
    }
    let ok = inside == cases && worst <= 1e-6;
    Ok((ok, format!("{inside}/{cases} inside both intervals, max rel diff to discretization {worst:.1e}")))
}

fn line_bump() -> Result<crate::curve::BoundaryCurve<f64>> {
    CurveSpec::LineBump { separation: 8.0 }.build()
}

/// Quadratic-in-s, quartic-in-u elements with clustered transverse nodes.
fn fine_mesh(s_trunc: f64) -> StripMesh {
    StripMesh { n_s: (2.0 * s_trunc / 0.1) as usize, n_u: 12, degree_s: 2, degree_u: 4, stretch: 2.0 }
}

fn bracketing_order() -> Result<(bool, String)> {
    let beta = 20.0;
    let s_trunc = 8.0;
    let model = StripModel::new(line_bump()?, StripSide::Interior, beta).with_truncation(s_trunc).with_mesh(fine_mesh(s_trunc));
    let enc = bracket_eigenvalues(&model, 3, 1e-9)?;
    let st = model.stats()?;
    let geometry = ComparisonGeometry::LineTruncated { s_trunc: model.s_trunc };
    let mu1 = mu_eigenvalues(&Comparison1DProblem::from_curve(&model.curve, geometry, 2048), 1, 1e-9)?.values[0];
    let refined = predict_refined_lower(st.gamma_star, mu1, beta, StripSide::Interior);
    let tol = discreteness_margin(beta);
    let ordered = enc.ordered();
    let bound = enc.upper[0] < -beta * beta;
    let contains = enc.lower[0] >= refined - tol && refined <= enc.upper[0];
    Ok((
        ordered && bound && contains,
        format!(
            "N<=D for j=1..3: {ordered}; [{:.4}, {:.4}] below -beta^2: {bound}; refined {:.4} below enclosure (tol {tol:.3}): {contains}",
            enc.lower[0], enc.upper[0], refined
        ),
    ))
}

/// `(λ₁ − prediction)/β^{2/3}` over a β-sweep and its max/min ratio.
fn scaled_remainders(betas: &[f64], model: impl Fn(f64) -> Result<StripModel<f64>>, predict: impl Fn(f64) -> f64) -> Result<(Vec<f64>, f64)> {
    let mut scaled = Vec::new();
    for &beta in betas {
        let lambda = strip_eigenvalues(&model(beta)?, 1, 1e-9)?.values[0];
        scaled.push((lambda - predict(beta)) / beta.powf(2.0 / 3.0));
    }
    let max = scaled.iter().fold(0f64, |m, v| m.max(v.abs()));
    let min = scaled.iter().fold(f64::INFINITY, |m, v| m.min(v.abs()));
    Ok((scaled, max / min))
}

fn interior_remainder() -> Result<(bool, String)> {
    let curve = line_bump()?;
    let gamma_star = StripModel::new(curve.clone(), StripSide::Interior, 10.0).stats()?.gamma_star;
    let s_trunc = 8.0;
    let (scaled, ratio) = scaled_remainders(
        &[10.0, 20.0, 40.0, 80.0],
        |beta| Ok(StripModel::new(curve.clone(), StripSide::Interior, beta).with_truncation(s_trunc).with_mesh(fine_mesh(s_trunc))),
        |beta| predict_interior(gamma_star, beta),
    )?;
    let ok = ratio <= 3.0;
    Ok((ok, format!("scaled remainders {:?}, max/min {ratio:.3} (limit 3)", rounded(&scaled))))
}

fn rounded(v: &[f64]) -> Vec<f64> {
    v.iter().map(|x| (x * 1e4).round() / 1e4).collect()
}

fn quadrant() -> Result<(bool, String)> {
    let beta = 3.0f64;
    let mut ok = true;
    let mut parts = Vec::new();
    for l in [2.0f64, 4.0] {
        let diff = (quadrant_numeric(l, beta)? - quadrant_eigenvalue(beta)).abs();
        let bound = 8.0 * beta * beta * (-l * beta).exp();
        ok &= diff <= bound;
        parts.push(format!("L={l}: {diff:.2e} <= {bound:.2e}"));
    }
    Ok((ok, parts.join(", ")))
}

fn deformation() -> Result<(bool, String)> {
    let bump = CurveSpec::GraphBump { amplitude: 0.3, width: 1.0 }.build::<f64>()?;
    let r = deformation_functional(&bump, 1.0, 64.0, None)?;
    let s64 = r.s_n.unwrap_or(f64::NAN);
    let straight = deformation_functional(&CurveSpec::Straight.build::<f64>()?, 1.0, 64.0, None)?;
    let negative = r.limit < -1e-3;
    let close = (s64 - r.limit).abs() <= 0.01 * r.limit.abs();
    let flat = straight.limit.abs() <= 1e-10;
    Ok((
        negative && close && flat,
        format!(
            "limit {:.6} (< -1e-3: {negative}), S_64 {s64:.6} within 1%: {close} (gradient term {:.6}), straight limit {:.1e}",
            r.limit,
            r.gradient_term.unwrap_or(f64::NAN),
            straight.limit
        ),
    ))
}

fn concavity() -> Result<(bool, String)> {
    let curve = CurveSpec::FromCurvature {
        profile: ProfileSpec::Lorentzian { amp: -1.0, center: 0.0, width: 1.0 },
        window: [-30.0, 30.0],
        anchor: Some(0.0),
        initial_angle: 0.0,
        closed: false,
    }
    .build::<f64>()?;
    let mut ok = true;
    let mut parts = Vec::new();
    for beta in [5.0, 10.0] {
        let model = StripModel::new(curve.clone(), StripSide::Interior, beta)
            .with_truncation(10.0)
            .with_ends(LongitudinalEnds::Neumann)
            .with_mesh(StripMesh { n_s: 100, n_u: 12, degree_s: 2, degree_u: 4, stretch: 2.0 });
        let lowest = weighted_form_lowest(&model)?;
        let floor = -beta * beta * (1.0 + 1e-2);
        ok &= lowest >= floor;
        parts.push(format!("beta={beta}: {lowest:.5} >= {floor:.2}"));
    }
    Ok((ok, parts.join(", ")))
}

fn waveguide() -> Result<(bool, String)> {
    let d = 1.0;
    let straight = StripModel::new(CurveSpec::Straight.build::<f64>()?, StripSide::Waveguide { d }, 1.0)
        .with_truncation(4.0)
        .with_ends(LongitudinalEnds::Neumann)
        .with_mesh(StripMesh { n_s: 16, ..StripMesh::default() });
    let flat = strip_eigenvalues(&straight, 1, 1e-9)?.values[0];
    let oracle = robin_robin_eigenvalue(d, 1.0, -1.0)?;
    let flat_err = rel(flat, oracle);
    let bumped = CurveSpec::FromCurvature {
        profile: ProfileSpec::Sech { amp: 0.5, center: 0.0, width: 1.0 },
        window: [-20.0, 20.0],
        anchor: Some(0.0),
        initial_angle: 0.0,
        closed: false,
    }
    .build::<f64>()?;
    let s_trunc = 8.0;
    let build = |beta: f64| {
        Ok(StripModel::new(bumped.clone(), StripSide::Waveguide { d }, beta)
            .with_truncation(s_trunc)
            .with_mesh(StripMesh { n_u: 16, stretch: 3.0, ..fine_mesh(s_trunc) }))
    };
    let probe = build(10.0)?;
    let st = probe.stats()?;
    let mut far_low = f64::INFINITY;
    for i in 0..=4000 {
        let s = -s_trunc + 2.0 * s_trunc * i as f64 / 4000.0;
        far_low = far_low.min(crate::curve::parallel_curvature(probe.curve.curvature(s)?, d)?);
    }
    let lambda10 = strip_eigenvalues(&probe, 1, 1e-9)?.values[0];
    let binds = lambda10 < -100.0;
    let (scaled, ratio) = scaled_remainders(&[10.0, 20.0, 40.0, 80.0], build, |beta| predict_waveguide(st.gamma_star, far_low, beta))?;
    let ok = flat_err <= 1e-4 && binds && ratio <= 3.0;
    Ok((
        ok,
        format!(
            "straight rel err {flat_err:.1e} (tol 1e-4); bumped lambda1(10) = {lambda10:.4} < -100: {binds}; scaled remainders {:?}, max/min {ratio:.3}",
            rounded(&scaled)
        ),
    ))
}

/// `∫₀^∞ e^{−x cosh t} cosh(mt) dt` by adaptive Gauss–Kronrod quadrature,
/// cut where the integrand has dropped by `e^{−60}` from its peak.
pub fn bessel_k_by_quadrature(m: usize, x: f64) -> f64 {
    let mf = m as f64;
    let log_f = |t: f64| -x * t.cosh() + mf * t;
    let peak_t = if mf > x { (mf / x).asinh() } else { 0.0 };
    let peak = log_f(peak_t);
    let mut hi = peak_t + 1.0;
    while log_f(hi) > peak - 60.0 {
        hi *= 1.5;
    }
    let scale = peak;
    let f = |t: f64| (-x * t.cosh() + mf * t - scale).exp() * (1.0 + (-2.0 * mf * t).exp()) * 0.5;
    let parts = [0.0, peak_t, hi];
    let mut total = 0.0;
    for w in parts.windows(2) {
        if w[1] > w[0] {
            total += adaptive(f, w[0], w[1], 0.0, 1e-14, 20_000).value;
        }
    }
    total * scale.exp()
}

fn bessel_layer() -> Result<(bool, String)> {
    let xs: Vec<f64> = (0..=60).map(|i| 0.1 * (500f64).powf(i as f64 / 60.0)).collect();
    let mut worst: f64 = 0.0;
    let mut monotone = true;
    let mut above = true;
    for m in 0..=10usize {
        let mut prev = f64::NEG_INFINITY;
        for &x in &xs {
            worst = worst.max(rel(bessel_k(m, x)?, bessel_k_by_quadrature(m, x)));
            let l = bessel_logderiv(m, x)?;
            monotone &= l > prev;
            above &= l > x;
            prev = l;
        }
    }
    let ok = worst <= 1e-10 && monotone && above;
    Ok((ok, format!("max rel diff to quadrature {worst:.1e} (tol 1e-10), log-derivative increasing: {monotone}, exceeds x: {above}")))
}
