//! Two-term predictions, refined bounds, β-sweeps and remainder fits.

use rayon::prelude::*;
use serde::Serialize;

use crate::comparison::{mu_eigenvalues, Comparison1DProblem, ComparisonGeometry};
use crate::curve::{least_squares_slope, parallel_curvature, Topology};
use crate::error::{Error, Result};
use crate::numeric::{lit, Real};
use crate::strip::{bracket_eigenvalues, strip_eigenvalues, StripModel, StripSide};

/// `−β² − γ*β`.
pub fn predict_interior<T: Real>(gamma_star: T, beta: T) -> T {
    -beta * beta - gamma_star * beta
}

/// `−β² + γ_*β` for the exterior of an obstacle with minimal curvature `γ_*`.
pub fn predict_exterior<T: Real>(gamma_lowstar: T, beta: T) -> T {
    -beta * beta + gamma_lowstar * beta
}

/// `−(β + γ*/2)² + μ_j` (interior) or `−(β − γ_*/2)² + μ_j` (exterior);
/// `gamma` is the curvature extremum matching the side.
pub fn predict_refined_lower<T: Real>(gamma: T, mu_j: T, beta: T, side: StripSide<T>) -> T {
    let shift = match side {
        StripSide::Exterior => beta - gamma * lit(0.5),
        _ => beta + gamma * lit(0.5),
    };
    -shift * shift + mu_j
}

/// `−β² − max(γ*, −γ_{d,*})β`, with `γ_d` the curvature of the far wall in
/// the parametrization of the near one.
pub fn predict_waveguide<T: Real>(gamma_star: T, gamma_d_lowstar: T, beta: T) -> T {
    -beta * beta - gamma_star.max(-gamma_d_lowstar) * beta
}

/// Least-squares power law of `|residual|` against `β`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExponentFit<T> {
    pub exponent: T,
    pub r2: T,
}

pub fn fit_remainder_exponent<T: Real>(betas: &[T], residuals: &[T]) -> Result<ExponentFit<T>> {
    if betas.len() != residuals.len() || betas.len() < 3 {
        return Err(Error::InvalidInput("an exponent fit needs at least three matching points".into()));
    }
    if residuals.iter().any(|r| *r == T::zero() || !r.is_finite()) {
        return Err(Error::Regime { what: "remainder fit", detail: "degenerate fit: zero or non-finite residual".into() });
    }
    let xs: Vec<T> = betas.iter().map(|b| b.ln()).collect();
    let ys: Vec<T> = residuals.iter().map(|r| r.abs().ln()).collect();
    let (exponent, r2) = least_squares_slope(&xs, &ys).ok_or(Error::Regime { what: "remainder fit", detail: "degenerate abscissae".into() })?;
    Ok(ExponentFit { exponent, r2 })
}

/// Energy margin below the threshold required to flag an eigenvalue as
/// discrete: `2 log β / β`.
pub fn discreteness_margin<T: Real>(beta: T) -> T {
    lit::<T>(2.0) * beta.ln() / beta
}

/// Results of a β-sweep of one geometry.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PredictionReport<T> {
    pub model: String,
    pub betas: Vec<T>,
    pub widths: Vec<T>,
    /// Upper (Dirichlet-far) eigenvalues `λ_j(β)`.
    pub computed: Vec<Vec<T>>,
    /// Lower (Neumann-far) eigenvalues; equal to `computed` for waveguides.
    pub computed_lower: Vec<Vec<T>>,
    pub predicted_two_term: Vec<Vec<T>>,
    pub refined_lower: Vec<Vec<T>>,
    pub residuals: Vec<Vec<T>>,
    pub discrete: Vec<Vec<bool>>,
    pub thresholds: Vec<T>,
    pub fitted_exponent: Vec<Option<ExponentFit<T>>>,
    pub mesh: (usize, usize),
}

impl<T: Real> PredictionReport<T> {
    /// Smallest swept β with at least `n` discrete eigenvalues.
    pub fn bound_state_onset(&self, n: usize) -> Option<T> {
        self.betas.iter().zip(&self.discrete).find(|(_, d)| d.iter().filter(|x| **x).count() >= n).map(|(b, _)| *b)
    }
}

/// Comparison eigenvalues `μ_j` of `−d²/ds² − γ²/4` on the model's curve.
pub fn comparison_mu<T: Real>(model: &StripModel<T>, k: usize) -> Result<Vec<T>> {
    let geometry = match model.curve.topology() {
        Topology::ClosedLoop { perimeter } => ComparisonGeometry::Circle { perimeter },
        Topology::InfiniteLine => ComparisonGeometry::LineTruncated { s_trunc: model.s_trunc },
    };
    let n = Comparison1DProblem::<T>::default_n(&geometry);
    let problem = Comparison1DProblem::from_curve(&model.curve, geometry, n);
    Ok(mu_eigenvalues(&problem, k, lit(1e-10))?.values)
}

/// Two-term prediction for `model` at its β.
pub fn two_term_prediction<T: Real>(model: &StripModel<T>) -> Result<T> {
    let st = model.stats()?;
    let beta = model.beta;
    Ok(match model.side {
        StripSide::Interior => predict_interior(st.gamma_star, beta),
        StripSide::Exterior => predict_exterior(st.gamma_lowstar, beta),
        StripSide::Waveguide { d } => {
            // Far-wall curvature, minimized over the sampled range.
            let (lo, hi) = model.s_range();
            let n = 4001;
            let mut low = T::infinity();
            for i in 0..n {
                let s = lo + (hi - lo) * lit::<T>(i as f64) / lit::<T>((n - 1) as f64);
                low = low.min(parallel_curvature(model.curve.curvature(s)?, d)?);
            }
            predict_waveguide(st.gamma_star, low, beta)
        }
    })
}

/// Runs `build(β)` for every β in parallel and collects eigenvalues and
/// predictions. Exponent fits drop the smallest β when four or more are
/// swept.
pub fn sweep<T, F>(betas: &[T], k: usize, tol: T, build: F) -> Result<PredictionReport<T>>
where
    T: Real,
    F: Fn(T) -> Result<StripModel<T>> + Sync,
{
    if betas.is_empty() || betas.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidInput("betas must be non-empty and strictly increasing".into()));
    }
    if k == 0 {
        return Err(Error::InvalidInput("at least one eigenvalue is required".into()));
    }
    let first = build(betas[0])?;
    let mu = comparison_mu(&first, k)?;
    let st = first.stats()?;
    let gamma_side = if first.side == StripSide::Exterior { st.gamma_lowstar } else { st.gamma_star };
    let rows: Vec<Result<_>> = betas
        .par_iter()
        .map(|&beta| {
            let model = build(beta)?;
            let (lower, upper) = if matches!(model.side, StripSide::Waveguide { .. }) {
                let v = strip_eigenvalues(&model, k, tol)?.values;
                (v.clone(), v)
            } else {
                let e = bracket_eigenvalues(&model, k, tol)?;
                (e.lower, e.upper)
            };
            let two = two_term_prediction(&model)?;
            let threshold = model.threshold()?;
            let margin = discreteness_margin(beta);
            let refined: Vec<T> = mu.iter().map(|m| predict_refined_lower(gamma_side, *m, beta, model.side)).collect();
            let residual: Vec<T> = upper.iter().map(|v| *v - two).collect();
            let discrete: Vec<bool> = upper.iter().map(|v| *v < threshold - margin).collect();
            Ok((model.width(), lower, upper, vec![two; k], refined, residual, discrete, threshold, (model.mesh.n_s, model.mesh.n_u)))
        })
        .collect();
    let mut report = PredictionReport {
        model: format!("{:?} {:?}", first.side, first.curve.family()),
        betas: betas.to_vec(),
        widths: Vec::new(),
        computed: Vec::new(),
        computed_lower: Vec::new(),
        predicted_two_term: Vec::new(),
        refined_lower: Vec::new(),
        residuals: Vec::new(),
        discrete: Vec::new(),
        thresholds: Vec::new(),
        fitted_exponent: Vec::new(),
        mesh: (first.mesh.n_s, first.mesh.n_u),
    };
    for row in rows {
        let (w, lo, up, two, refined, res, disc, thr, _) = row?;
        report.widths.push(w);
        report.computed_lower.push(lo);
        report.computed.push(up);
        report.predicted_two_term.push(two);
        report.refined_lower.push(refined);
        report.residuals.push(res);
        report.discrete.push(disc);
        report.thresholds.push(thr);
    }
    let skip = if betas.len() >= 4 { 1 } else { 0 };
    for j in 0..k {
        let bs: Vec<T> = betas[skip..].to_vec();
        let rs: Vec<T> = report.residuals[skip..].iter().map(|r| r[j]).collect();
        report.fitted_exponent.push(fit_remainder_exponent(&bs, &rs).ok());
    }
    Ok(report)
}
