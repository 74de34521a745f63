//! The longitudinal comparison operator `S = −d²/ds² − γ²/4` and its scaled
//! variants `−c d²/ds² + V(s)`.

use std::sync::Arc;

use crate::curve::BoundaryCurve;
use crate::eigensolve::{classify_discrete, lowest_eigenpairs, SymPencil, Spectrum};
use crate::error::{Error, Result};
use crate::fem::{assemble_1d, uniform_nodes, End, Mesh1d};
use crate::numeric::{lit, Real};
use crate::profile::Profile;

/// Domain of the longitudinal problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ComparisonGeometry<T> {
    /// `[−s_trunc, s_trunc]` with Dirichlet ends.
    LineTruncated { s_trunc: T },
    /// `[0, perimeter]` with periodic identification.
    Circle { perimeter: T },
}

impl<T: Real> ComparisonGeometry<T> {
    fn validate(&self) -> Result<()> {
        let ok = match self {
            ComparisonGeometry::LineTruncated { s_trunc } => *s_trunc > T::zero(),
            ComparisonGeometry::Circle { perimeter } => *perimeter > T::zero(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidInput("comparison domain length must be positive".into()))
        }
    }

    fn range(&self) -> (T, T) {
        match *self {
            ComparisonGeometry::LineTruncated { s_trunc } => (-s_trunc, s_trunc),
            ComparisonGeometry::Circle { perimeter } => (T::zero(), perimeter),
        }
    }
}

type Potential<T> = Arc<dyn Fn(T) -> T + Send + Sync>;

/// `−kinetic · d²/ds² + potential(s)` on a line window or a loop.
#[derive(Clone)]
pub struct LongitudinalOperator<T> {
    pub kinetic: T,
    pub potential: Potential<T>,
    pub geometry: ComparisonGeometry<T>,
    /// Number of linear elements.
    pub n: usize,
}

impl<T: Real> std::fmt::Debug for LongitudinalOperator<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("LongitudinalOperator").field("kinetic", &self.kinetic).field("geometry", &self.geometry).field("n", &self.n).finish()
    }
}

/// Comparison problem `S = −d²/ds² − γ²/4`.
#[derive(Clone)]
pub struct Comparison1DProblem<T> {
    pub gamma: Arc<dyn Fn(T) -> T + Send + Sync>,
    pub geometry: ComparisonGeometry<T>,
    pub n: usize,
}

impl<T: Real> Comparison1DProblem<T> {
    pub fn from_profile<P: Profile<T> + 'static>(profile: P, geometry: ComparisonGeometry<T>, n: usize) -> Self {
        Comparison1DProblem { gamma: Arc::new(move |s| profile.value(s)), geometry, n }
    }

    /// Uses the curvature of `curve`; loops default to their perimeter.
    pub fn from_curve(curve: &BoundaryCurve<T>, geometry: ComparisonGeometry<T>, n: usize) -> Self {
        let c = curve.clone();
        Comparison1DProblem { gamma: Arc::new(move |s| c.curvature(s).unwrap_or(T::zero())), geometry, n }
    }

    /// Default grid: 2048 elements on a line, 1024 on a loop.
    pub fn default_n(geometry: &ComparisonGeometry<T>) -> usize {
        match geometry {
            ComparisonGeometry::LineTruncated { .. } => 2048,
            ComparisonGeometry::Circle { .. } => 1024,
        }
    }

    pub fn operator(&self) -> LongitudinalOperator<T> {
        let g = self.gamma.clone();
        LongitudinalOperator { kinetic: T::one(), potential: Arc::new(move |s| -g(s) * g(s) * lit(0.25)), geometry: self.geometry, n: self.n }
    }
}

/// Linear-element pencil of `∫ c|f'|² + V|f|²` against `∫|f|²`.
pub fn assemble_longitudinal<T: Real>(op: &LongitudinalOperator<T>) -> Result<SymPencil<T>> {
    op.geometry.validate()?;
    if op.n < 16 {
        return Err(Error::InvalidInput(format!("longitudinal grid needs at least 16 elements, got {}", op.n)));
    }
    if !(op.kinetic > T::zero()) {
        return Err(Error::InvalidInput("kinetic coefficient must be positive".into()));
    }
    let (lo, hi) = op.geometry.range();
    let periodic = matches!(op.geometry, ComparisonGeometry::Circle { .. });
    let mesh = Mesh1d {
        nodes: uniform_nodes(lo, hi, op.n),
        degree: 1,
        periodic,
        left: End::Dirichlet,
        right: End::Dirichlet,
    };
    let pot = op.potential.clone();
    let (a, b, _) = assemble_1d(&mesh, |_| op.kinetic, |s| pot(s), |_| T::one())?;
    // Rayleigh quotients are bounded below by the potential minimum.
    let vmin = (0..=op.n)
        .map(|i| pot(lo + (hi - lo) * lit::<T>(i as f64) / lit::<T>(op.n as f64)))
        .fold(T::infinity(), T::min);
    let hint = vmin - vmin.abs() * lit(0.05) - lit(1e-3);
    Ok(SymPencil::new(a, b, "longitudinal operator").with_lower_hint(hint))
}

/// Pencil of the comparison operator.
pub fn assemble_comparison<T: Real>(problem: &Comparison1DProblem<T>) -> Result<SymPencil<T>> {
    let mut p = assemble_longitudinal(&problem.operator())?;
    p.provenance = "comparison operator".into();
    Ok(p)
}

/// Lowest `k` eigenvalues `μ_j` of a longitudinal operator. On a line window
/// values at or above zero lie in the essential spectrum of the untruncated
/// operator and are flagged non-discrete.
pub fn longitudinal_eigenvalues<T: Real>(op: &LongitudinalOperator<T>, k: usize, tol: T) -> Result<Spectrum<T>> {
    let pencil = assemble_longitudinal(op)?;
    let spec = lowest_eigenpairs(&pencil, k, tol)?;
    Ok(match op.geometry {
        ComparisonGeometry::LineTruncated { .. } => classify_discrete(spec, T::zero(), T::zero()),
        ComparisonGeometry::Circle { .. } => {
            let n = spec.values.len();
            Spectrum { discrete_flags: vec![true; n], ..spec }
        }
    })
}

/// `μ_1 ≤ … ≤ μ_k` of the comparison operator.
pub fn mu_eigenvalues<T: Real>(problem: &Comparison1DProblem<T>, k: usize, tol: T) -> Result<Spectrum<T>> {
    if k == 0 {
        return Err(Error::InvalidInput("at least one eigenvalue must be requested".into()));
    }
    longitudinal_eigenvalues(&problem.operator(), k, tol)
}

/// Number of negative eigenvalues of the truncated line operator, by an
/// inertia count of the assembled pencil.
pub fn negative_count<T: Real>(problem: &Comparison1DProblem<T>) -> Result<usize> {
    let pencil = assemble_comparison(problem)?;
    crate::eigensolve::count_below(&pencil, T::zero())
}

/// Estimate of `#σ_disc(S)` on the line: the negative-eigenvalue count
/// at `s_trunc` and `2 s_trunc` (same spacing); `None` if they differ.
pub fn bound_state_count<T: Real>(gamma: Arc<dyn Fn(T) -> T + Send + Sync>, s_trunc: T, n: usize) -> Result<Option<usize>> {
    let p1 = Comparison1DProblem { gamma: gamma.clone(), geometry: ComparisonGeometry::LineTruncated { s_trunc }, n };
    let p2 = Comparison1DProblem { gamma, geometry: ComparisonGeometry::LineTruncated { s_trunc: s_trunc * lit(2.0) }, n: 2 * n };
    let (c1, c2) = (negative_count(&p1)?, negative_count(&p2)?);
    Ok((c1 == c2).then_some(c1))
}

/// `|μ_j(s_trunc) − μ_j(2 s_trunc)|` at fixed spacing, maximized over
/// `j ≤ k`; the truncation error estimate for line problems.
pub fn truncation_error<T: Real>(problem: &Comparison1DProblem<T>, k: usize, tol: T) -> Result<T> {
    let ComparisonGeometry::LineTruncated { s_trunc } = problem.geometry else {
        return Ok(T::zero());
    };
    let wide = Comparison1DProblem { gamma: problem.gamma.clone(), geometry: ComparisonGeometry::LineTruncated { s_trunc: s_trunc * lit(2.0) }, n: 2 * problem.n };
    let a = mu_eigenvalues(problem, k, tol)?.values;
    let b = mu_eigenvalues(&wide, k, tol)?.values;
    Ok(a.iter().zip(&b).fold(T::zero(), |m, (x, y)| m.max((*x - *y).abs())))
}

/// Unit-radius closed form `μ_j = (−1/4 + ⌊j/2⌋²) R⁻²`.
pub fn circle_mu<T: Real>(j: usize, radius: T) -> T {
    let m = lit::<T>((j / 2) as f64);
    (m * m - lit(0.25)) / (radius * radius)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::ProfileSpec;

    #[test]
    fn free_loop_has_zero_ground_state() {
        let p = Comparison1DProblem::<f64>::from_profile(ProfileSpec::Zero, ComparisonGeometry::Circle { perimeter: std::f64::consts::TAU }, 256);
        let s = mu_eigenvalues(&p, 1, 1e-10).unwrap();
        assert!(s.values[0].abs() < 1e-10);
    }

    #[test]
    fn free_line_lowest_mode() {
        let p = Comparison1DProblem::<f64>::from_profile(ProfileSpec::Zero, ComparisonGeometry::LineTruncated { s_trunc: 5.0 }, 1000);
        let s = mu_eigenvalues(&p, 1, 1e-10).unwrap();
        let exact = (std::f64::consts::PI / 10.0).powi(2);
        assert!((s.values[0] - exact).abs() < 1e-5 * exact.max(1.0));
        assert!(!s.discrete_flags[0]);
    }

    #[test]
    fn circle_closed_form_index_pattern() {
        assert_eq!(circle_mu(1, 1.0), -0.25);
        assert_eq!(circle_mu(2, 1.0), 0.75);
        assert_eq!(circle_mu(5, 1.0), 3.75);
    }

    #[test]
    fn short_grid_rejected() {
        let p = Comparison1DProblem::<f64>::from_profile(ProfileSpec::Zero, ComparisonGeometry::Circle { perimeter: 1.0 }, 8);
        assert!(assemble_comparison(&p).is_err());
    }
}
