//! Straightened strip operators along a boundary curve.
//!
//! In coordinates `(s, u)` with `u` the distance to the boundary, the Robin
//! form on the strip of width `a` becomes, after the unitary change
//! `φ = J^{1/2} f`,
//! `∫∫ J⁻²|φ_s|² + |φ_u|² + V|φ|² − ∫ σ₀(s)|φ(s,0)|² + ∫ σ_a(s)|φ(s,a)|²`
//! with `J = 1 ∓ uγ(s)`.

use serde::{Deserialize, Serialize};

use crate::comparison::{longitudinal_eigenvalues, ComparisonGeometry, LongitudinalOperator};
use crate::curve::{curvature_stats, BoundaryCurve, CurvatureStats, Topology};
use crate::eigensolve::{classify_discrete, lowest_eigenpairs, lowest_eigenpairs_with, SolverOptions, Spectrum, SymPencil};
use crate::error::{Error, Result};
use crate::fem::{assemble_tensor, stretched_nodes, uniform_nodes, LongitudinalEnds, PointCoefficients, TensorMesh};
use crate::numeric::{cnt, lit, Real};
use crate::transverse::{robin_robin_eigenvalue, t_dirichlet_eigenvalue, t_neumann_eigenvalue};

use std::sync::Arc;

/// Which region the strip straightens.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum StripSide<T> {
    /// Domain to the left of the curve, `J = 1 − uγ`.
    Interior,
    /// Exterior of a counter-clockwise obstacle, `J = 1 + uγ`.
    Exterior,
    /// Waveguide of width `d` with Robin walls at `u = 0` and `u = d`.
    Waveguide { d: T },
}

/// Condition imposed on the artificial boundary `u = a`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FarCondition {
    Dirichlet,
    Neumann,
}

/// Element counts and degrees of the tensor grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StripMesh {
    pub n_s: usize,
    pub n_u: usize,
    pub degree_s: usize,
    pub degree_u: usize,
    /// tanh clustering of the `u` nodes towards the Robin walls; 0 is uniform.
    pub stretch: f64,
}

impl Default for StripMesh {
    fn default() -> Self {
        StripMesh { n_s: 512, n_u: 128, degree_s: 1, degree_u: 1, stretch: 0.0 }
    }
}

/// `a = 3 log β / β`.
pub fn default_width<T: Real>(beta: T) -> T {
    lit::<T>(3.0) * beta.ln() / beta
}

/// A strip operator: curve, side, width, coupling and discretization.
#[derive(Debug, Clone)]
pub struct StripModel<T: Real> {
    pub curve: BoundaryCurve<T>,
    pub side: StripSide<T>,
    pub a: T,
    pub beta: T,
    pub far_bc: FarCondition,
    /// Infinite curves are cut to `[−s_trunc, s_trunc]`.
    pub s_trunc: T,
    /// End condition at `±s_trunc`; closed curves are always periodic.
    pub ends: LongitudinalEnds,
    pub mesh: StripMesh,
    /// Start-vector seed of the eigensolver.
    pub seed: u64,
}

impl<T: Real> StripModel<T> {
    /// Defaults: `a = 3 log β / β` (or `d` for a waveguide), Dirichlet far
    /// side and ends, `s_trunc = 12`, bilinear 512 × 128 grid.
    pub fn new(curve: BoundaryCurve<T>, side: StripSide<T>, beta: T) -> Self {
        let a = match side {
            StripSide::Waveguide { d } => d,
            _ => default_width(beta),
        };
        StripModel {
            curve,
            side,
            a,
            beta,
            far_bc: FarCondition::Dirichlet,
            s_trunc: lit(12.0),
            ends: LongitudinalEnds::Dirichlet,
            mesh: StripMesh::default(),
            seed: 0,
        }
    }

    pub fn with_width(mut self, a: T) -> Self {
        self.a = a;
        self
    }

    pub fn with_far(mut self, far: FarCondition) -> Self {
        self.far_bc = far;
        self
    }

    pub fn with_truncation(mut self, s_trunc: T) -> Self {
        self.s_trunc = s_trunc;
        self
    }

    pub fn with_ends(mut self, ends: LongitudinalEnds) -> Self {
        self.ends = ends;
        self
    }

    pub fn with_mesh(mut self, mesh: StripMesh) -> Self {
        self.mesh = mesh;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// Strip width actually used: `d` for a waveguide.
    pub fn width(&self) -> T {
        match self.side {
            StripSide::Waveguide { d } => d,
            _ => self.a,
        }
    }

    /// Longitudinal parameter range.
    pub fn s_range(&self) -> (T, T) {
        match self.curve.topology() {
            Topology::ClosedLoop { perimeter } => (T::zero(), perimeter),
            Topology::InfiniteLine => (-self.s_trunc, self.s_trunc),
        }
    }

    fn effective_ends(&self) -> LongitudinalEnds {
        if self.curve.is_closed() {
            LongitudinalEnds::Periodic
        } else {
            self.ends
        }
    }

    /// Curvature extrema over the longitudinal range.
    pub fn stats(&self) -> Result<CurvatureStats<T>> {
        let (lo, hi) = self.s_range();
        curvature_stats(&self.curve, (lo, hi), 2001)
    }

    /// Bottom of the essential spectrum: `−β²` for interiors, `0` for
    /// exteriors, and `−κ²` with `κ tanh(κd/2) = β` for waveguides.
    pub fn threshold(&self) -> Result<T> {
        Ok(match self.side {
            StripSide::Interior => -self.beta * self.beta,
            StripSide::Exterior => T::zero(),
            StripSide::Waveguide { d } => robin_robin_eigenvalue(d, self.beta, -self.beta)?,
        })
    }

    fn validate(&self) -> Result<()> {
        if !(self.beta > T::zero()) || !self.beta.is_finite() {
            return Err(Error::InvalidInput("Robin coupling must be positive".into()));
        }
        let w = self.width();
        if !(w > T::zero()) || !w.is_finite() {
            return Err(Error::InvalidInput("strip width must be positive".into()));
        }
        if !self.curve.is_closed() && !(self.s_trunc > T::zero()) {
            return Err(Error::InvalidInput("truncation length must be positive".into()));
        }
        if self.mesh.n_s < 8 || self.mesh.n_u < 8 {
            return Err(Error::InvalidInput(format!("mesh {}x{} is too coarse, need at least 8x8", self.mesh.n_s, self.mesh.n_u)));
        }
        if self.mesh.degree_s == 0 || self.mesh.degree_u == 0 || self.mesh.degree_s > 6 || self.mesh.degree_u > 6 {
            return Err(Error::InvalidInput("element degrees must lie in 1..=6".into()));
        }
        if !(self.mesh.stretch >= 0.0) {
            return Err(Error::InvalidInput("stretch must be non-negative".into()));
        }
        let (lo, hi) = self.s_range();
        let n = 4 * self.mesh.n_s * self.mesh.degree_s + 1;
        for i in 0..n {
            let s = lo + (hi - lo) * cnt::<T>(i) / cnt::<T>(n - 1);
            let g = self.curve.curvature(s)?;
            let j = self.jacobian(g, w);
            if !(j > T::zero()) {
                return Err(Error::SingularCoordinates { s: s.to_f64_lossy(), factor: j.to_f64_lossy() });
            }
        }
        Ok(())
    }

    fn jacobian(&self, gamma: T, u: T) -> T {
        match self.side {
            StripSide::Exterior => T::one() + u * gamma,
            _ => T::one() - u * gamma,
        }
    }

    /// Coefficient of `|φ(s,0)|²`.
    fn near_coefficient(&self, gamma: T) -> T {
        match self.side {
            StripSide::Exterior => -(self.beta - gamma * lit(0.5)),
            _ => -(gamma * lit(0.5) + self.beta),
        }
    }

    /// Coefficient of `|φ(s,a)|²` when the far side is free.
    fn far_coefficient(&self, gamma: T) -> T {
        let w = self.width();
        match self.side {
            StripSide::Interior => gamma / ((T::one() - w * gamma) * lit(2.0)),
            StripSide::Exterior => -gamma / ((T::one() + w * gamma) * lit(2.0)),
            StripSide::Waveguide { d } => gamma / ((T::one() - d * gamma) * lit(2.0)) - self.beta,
        }
    }

    fn far_is_dirichlet(&self) -> bool {
        !matches!(self.side, StripSide::Waveguide { .. }) && self.far_bc == FarCondition::Dirichlet
    }

    fn tensor_mesh(&self) -> TensorMesh<T> {
        let (lo, hi) = self.s_range();
        let two_sided = matches!(self.side, StripSide::Waveguide { .. });
        TensorMesh {
            s: uniform_nodes(lo, hi, self.mesh.n_s),
            u: stretched_nodes(self.width(), self.mesh.n_u, lit(self.mesh.stretch), two_sided),
            degree_s: self.mesh.degree_s,
            degree_u: self.mesh.degree_u,
            ends: self.effective_ends(),
            far_dirichlet: self.far_is_dirichlet(),
        }
    }

    /// A level below every Rayleigh quotient of the discrete form.
    fn lower_hint(&self) -> Result<T> {
        let (lo, hi) = self.s_range();
        let w = self.width();
        let n = 2001;
        let mut sigma = T::zero();
        let mut vmin = T::zero();
        for i in 0..n {
            let s = lo + (hi - lo) * cnt::<T>(i) / cnt::<T>(n - 1);
            let g = self.curve.curvature(s)?;
            let mut sig = (-self.near_coefficient(g)).max(T::zero());
            if !self.far_is_dirichlet() {
                sig = sig.max(-self.far_coefficient(g));
            }
            sigma = sigma.max(sig);
            for k in 0..=8 {
                let u = w * cnt::<T>(k) / lit(8.0);
                vmin = vmin.min(effective_potential(&self.curve, s, u, self.side)?);
            }
        }
        let base = sigma * sigma * lit(1.3) + sigma * lit(2.0) / w + lit::<T>(2.0) / (w * w);
        Ok(-base + vmin * lit(1.5) - T::one())
    }
}

/// `V(s, u)`: `−γ²/(4J²) ∓ uγ''/(2J³) − (5/4)u²γ'²/J⁴` with `J = 1 ∓ uγ`
/// (upper signs for the interior and waveguide, lower for the exterior).
pub fn effective_potential<T: Real>(curve: &BoundaryCurve<T>, s: T, u: T, side: StripSide<T>) -> Result<T> {
    let [g, g1, g2] = curve.curvature_jet(s)?;
    potential_from_jet(g, g1, g2, u, side).ok_or(Error::SingularCoordinates { s: s.to_f64_lossy(), factor: jac(g, u, side).to_f64_lossy() })
}

fn jac<T: Real>(g: T, u: T, side: StripSide<T>) -> T {
    match side {
        StripSide::Exterior => T::one() + u * g,
        _ => T::one() - u * g,
    }
}

fn potential_from_jet<T: Real>(g: T, g1: T, g2: T, u: T, side: StripSide<T>) -> Option<T> {
    let j = jac(g, u, side);
    if !(j > T::zero()) {
        return None;
    }
    let sign = match side {
        StripSide::Exterior => T::one(),
        _ => -T::one(),
    };
    Some(-g * g / (lit::<T>(4.0) * j * j) + sign * u * g2 / (lit::<T>(2.0) * j * j * j) - lit::<T>(1.25) * u * u * g1 * g1 / (j * j * j * j))
}

/// Discretization of the straightened form; Dirichlet rows on `u = a` are
/// eliminated when the far condition is Dirichlet.
pub fn assemble_strip<T: Real>(model: &StripModel<T>) -> Result<SymPencil<T>> {
    model.validate()?;
    let mesh = model.tensor_mesh();
    let side = model.side;
    let curve = &model.curve;
    let (a, b, _) = assemble_tensor(
        &mesh,
        |s, u| {
            let [g, g1, g2] = curve.curvature_jet(s).unwrap_or([T::nan(); 3]);
            let j = jac(g, u, side);
            PointCoefficients {
                ds: T::one() / (j * j),
                du: T::one(),
                potential: potential_from_jet(g, g1, g2, u, side).unwrap_or(T::nan()),
                mass: T::one(),
            }
        },
        |s| model.near_coefficient(curve.curvature(s).unwrap_or(T::nan())),
        |s| model.far_coefficient(curve.curvature(s).unwrap_or(T::nan())),
    )?;
    if a.values().iter().any(|v| !v.is_finite()) {
        return Err(Error::SingularCoordinates { s: f64::NAN, factor: f64::NAN });
    }
    let label = format!("strip {:?} far={:?}", model.side, model.far_bc);
    Ok(SymPencil::new(a, b, label).with_lower_hint(model.lower_hint()?))
}

/// The `k` lowest strip eigenvalues, flagged against the threshold.
pub fn strip_eigenvalues<T: Real>(model: &StripModel<T>, k: usize, tol: T) -> Result<Spectrum<T>> {
    let pencil = assemble_strip(model)?;
    let opts = SolverOptions { tol, seed: model.seed, ..SolverOptions::default() };
    let spec = lowest_eigenpairs_with(&pencil, k, &opts)?;
    Ok(classify_discrete(spec, model.threshold()?, T::zero()))
}

/// Two-sided enclosure from the Neumann-far (lower) and Dirichlet-far
/// (upper) strip models on the same grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Enclosure<T> {
    pub lower: Vec<T>,
    pub upper: Vec<T>,
    pub threshold: T,
    /// Largest solver residual over both models.
    pub residual: T,
}

impl<T: Real> Enclosure<T> {
    /// Bracketing order holds for every computed index.
    pub fn ordered(&self) -> bool {
        self.lower.iter().zip(&self.upper).all(|(l, u)| *l <= *u)
    }
}

pub fn bracket_eigenvalues<T: Real>(model: &StripModel<T>, k: usize, tol: T) -> Result<Enclosure<T>> {
    if matches!(model.side, StripSide::Waveguide { .. }) {
        return Err(Error::UnsupportedGeometry("a waveguide has no artificial far boundary to bracket".into()));
    }
    let n_model = model.clone().with_far(FarCondition::Neumann);
    let d_model = model.clone().with_far(FarCondition::Dirichlet);
    let (lo, up) = rayon::join(|| strip_eigenvalues(&n_model, k, tol), || strip_eigenvalues(&d_model, k, tol));
    let (lo, up) = (lo?, up?);
    let residual = lo.residuals.iter().chain(&up.residuals).fold(T::zero(), |m, r| m.max(*r));
    Ok(Enclosure { lower: lo.values, upper: up.values, threshold: model.threshold()?, residual })
}

/// Bounds from the separated operators `U ⊗ I + I ⊗ T`.
#[derive(Debug, Clone, PartialEq)]
pub struct SeparatedBounds<T> {
    pub upper: Vec<T>,
    pub lower: Vec<T>,
    pub mu_dirichlet: Vec<T>,
    pub mu_neumann: Vec<T>,
    pub zeta_dirichlet: T,
    pub zeta_neumann: T,
}

/// `μ_j^D(a) + ζ^D(a, σ₀ᴰ)` and `μ_j^N(a) + ζ^N(a, σ₀ᴺ, σ_a)`, where
/// `μ^{D/N}(a)` are eigenvalues of `−(1 ∓ aγ₊)⁻² d²/ds² + V_±`.
pub fn separated_bounds<T: Real>(model: &StripModel<T>, k: usize) -> Result<SeparatedBounds<T>> {
    if matches!(model.side, StripSide::Waveguide { .. }) {
        return Err(Error::UnsupportedGeometry("separated bounds are defined for one Robin wall".into()));
    }
    model.validate()?;
    let st = model.stats()?;
    let a = model.a;
    let gp = st.gamma_plus;
    if !(a * gp * lit(2.0) < T::one()) {
        return Err(Error::Regime { what: "separated bounds", detail: format!("a*gamma_plus = {} must be below 1/2", (a * gp).to_f64_lossy()) });
    }
    let (g1p, g2p) = (st.gamma1_plus, st.gamma2_plus);
    let lo_j = T::one() - a * gp;
    let hi_j = T::one() + a * gp;
    let curve_p = model.curve.clone();
    let curve_m = model.curve.clone();
    let v_plus = move |s: T| {
        let g = curve_p.curvature(s).unwrap_or(T::zero());
        -g * g / (lit::<T>(4.0) * hi_j * hi_j) + a * g2p / (lit::<T>(2.0) * lo_j * lo_j * lo_j)
    };
    let v_minus = move |s: T| {
        let g = curve_m.curvature(s).unwrap_or(T::zero());
        -g * g / (lit::<T>(4.0) * lo_j * lo_j) - a * g2p / (lit::<T>(2.0) * lo_j * lo_j * lo_j) - lit::<T>(1.25) * a * a * g1p * g1p / (lo_j * lo_j * lo_j * lo_j)
    };
    let geometry = match model.curve.topology() {
        Topology::ClosedLoop { perimeter } => ComparisonGeometry::Circle { perimeter },
        Topology::InfiniteLine => ComparisonGeometry::LineTruncated { s_trunc: model.s_trunc },
    };
    let n = match geometry {
        ComparisonGeometry::Circle { .. } => 1024,
        ComparisonGeometry::LineTruncated { .. } => 2048,
    };
    let tol = lit(1e-10);
    let op_d = LongitudinalOperator { kinetic: T::one() / (lo_j * lo_j), potential: Arc::new(v_plus), geometry, n };
    let op_n = LongitudinalOperator { kinetic: T::one() / (hi_j * hi_j), potential: Arc::new(v_minus), geometry, n };
    let mu_d = longitudinal_eigenvalues(&op_d, k, tol)?.values;
    let mu_n = longitudinal_eigenvalues(&op_n, k, tol)?.values;
    let (g_sup, g_inf) = (st.gamma_star, st.gamma_lowstar);
    let beta = model.beta;
    let (sig_d, sig_n, sig_a) = match model.side {
        StripSide::Interior => (beta + g_inf * lit(0.5), beta + g_sup * lit(0.5), g_inf / ((T::one() - a * g_inf) * lit(2.0))),
        _ => (beta - g_sup * lit(0.5), beta - g_inf * lit(0.5), -g_sup / ((T::one() + a * g_sup) * lit(2.0))),
    };
    let zeta_d = t_dirichlet_eigenvalue(a, sig_d)?;
    let zeta_n = t_neumann_eigenvalue(a, sig_n, sig_a)?;
    Ok(SeparatedBounds {
        upper: mu_d.iter().map(|m| *m + zeta_d).collect(),
        lower: mu_n.iter().map(|m| *m + zeta_n).collect(),
        mu_dirichlet: mu_d,
        mu_neumann: mu_n,
        zeta_dirichlet: zeta_d,
        zeta_neumann: zeta_n,
    })
}

/// Lowest eigenvalue of the unreduced form
/// `∫∫ J⁻¹|ψ_s|² + J|ψ_u|² − β∫|ψ(s,0)|²` against `∫∫ J|ψ|²`,
/// `J = 1 − uγ`, with a free far side. Requires an interior strip.
pub fn weighted_form_lowest<T: Real>(model: &StripModel<T>) -> Result<T> {
    if model.side != StripSide::Interior {
        return Err(Error::UnsupportedGeometry("the weighted form is assembled for interior strips".into()));
    }
    let m = model.clone().with_far(FarCondition::Neumann);
    m.validate()?;
    let mut mesh = m.tensor_mesh();
    mesh.far_dirichlet = false;
    let curve = &m.curve;
    let beta = m.beta;
    let (a, b, _) = assemble_tensor(
        &mesh,
        |s, u| {
            let j = T::one() - u * curve.curvature(s).unwrap_or(T::nan());
            PointCoefficients { ds: T::one() / j, du: j, potential: T::zero(), mass: j }
        },
        |_| -beta,
        |_| T::zero(),
    )?;
    let hint = -(beta * beta) * lit(1.3) - beta * lit(2.0) / m.a - T::one();
    let pencil = SymPencil::new(a, b, "weighted strip form").with_lower_hint(hint);
    Ok(lowest_eigenpairs(&pencil, 1, lit(1e-10))?.values[0])
}

/// `true` iff the weighted-form ground state of a non-positively curved
/// interior strip stays at or above `−β²(1 + tolerance)`.
pub fn concavity_check<T: Real>(model: &StripModel<T>, tolerance: T) -> Result<bool> {
    let (lo, hi) = model.s_range();
    let n = 4001;
    for i in 0..n {
        let s = lo + (hi - lo) * cnt::<T>(i) / cnt::<T>(n - 1);
        let g = model.curve.curvature(s)?;
        if g > T::epsilon() * lit(16.0) {
            return Err(Error::Regime { what: "concavity check", detail: format!("positive curvature {} at s = {}", g.to_f64_lossy(), s.to_f64_lossy()) });
        }
    }
    weighted_form_check(model, tolerance)
}

/// The same comparison without the sign precondition.
pub fn weighted_form_check<T: Real>(model: &StripModel<T>, tolerance: T) -> Result<bool> {
    let lowest = weighted_form_lowest(model)?;
    Ok(lowest >= -model.beta * model.beta * (T::one() + tolerance))
}

/// Eigenvalues at `s_trunc` and at `2 s_trunc` (twice the longitudinal
/// elements, same spacing).
#[derive(Debug, Clone, PartialEq)]
pub struct TruncationStudy<T> {
    pub values: Vec<T>,
    pub doubled: Vec<T>,
    /// Largest `|values − doubled|`.
    pub error: T,
}

pub fn truncation_study<T: Real>(model: &StripModel<T>, k: usize, tol: T) -> Result<TruncationStudy<T>> {
    if model.curve.is_closed() {
        return Err(Error::InvalidInput("closed curves are not truncated".into()));
    }
    let wide = model.clone().with_truncation(model.s_trunc * lit(2.0)).with_mesh(StripMesh { n_s: 2 * model.mesh.n_s, ..model.mesh });
    let (a, b) = rayon::join(|| strip_eigenvalues(model, k, tol), || strip_eigenvalues(&wide, k, tol));
    let (values, doubled) = (a?.values, b?.values);
    let error = values.iter().zip(&doubled).fold(T::zero(), |m, (x, y)| m.max((*x - *y).abs()));
    Ok(TruncationStudy { values, doubled, error })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::CurveSpec;
    use crate::profile::ProfileSpec;
    use crate::transverse::robin_dirichlet_eigenvalue;

    fn straight() -> BoundaryCurve<f64> {
        CurveSpec::Straight.build().unwrap()
    }

    #[test]
    fn truncation_error_shrinks_for_flat_strip() {
        let m = StripModel::new(straight(), StripSide::Interior, 5.0)
            .with_truncation(3.0)
            .with_mesh(StripMesh { n_s: 12, n_u: 8, degree_s: 3, degree_u: 4, stretch: 1.0 });
        let st = truncation_study(&m, 1, 1e-10).unwrap();
        // Only the longitudinal Dirichlet mode (π/2S)² moves.
        let expect = (std::f64::consts::PI / 6.0).powi(2) * 0.75;
        assert!((st.error - expect).abs() < 1e-5, "{st:?}");
        assert!(st.doubled[0] < st.values[0]);
    }

    #[test]
    fn flat_potential_vanishes() {
        let c = straight();
        assert_eq!(effective_potential(&c, 0.3, 0.2, StripSide::Interior).unwrap(), 0.0);
        let circle: BoundaryCurve<f64> = CurveSpec::Circle { radius: 1.0 }.build().unwrap();
        assert!((effective_potential(&circle, 0.7, 0.0, StripSide::Exterior).unwrap() + 0.25).abs() < 1e-14);
    }

    #[test]
    fn flat_strip_separates() {
        let (beta, a, s) = (5.0, 3.0, 4.0);
        let m = StripModel::new(straight(), StripSide::Interior, beta)
            .with_width(a)
            .with_truncation(s)
            .with_mesh(StripMesh { n_s: 16, n_u: 24, degree_s: 3, degree_u: 4, stretch: 2.0 });
        let spec = strip_eigenvalues(&m, 1, 1e-10).unwrap();
        let exact = robin_dirichlet_eigenvalue(a, beta).unwrap() + (std::f64::consts::PI / (2.0 * s)).powi(2);
        assert!((spec.values[0] - exact).abs() < 1e-5 * exact.abs(), "{} vs {}", spec.values[0], exact);
    }

    #[test]
    fn waveguide_checks_walls() {
        let c: BoundaryCurve<f64> = CurveSpec::FromCurvature {
            profile: ProfileSpec::Sech { amp: 2.0, center: 0.0, width: 1.0 },
            window: [-20.0, 20.0],
            anchor: None,
            initial_angle: 0.0,
            closed: false,
        }
        .build()
        .unwrap();
        let m = StripModel::new(c, StripSide::Waveguide { d: 1.0 }, 3.0).with_mesh(StripMesh { n_s: 64, n_u: 8, ..StripMesh::default() });
        assert!(matches!(assemble_strip(&m), Err(Error::SingularCoordinates { .. })));
    }

    #[test]
    fn coarse_mesh_rejected() {
        let m = StripModel::new(straight(), StripSide::Interior, 5.0).with_mesh(StripMesh { n_s: 4, ..StripMesh::default() });
        assert!(matches!(assemble_strip(&m), Err(Error::InvalidInput(_))));
    }
}
