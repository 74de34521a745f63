//! Trial-function functionals: the Rayleigh quotient of a separable
//! boundary-layer trial state, and the deformation functional
//! `S[f] = q_β[f] + β²‖f‖²` for `f = ψ_n(x) e^{−cy}`.

use crate::curve::{BoundaryCurve, Topology};
use crate::error::{Error, Result};
use crate::numeric::{cnt, lit, Real};
use crate::quadrature::adaptive;
use crate::strip::{effective_potential, StripModel, StripSide};

const QUAD_TOL: f64 = 1e-10;
const MAX_INTERVALS: usize = 4000;

/// `χ(x) = exp(−1/(x(1 − x)))` on `(0, 1)`, zero elsewhere.
pub fn chi<T: Real>(x: T) -> T {
    if x <= T::zero() || x >= T::one() {
        return T::zero();
    }
    (-T::one() / (x * (T::one() - x))).exp()
}

/// `χ'(x)`.
pub fn chi_d1<T: Real>(x: T) -> T {
    if x <= T::zero() || x >= T::one() {
        return T::zero();
    }
    let q = x * (T::one() - x);
    chi(x) * (T::one() - lit::<T>(2.0) * x) / (q * q)
}

/// Smooth step: 0 for `t ≤ 0`, 1 for `t ≥ 1`.
fn step<T: Real>(t: T) -> (T, T) {
    if t <= T::zero() {
        return (T::zero(), T::zero());
    }
    if t >= T::one() {
        return (T::one(), T::zero());
    }
    let f = |x: T| (-T::one() / x).exp();
    let df = |x: T| f(x) / (x * x);
    let (p, q) = (f(t), f(T::one() - t));
    let den = p + q;
    (p / den, (df(t) * q + p * df(T::one() - t)) / (den * den))
}

/// Plateau `ψ₁`: 1 on `|x| ≤ 1`, 0 on `|x| ≥ 2`; returns `(ψ₁, ψ₁')`.
pub fn plateau<T: Real>(x: T) -> (T, T) {
    let (v, d) = step(lit::<T>(2.0) - x.abs());
    (v, if x > T::zero() { -d } else { d })
}

/// Separable trial state
/// `χ((s − s* + (2j−1)ε)/(2ε)) (e^{−αu} − e^{−2aα+αu})`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialFunctionSpec<T> {
    pub j: usize,
    pub epsilon: T,
    pub alpha_decay: T,
    pub a: T,
    pub s_star: T,
}

impl<T: Real> TrialFunctionSpec<T> {
    /// `ε = β^{−1/3}`, centered at the curvature maximum with
    /// `α = β + γ*/2` (interior), or at the minimum with `α = β − γ_*/2`
    /// (exterior).
    pub fn defaults(model: &StripModel<T>, j: usize) -> Result<Self> {
        let st = model.stats()?;
        let beta = model.beta;
        let (s_star, alpha) = match model.side {
            StripSide::Exterior => (st.s_lowstar, beta - st.gamma_lowstar * lit(0.5)),
            _ => (st.s_star, beta + st.gamma_star * lit(0.5)),
        };
        Ok(TrialFunctionSpec { j, epsilon: beta.powf(lit(-1.0 / 3.0)), alpha_decay: alpha, a: model.width(), s_star })
    }

    /// Longitudinal support `[s* − (2j−1)ε, s* − (2j−3)ε]`.
    pub fn support(&self) -> (T, T) {
        let jj = cnt::<T>(2 * self.j);
        (self.s_star - (jj - T::one()) * self.epsilon, self.s_star - (jj - lit(3.0)) * self.epsilon)
    }

    /// `(χ_{ε,j}(s), χ_{ε,j}'(s))`.
    pub fn longitudinal(&self, s: T) -> (T, T) {
        let (lo, _) = self.support();
        let two_eps = self.epsilon * lit(2.0);
        let x = (s - lo) / two_eps;
        (chi(x), chi_d1(x) / two_eps)
    }

    /// `(g(u), g'(u))` with `g(u) = e^{−αu} − e^{−2aα+αu}`.
    pub fn transverse(&self, u: T) -> (T, T) {
        let al = self.alpha_decay;
        let p = (-al * u).exp();
        let q = (al * (u - self.a * lit(2.0))).exp();
        (p - q, -al * (p + q))
    }

    fn validate(&self) -> Result<()> {
        if self.j == 0 || !(self.epsilon > T::zero()) || !(self.alpha_decay > T::zero()) || !(self.a > T::zero()) {
            return Err(Error::InvalidInput("trial state needs j ≥ 1 and positive ε, α, a".into()));
        }
        Ok(())
    }
}

/// Terms of the trial quotient, reported separately.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialTerms<T> {
    /// `∫∫ J⁻²|φ_s|²`.
    pub kinetic_s: T,
    /// `∫∫ |φ_u|²`.
    pub kinetic_u: T,
    /// `∫∫ V|φ|²`.
    pub potential: T,
    /// `−∫ σ₀(s)|φ(s,0)|²`.
    pub boundary: T,
    /// `∫∫ |φ|²`.
    pub norm: T,
    pub quotient: T,
}

fn integrate<T: Real, F: FnMut(T) -> T>(f: F, lo: T, hi: T) -> T {
    adaptive(f, lo, hi, lit(QUAD_TOL), lit(QUAD_TOL), MAX_INTERVALS).value
}

/// Quotient of the straightened Dirichlet form (far term dropped, as the
/// trial state vanishes at `u = a`) evaluated by nested adaptive quadrature.
pub fn trial_rayleigh_bound<T: Real>(model: &StripModel<T>, spec: &TrialFunctionSpec<T>) -> Result<TrialTerms<T>> {
    spec.validate()?;
    let st = model.stats()?;
    if !(spec.a * st.gamma_plus < T::one()) {
        return Err(Error::Regime { what: "trial quotient", detail: format!("a*gamma_plus = {} must be below 1", (spec.a * st.gamma_plus).to_f64_lossy()) });
    }
    let (lo, hi) = spec.support();
    if let Topology::InfiniteLine = model.curve.topology() {
        let (wlo, whi) = model.s_range();
        if lo < wlo || hi > whi {
            return Err(Error::UnsupportedGeometry(format!(
                "trial support [{}, {}] leaves the truncation window",
                lo.to_f64_lossy(),
                hi.to_f64_lossy()
            )));
        }
    }
    let side = model.side;
    let curve = &model.curve;
    let a = spec.a;
    let sign = if side == StripSide::Exterior { T::one() } else { -T::one() };
    let mut failure = None;
    let mut inner = |s: T, which: u8| -> T {
        let (c, dc) = spec.longitudinal(s);
        if c == T::zero() && dc == T::zero() {
            return T::zero();
        }
        let g = match curve.curvature(s) {
            Ok(g) => g,
            Err(e) => {
                failure.get_or_insert(e);
                return T::zero();
            }
        };
        integrate(
            |u| {
                let t = spec.transverse(u).0;
                match which {
                    0 => {
                        let j = T::one() + sign * u * g;
                        dc * dc * t * t / (j * j)
                    }
                    _ => c * c * t * t * effective_potential(curve, s, u, side).unwrap_or(T::nan()),
                }
            },
            T::zero(),
            a,
        )
    };
    let kinetic_s = integrate(|s| inner(s, 0), lo, hi);
    let potential = integrate(|s| inner(s, 1), lo, hi);
    if let Some(e) = failure {
        return Err(e);
    }
    let s_norm = integrate(|s| spec.longitudinal(s).0.powi(2), lo, hi);
    let u_norm = integrate(|u| spec.transverse(u).0.powi(2), T::zero(), a);
    let u_kin = integrate(|u| spec.transverse(u).1.powi(2), T::zero(), a);
    let g0 = spec.transverse(T::zero()).0;
    let beta = model.beta;
    let sigma0 = |s: T| {
        let g = curve.curvature(s).unwrap_or(T::nan());
        match side {
            StripSide::Exterior => beta - g * lit(0.5),
            _ => beta + g * lit(0.5),
        }
    };
    let boundary = -integrate(|s| sigma0(s) * spec.longitudinal(s).0.powi(2), lo, hi) * g0 * g0;
    let kinetic_u = s_norm * u_kin;
    let norm = s_norm * u_norm;
    if !(norm > T::zero()) {
        return Err(Error::InvalidInput("trial state has zero norm".into()));
    }
    let total = kinetic_s + kinetic_u + potential + boundary;
    if !total.is_finite() {
        return Err(Error::SingularCoordinates { s: f64::NAN, factor: f64::NAN });
    }
    Ok(TrialTerms { kinetic_s, kinetic_u, potential, boundary, norm, quotient: total / norm })
}

/// Deformation functional at one scale and its large-scale limit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeformationReport<T> {
    /// `S[f_n]`; `None` when the curve is not a localized graph.
    pub s_n: Option<T>,
    /// `∫ψ_n'² e^{−2ch}/(2c)`, the part that vanishes as `n → ∞`.
    pub gradient_term: Option<T>,
    /// `∫ ((β² + c²)/(2c) Γ₁' − β) e^{−2cΓ₂} ds`.
    pub limit: T,
}

/// `S[f_n]` and its limit for `f_n = ψ₁(x/n) e^{−cy}`, `c` defaulting to `β`.
pub fn deformation_functional<T: Real>(curve: &BoundaryCurve<T>, beta: T, n: T, decay_rate: Option<T>) -> Result<DeformationReport<T>> {
    let c = decay_rate.unwrap_or(beta);
    if !(beta > T::zero()) || !(c > T::zero()) || !(n > T::zero()) {
        return Err(Error::InvalidInput("coupling, decay rate and scale must be positive".into()));
    }
    let limit = deformation_limit(curve, beta, c)?;
    let (s_n, gradient_term) = match graph_functional(curve, beta, n, c) {
        Ok((s, g)) => (Some(s), Some(g)),
        Err(Error::UnsupportedGeometry(_)) => (None, None),
        Err(e) => return Err(e),
    };
    Ok(DeformationReport { s_n, gradient_term, limit })
}

/// `(S[f_n], gradient term)` for a graph `y = h(x)`:
/// `∫ ψ_n'² e^{−2ch}/(2c) + ψ_n² e^{−2ch} ((c² + β²)/(2c) − β√(1 + h'²)) dx`.
pub fn graph_functional<T: Real>(curve: &BoundaryCurve<T>, beta: T, n: T, c: T) -> Result<(T, T)> {
    if curve.graph_height(T::zero()).is_none() {
        return Err(Error::UnsupportedGeometry("the deformation functional needs a localized graph".into()));
    }
    let h = |x: T| curve.graph_height(x).expect("graph checked above");
    let two_c = c * lit(2.0);
    let flat = (c * c + beta * beta) / two_c;
    let grad = |x: T| {
        let d = plateau(x / n).1 / n;
        d * d * (-two_c * h(x).0).exp() / two_c
    };
    let full = |x: T| {
        let (p, _) = plateau(x / n);
        let (hx, dh) = h(x);
        grad(x) + p * p * (-two_c * hx).exp() * (flat - beta * (T::one() + dh * dh).sqrt())
    };
    let core = n.min(lit(12.0));
    let mut breaks = vec![-n * lit(2.0), -n, -core, core, n, n * lit(2.0)];
    breaks.sort_by(|a, b| a.partial_cmp(b).expect("finite breakpoints"));
    breaks.dedup();
    let mut total = T::zero();
    let mut gradient = T::zero();
    for w in breaks.windows(2) {
        total += integrate(full, w[0], w[1]);
        gradient += integrate(grad, w[0], w[1]);
    }
    Ok((total, gradient))
}

/// `∫ ((β² + c²)/(2c) Γ₁'(s) − β) e^{−2cΓ₂(s)} ds` over the whole curve,
/// the ray tails in closed form.
pub fn deformation_limit<T: Real>(curve: &BoundaryCurve<T>, beta: T, c: T) -> Result<T> {
    if curve.is_closed() {
        return Err(Error::UnsupportedGeometry("the deformation limit is defined for unbounded curves".into()));
    }
    let two_c = c * lit(2.0);
    let flat = (beta * beta + c * c) / two_c;
    let (lo, hi) = curve.window();
    let mut failure = None;
    let mut f = |s: T| match (curve.tangent(s), curve.point(s)) {
        (Ok(t), Ok(p)) => (flat * t[0] - beta) * (-two_c * p[1]).exp(),
        (Err(e), _) | (_, Err(e)) => {
            failure.get_or_insert(e);
            T::zero()
        }
    };
    let panels = ((hi - lo).to_f64_lossy().ceil() as usize).max(1);
    let width = (hi - lo) / cnt::<T>(panels);
    let mut body = T::zero();
    for i in 0..panels {
        let a = lo + width * cnt::<T>(i);
        body += integrate(&mut f, a, a + width);
    }
    if let Some(e) = failure {
        return Err(e);
    }
    let tail = |s: T, outward: T| -> Result<T> {
        let t = curve.tangent(s)?;
        let y0 = curve.point(s)?[1];
        let rate = outward * t[1];
        let density = flat * t[0] - beta;
        if density.abs() <= T::epsilon() * lit(64.0) * beta.max(T::one()) {
            return Ok(T::zero());
        }
        if !(rate > T::zero()) {
            return Err(Error::UnsupportedGeometry("the limit integral diverges along an end ray".into()));
        }
        Ok(density * (-two_c * y0).exp() / (two_c * rate))
    };
    Ok(body + tail(hi, T::one())? + tail(lo, -T::one())?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::CurveSpec;

    #[test]
    fn chi_norm_scales() {
        let base = integrate(|x: f64| chi(x).powi(2), 0.0, 1.0);
        for eps in [0.1f64, 0.01] {
            let spec = TrialFunctionSpec { j: 1, epsilon: eps, alpha_decay: 1.0, a: 1.0, s_star: 0.0 };
            let v = integrate(|s| spec.longitudinal(s).0.powi(2), -eps, eps);
            assert!((v / (2.0 * eps * base) - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn plateau_shape() {
        assert_eq!(plateau(0.5f64).0, 1.0);
        assert_eq!(plateau(2.5f64).0, 0.0);
        let h = 1e-6;
        let fd = (plateau(1.4f64 + h).0 - plateau(1.4f64 - h).0) / (2.0 * h);
        assert!((fd - plateau(1.4f64).1).abs() < 1e-6);
    }

    #[test]
    fn straight_limit_vanishes() {
        let c: BoundaryCurve<f64> = CurveSpec::Straight.build().unwrap();
        let r = deformation_functional(&c, 1.0, 8.0, None).unwrap();
        assert!(r.limit.abs() <= 1e-10);
    }

    #[test]
    fn sharp_wedge_limit() {
        let alpha = std::f64::consts::FRAC_PI_6;
        let c: BoundaryCurve<f64> = CurveSpec::WedgeSmoothed { half_angle: alpha, fillet: 0.05 }.build().unwrap();
        let r = deformation_functional(&c, 1.0, 8.0, None).unwrap();
        assert!(r.s_n.is_none());
        assert!(r.limit < 0.0 && (r.limit + (alpha / 2.0).tan()).abs() < 0.02, "{}", r.limit);
    }
}
