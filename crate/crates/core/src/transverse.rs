//! One-dimensional Robin interval problems across the strip.
//!
//! On `(0, a)` the form is `∫|φ'|² − σ₀|φ(0)|²` plus, at `u = a`, either a
//! Dirichlet condition, nothing (Neumann) or `+σ_a|φ(a)|²`.

use serde::{Deserialize, Serialize};

use crate::eigensolve::SymPencil;
use crate::error::{Error, Result};
use crate::fem::{assemble_1d, stretched_nodes, End, Mesh1d};
use crate::numeric::{lit, Real};
use crate::roots::{bisect, largest_root};

/// Condition at the far end `u = a`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FarBc<T> {
    Dirichlet,
    Neumann,
    /// Boundary term `+σ_a |φ(a)|²`.
    Robin(T),
}

/// Interval data `(a, σ₀, far condition)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransverseProblem<T> {
    pub a: T,
    pub sigma0: T,
    pub far: FarBc<T>,
}

impl<T: Real> TransverseProblem<T> {
    pub fn new(a: T, sigma0: T, far: FarBc<T>) -> Result<Self> {
        if !(a > T::zero()) {
            return Err(Error::InvalidInput("interval width must be positive".into()));
        }
        if !sigma0.is_finite() {
            return Err(Error::InvalidInput("Robin coefficient must be finite".into()));
        }
        Ok(TransverseProblem { a, sigma0, far })
    }

    /// Lowest eigenvalue from the transcendental equations, when negative.
    pub fn exact_lowest(&self) -> Result<T> {
        match self.far {
            FarBc::Dirichlet => robin_dirichlet_eigenvalue(self.a, self.sigma0),
            FarBc::Neumann => robin_robin_eigenvalue(self.a, self.sigma0, T::zero()),
            FarBc::Robin(sa) => robin_robin_eigenvalue(self.a, self.sigma0, sa),
        }
    }
}

const TOL: f64 = 1e-15;

/// `ζ^D`: negative eigenvalue of the Robin–Dirichlet interval, valid for
/// `a σ₀ > 4/3`, where it is unique and
/// `−σ₀² ≤ ζ^D ≤ −σ₀² + 4σ₀² e^{−aσ₀}`.
pub fn t_dirichlet_eigenvalue<T: Real>(a: T, sigma0: T) -> Result<T> {
    if !(a > T::zero()) || !(a * sigma0 > lit(4.0 / 3.0)) {
        return Err(Error::Regime { what: "Robin-Dirichlet interval", detail: format!("a*sigma0 = {} must exceed 4/3", (a * sigma0).to_f64_lossy()) });
    }
    robin_dirichlet_eigenvalue(a, sigma0)
}

/// Negative eigenvalue `−κ²` with `κ coth(κa) = σ₀` (eigenfunction
/// `sinh(κ(a − u))`); exists iff `aσ₀ > 1`.
pub fn robin_dirichlet_eigenvalue<T: Real>(a: T, sigma0: T) -> Result<T> {
    if !(a * sigma0 > T::one()) {
        return Err(Error::NoBoundState(format!("a*sigma0 = {} <= 1", (a * sigma0).to_f64_lossy())));
    }
    // f < 0 near 0⁺ because aσ₀ > 1, and f(σ₀) = σ₀(1 − tanh(aσ₀)) ≥ 0.
    let f = |k: T| k - sigma0 * (k * a).tanh();
    let mut lo = sigma0 * lit(1e-3);
    while f(lo) >= T::zero() {
        lo *= lit(0.1);
        if lo < T::min_positive_value() * lit(1e10) {
            return Err(Error::NoBracket { lo: 0.0, hi: sigma0.to_f64_lossy() });
        }
    }
    let kappa = bisect(f, lo, sigma0, lit(TOL))?;
    Ok(-kappa * kappa)
}

/// `ζ^N`: the negative eigenvalue of the Robin–Robin interval
/// (`σ_a` at the far end), valid for `σ₀ > max(|σ_a|, 2 log 5 / (3a))`,
/// where `−σ₀² − (45/4)σ₀² e^{−aσ₀} ≤ ζ^N ≤ −σ₀²`.
pub fn t_neumann_eigenvalue<T: Real>(a: T, sigma0: T, sigma_a: T) -> Result<T> {
    let bound = sigma_a.abs().max(lit::<T>(2.0 * 5f64.ln() / 3.0) / a);
    if !(a > T::zero()) || !(sigma0 > bound) {
        return Err(Error::Regime {
            what: "Robin-Robin interval",
            detail: format!("sigma0 = {} must exceed {}", sigma0.to_f64_lossy(), bound.to_f64_lossy()),
        });
    }
    robin_robin_eigenvalue(a, sigma0, sigma_a)
}

/// Lowest eigenvalue `−κ²` of `−φ''` on `(0, a)` with `φ'(0) = −σ₀φ(0)` and
/// `φ'(a) = −σ_aφ(a)`: the largest positive root of
/// `(κ² − σ₀σ_a) tanh(κa) − κ(σ₀ − σ_a) = 0`.
pub fn robin_robin_eigenvalue<T: Real>(a: T, sigma0: T, sigma_a: T) -> Result<T> {
    if !(a > T::zero()) {
        return Err(Error::InvalidInput("interval width must be positive".into()));
    }
    // Written as (κ − σ₀)(κ + σ_a) − (κ² − σ₀σ_a)(1 − tanh κa) so that the
    // nearly double root at large κa is not lost to cancellation.
    let g = |k: T| {
        let e = (lit::<T>(-2.0) * k * a).exp();
        let one_minus_tanh = e * lit(2.0) / (T::one() + e);
        (k - sigma0) * (k + sigma_a) - (k * k - sigma0 * sigma_a) * one_minus_tanh
    };
    let hi = (sigma0.abs() + sigma_a.abs()) * lit(2.0) + lit::<T>(10.0) / a;
    let none = || Error::NoBoundState("no negative Robin-Robin eigenvalue".into());
    let pivot = sigma0.max(-sigma_a);
    if pivot > T::zero() {
        let gp = g(pivot);
        if gp == T::zero() {
            return Ok(-pivot * pivot);
        }
        if gp < T::zero() {
            let kappa = bisect(g, pivot, hi, lit(TOL))?;
            return Ok(-kappa * kappa);
        }
    }
    let floor = hi * lit(1e-9);
    let kappa = largest_root(g, floor, hi, 4000, lit(TOL)).map_err(|_| none())?;
    if kappa <= floor * lit(2.0) {
        return Err(none());
    }
    Ok(-kappa * kappa)
}

/// `ζ(b) > β` solving `(ζ − β)/(ζ + β) = e^{−2ζb}`; the Robin–Neumann
/// interval `(0, b)` has spectral bottom `−ζ²`.
pub fn robin_neumann_threshold<T: Real>(b: T, beta: T) -> Result<T> {
    if !(b > T::zero()) || !(beta > T::zero()) {
        return Err(Error::InvalidInput("width and coupling must be positive".into()));
    }
    let f = |z: T| (z - beta) - (z + beta) * (lit::<T>(-2.0) * z * b).exp();
    let lo = beta;
    let mut hi = beta * lit(2.0);
    while f(hi) <= T::zero() {
        hi *= lit(2.0);
        if !hi.is_finite() {
            return Err(Error::NoBracket { lo: beta.to_f64_lossy(), hi: f64::INFINITY });
        }
    }
    if f(lo) >= T::zero() {
        // e^{−2βb} underflowed: the root coincides with β in this precision.
        return Ok(lo);
    }
    bisect(f, lo, hi, lit(TOL))
}

/// Linear-element pencil of the transverse form on `n` uniform elements.
pub fn assemble_transverse<T: Real>(problem: &TransverseProblem<T>, n: usize) -> Result<SymPencil<T>> {
    assemble_transverse_with(problem, n, 1, T::zero())
}

/// As [`assemble_transverse`] with element degree `degree` and nodes
/// clustered towards `u = 0` by a tanh stretch of strength `stretch`.
pub fn assemble_transverse_with<T: Real>(problem: &TransverseProblem<T>, n: usize, degree: usize, stretch: T) -> Result<SymPencil<T>> {
    if n < 16 {
        return Err(Error::InvalidInput(format!("transverse grid needs at least 16 elements, got {n}")));
    }
    let right = match problem.far {
        FarBc::Dirichlet => End::Dirichlet,
        FarBc::Neumann => End::Robin(T::zero()),
        FarBc::Robin(sa) => End::Robin(sa),
    };
    let mesh = Mesh1d { nodes: stretched_nodes(problem.a, n, stretch, false), degree, periodic: false, left: End::Robin(-problem.sigma0), right };
    let (a, b, _) = assemble_1d(&mesh, |_| T::one(), |_| T::zero(), |_| T::one())?;
    let s = problem.sigma0.abs();
    let extra = match problem.far {
        FarBc::Robin(sa) => sa.abs(),
        _ => T::zero(),
    };
    let hint = -((s + extra) * (s + extra)) * lit(1.5) - (s + extra) * lit(4.0) / problem.a - lit(1.0);
    Ok(SymPencil::new(a, b, "transverse Robin interval").with_lower_hint(hint))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dirichlet_sandwich_example() {
        let z = t_dirichlet_eigenvalue(2.0f64, 10.0).unwrap();
        assert!(z >= -100.0 && z <= -100.0 + 400.0 * (-20f64).exp());
    }

    #[test]
    fn neumann_sandwich_example() {
        let z = t_neumann_eigenvalue(2.0f64, 10.0, 0.3).unwrap();
        assert!(z <= -100.0 && z >= -100.0 - 1125.0 * (-20f64).exp());
    }

    #[test]
    fn regimes_are_enforced() {
        assert!(matches!(t_dirichlet_eigenvalue(1.0f64, 1.2), Err(Error::Regime { .. })));
        assert!(matches!(t_neumann_eigenvalue(1.0f64, 0.5, 0.0), Err(Error::Regime { .. })));
    }

    #[test]
    fn threshold_values() {
        let z = robin_neumann_threshold(1.0f64, 1.0).unwrap();
        assert!((z * (z).tanh() - 1.0).abs() < 1e-14);
        let z2 = robin_neumann_threshold(2.0f64, 1.0).unwrap();
        assert!(z2 > 1.0 && z2 < z);
        assert_eq!(robin_neumann_threshold(1e3f64, 1.0).unwrap(), 1.0);
    }

    #[test]
    fn symmetric_strip_mode() {
        // φ'(0) = −βφ(0), φ'(d) = +βφ(d): even mode with κ tanh(κd/2) = β.
        let (d, beta) = (1.0f64, 1.0);
        let z = robin_robin_eigenvalue(d, beta, -beta).unwrap();
        let k = (-z).sqrt();
        assert!((k * (k * d / 2.0).tanh() - beta).abs() < 1e-13);
    }

    #[test]
    fn strong_coupling_wide_strip() {
        for beta in [20.0f64, 80.0, 400.0] {
            let z = robin_robin_eigenvalue(1.0, beta, -beta).unwrap();
            let k = (-z).sqrt();
            assert!(k >= beta && (k - beta) <= 1e-12 * beta + 4.0 * beta * (-beta).exp());
        }
    }

    #[test]
    fn no_bound_state_for_weak_coupling() {
        assert!(robin_dirichlet_eigenvalue(1.0f64, 0.9).is_err());
        assert!(robin_robin_eigenvalue(1.0f64, 0.2, 2.0).is_err());
    }
}
