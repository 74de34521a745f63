//! Scalar curvature profiles `s ↦ γ(s)` with first and second derivatives.

use std::fmt::Debug;

use serde::{Deserialize, Serialize};

use crate::numeric::{lit, Real};

/// A smooth real function of arc length.
pub trait Profile<T: Real>: Send + Sync + Debug {
    fn value(&self, s: T) -> T;

    fn d1(&self, s: T) -> T {
        let h = step(s);
        (self.value(s + h) - self.value(s - h)) / (h + h)
    }

    fn d2(&self, s: T) -> T {
        let h = step(s) * lit(10.0);
        (self.value(s + h) - lit::<T>(2.0) * self.value(s) + self.value(s - h)) / (h * h)
    }
}

fn step<T: Real>(s: T) -> T {
    T::epsilon().cbrt() * s.abs().max(T::one())
}

/// Built-in profiles, constructible from JSON (`{"kind": "sech", ...}`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProfileSpec {
    Zero,
    Constant { value: f64 },
    /// `amp · sech((s − center)/width)`.
    Sech { amp: f64, #[serde(default)] center: f64, #[serde(default = "one")] width: f64 },
    /// `amp / (1 + ((s − center)/width)²)`.
    Lorentzian { amp: f64, #[serde(default)] center: f64, #[serde(default = "one")] width: f64 },
    /// `amp · (1 − x²)⁵` for `|x| < 1`, `x = (s − center)/half_width`; C⁴.
    PolyBump { amp: f64, #[serde(default)] center: f64, half_width: f64 },
    Sum { terms: Vec<ProfileSpec> },
}

fn one() -> f64 {
    1.0
}

/// `∫_{-1}^{1} (1 − x²)⁵ dx`.
pub const POLY_BUMP_MASS: f64 = 512.0 / 693.0;

impl ProfileSpec {
    /// Profile with total integral `turning` supported on `|s − center| < half_width`.
    pub fn turning_bump(turning: f64, center: f64, half_width: f64) -> Self {
        ProfileSpec::PolyBump { amp: turning / (half_width * POLY_BUMP_MASS), center, half_width }
    }

    /// Exact integral over the real line, where finite.
    pub fn total(&self) -> Option<f64> {
        match self {
            ProfileSpec::Zero => Some(0.0),
            ProfileSpec::Constant { value } => (*value == 0.0).then_some(0.0),
            ProfileSpec::Sech { amp, width, .. } => Some(amp * width * std::f64::consts::PI),
            ProfileSpec::Lorentzian { amp, width, .. } => Some(amp * width * std::f64::consts::PI),
            ProfileSpec::PolyBump { amp, half_width, .. } => Some(amp * half_width * POLY_BUMP_MASS),
            ProfileSpec::Sum { terms } => terms.iter().map(|t| t.total()).sum(),
        }
    }

    /// True if the profile is identically zero.
    pub fn is_zero(&self) -> bool {
        match self {
            ProfileSpec::Zero => true,
            ProfileSpec::Constant { value } => *value == 0.0,
            ProfileSpec::Sech { amp, .. } | ProfileSpec::Lorentzian { amp, .. } | ProfileSpec::PolyBump { amp, .. } => *amp == 0.0,
            ProfileSpec::Sum { terms } => terms.iter().all(|t| t.is_zero()),
        }
    }

    fn eval<T: Real>(&self, s: T, order: u8) -> T {
        match self {
            ProfileSpec::Zero => T::zero(),
            ProfileSpec::Constant { value } => {
                if order == 0 {
                    lit(*value)
                } else {
                    T::zero()
                }
            }
            ProfileSpec::Sech { amp, center, width } => {
                let w: T = lit(*width);
                let x = (s - lit(*center)) / w;
                let sech = T::one() / x.cosh();
                let a: T = lit(*amp);
                match order {
                    0 => a * sech,
                    1 => -a * sech * x.tanh() / w,
                    _ => a * sech * (T::one() - lit::<T>(2.0) * sech * sech) / (w * w),
                }
            }
            ProfileSpec::Lorentzian { amp, center, width } => {
                let w: T = lit(*width);
                let x = (s - lit(*center)) / w;
                let q = T::one() + x * x;
                let a: T = lit(*amp);
                match order {
                    0 => a / q,
                    1 => -lit::<T>(2.0) * a * x / (q * q * w),
                    _ => a * (lit::<T>(6.0) * x * x - lit(2.0)) / (q * q * q * w * w),
                }
            }
            ProfileSpec::PolyBump { amp, center, half_width } => {
                let w: T = lit(*half_width);
                let x = (s - lit(*center)) / w;
                if x.abs() >= T::one() {
                    return T::zero();
                }
                let y = T::one() - x * x;
                let a: T = lit(*amp);
                match order {
                    0 => a * y.powi(5),
                    1 => -lit::<T>(10.0) * a * x * y.powi(4) / w,
                    _ => a * (lit::<T>(80.0) * x * x * y.powi(3) - lit::<T>(10.0) * y.powi(4)) / (w * w),
                }
            }
            ProfileSpec::Sum { terms } => terms.iter().map(|t| t.eval(s, order)).sum(),
        }
    }
}

impl<T: Real> Profile<T> for ProfileSpec {
    fn value(&self, s: T) -> T {
        self.eval(s, 0)
    }
    fn d1(&self, s: T) -> T {
        self.eval(s, 1)
    }
    fn d2(&self, s: T) -> T {
        self.eval(s, 2)
    }
}

/// Profile defined by a closure; derivatives by central differences.
pub struct FnProfile<T> {
    f: Box<dyn Fn(T) -> T + Send + Sync>,
}

impl<T> FnProfile<T> {
    pub fn new(f: impl Fn(T) -> T + Send + Sync + 'static) -> Self {
        FnProfile { f: Box::new(f) }
    }
}

impl<T> Debug for FnProfile<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("FnProfile")
    }
}

impl<T: Real> Profile<T> for FnProfile<T> {
    fn value(&self, s: T) -> T {
        (self.f)(s)
    }
}
