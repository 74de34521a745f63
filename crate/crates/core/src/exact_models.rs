//! Exactly solvable models: halfplane, quadrant and the exterior of a disc.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{cnt, lit, Real};
use crate::roots::bisect;
use crate::transverse::t_dirichlet_eigenvalue;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// `e^x K_0(x)` and `e^x K_1(x)`.
fn scaled_k01<T: Real>(x: T) -> (T, T) {
    let eps = T::epsilon() * lit(0.5);
    if x <= lit(2.0) {
        let q = x * x * lit(0.25);
        let ln = (x * lit(0.5)).ln();
        // I_0, I_1 and the digamma sums of the logarithmic series.
        let mut term0 = T::one();
        let mut term1 = x * lit(0.5);
        let mut i0 = T::zero();
        let mut i1 = T::zero();
        let mut s0 = T::zero();
        let mut s1 = T::zero();
        let mut psi = lit::<T>(-EULER_GAMMA);
        let mut k = 0usize;
        loop {
            let psi_next = psi + T::one() / cnt::<T>(k + 1);
            i0 += term0;
            i1 += term1;
            s0 += term0 * psi;
            s1 += term1 * (psi + psi_next);
            let kf = cnt::<T>(k + 1);
            term0 = term0 * q / (kf * kf);
            term1 = term1 * q / (kf * (kf + T::one()));
            psi = psi_next;
            k += 1;
            if term0 < eps * i0.abs() && term1 < eps * i1.abs() {
                break;
            }
        }
        let k0 = -ln * i0 + s0;
        let k1 = T::one() / x + ln * i1 - s1 * lit(0.5);
        let e = x.exp();
        (k0 * e, k1 * e)
    } else {
        // Steed's continued fraction for K_1/K_0 with the Temme sum.
        let a1 = lit::<T>(0.25);
        let mut b = (T::one() + x) * lit(2.0);
        let mut d = T::one() / b;
        let mut delh = d;
        let mut h = d;
        let mut q1 = T::zero();
        let mut q2 = T::one();
        let mut q = a1;
        let mut c = a1;
        let mut a = -a1;
        let mut s = T::one() + q * delh;
        for i in 1..10_000 {
            let fi = cnt::<T>(i);
            a -= fi * lit(2.0);
            c = -a * c / (fi + T::one());
            let qnew = (q1 - b * q2) / a;
            q1 = q2;
            q2 = qnew;
            q += c * qnew;
            b += lit(2.0);
            d = T::one() / (b + a * d);
            delh = (b * d - T::one()) * delh;
            h += delh;
            let dels = q * delh;
            s += dels;
            if (dels / s).abs() < eps {
                break;
            }
        }
        h = a1 * h;
        let k0 = (T::PI() / (x * lit(2.0))).sqrt() / s;
        let k1 = k0 * (x + lit(0.5) - h) / x;
        (k0, k1)
    }
}

/// `e^x K_j(x)` for `j = 0..=m_max` by upward recurrence.
fn scaled_k_sequence<T: Real>(m_max: usize, x: T) -> Vec<T> {
    let (k0, k1) = scaled_k01(x);
    let mut out = Vec::with_capacity(m_max + 2);
    out.push(k0);
    out.push(k1);
    for j in 1..m_max {
        let next = out[j - 1] + cnt::<T>(2 * j) / x * out[j];
        out.push(next);
    }
    out.truncate(m_max + 1);
    out
}

/// Modified Bessel function of the second kind `K_m(x)`.
pub fn bessel_k<T: Real>(m: usize, x: T) -> Result<T> {
    if !(x > T::zero()) || !x.is_finite() {
        return Err(Error::Domain { what: "Bessel K argument", value: x.to_f64_lossy() });
    }
    let scaled = scaled_k_sequence(m, x)[m];
    let v = scaled * (-x).exp();
    if !v.is_finite() {
        return Err(Error::Range("K_m overflows"));
    }
    if v == T::zero() {
        return Err(Error::Range("K_m underflows"));
    }
    Ok(v)
}

/// `−x K_m'(x)/K_m(x) = x (K_{m−1}(x) + K_{m+1}(x)) / (2 K_m(x))`.
pub fn bessel_logderiv<T: Real>(m: usize, x: T) -> Result<T> {
    if !(x > T::zero()) || !x.is_finite() {
        return Err(Error::Domain { what: "Bessel log-derivative argument", value: x.to_f64_lossy() });
    }
    let seq = scaled_k_sequence(m + 1, x);
    let below = if m == 0 { seq[1] } else { seq[m - 1] };
    let v = x * (below + seq[m + 1]) / (seq[m] * lit(2.0));
    if !v.is_finite() {
        return Err(Error::Range("K_m overflows"));
    }
    Ok(v)
}

/// Negative eigenvalue of the exterior of a disc in angular sector `m`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiscSpec<T> {
    pub radius: T,
    pub beta: T,
    pub m: usize,
    /// `βR`.
    pub alpha_scaled: T,
    /// `kR`, the root of `−u K_m'(u)/K_m(u) = βR`.
    pub u_root: T,
    /// `−k²`.
    pub lambda: T,
    pub multiplicity: usize,
}

/// Solves `−u K_m'(u)/K_m(u) = βR` by bisection; requires `βR > m`.
pub fn disc_exterior_eigenvalue<T: Real>(radius: T, beta: T, m: usize) -> Result<DiscSpec<T>> {
    if !(radius > T::zero()) || !(beta > T::zero()) {
        return Err(Error::InvalidInput("radius and coupling must be positive".into()));
    }
    let alpha = beta * radius;
    if !(alpha > cnt::<T>(m)) {
        return Err(Error::NoBoundState(format!("beta*R = {} <= m = {m}", alpha.to_f64_lossy())));
    }
    let f = |u: T| bessel_logderiv(m, u).map(|v| v - alpha).unwrap_or(T::nan());
    let hi = alpha;
    // The log-derivative exceeds u, so the root is below α; move the lower
    // end down until the condition changes sign.
    let mut lo = (alpha - cnt::<T>(m) - T::one()).max(alpha * lit(0.5));
    let floor = lit::<T>(1e-300).max(T::min_positive_value() * lit(1e6));
    while !(f(lo) < T::zero()) {
        lo *= lit(0.5);
        if lo < floor {
            return Err(Error::NoBracket { lo: 0.0, hi: hi.to_f64_lossy() });
        }
    }
    let u = bisect(f, lo, hi, lit(1e-14))?;
    let k = u / radius;
    Ok(DiscSpec { radius, beta, m, alpha_scaled: alpha, u_root: u, lambda: -k * k, multiplicity: if m == 0 { 1 } else { 2 } })
}

/// `−(β − 1/(2R))² + (m² − 1/4)/R²`.
pub fn disc_exterior_asymptotic<T: Real>(radius: T, beta: T, m: usize) -> T {
    let shift = beta - T::one() / (radius * lit(2.0));
    let mf = cnt::<T>(m);
    -shift * shift + (mf * mf - lit(0.25)) / (radius * radius)
}

/// Lowest eigenvalue `−2β²` of the quadrant; `β = 0` gives the threshold
/// `0`, which is not an eigenvalue.
pub fn quadrant_eigenvalue<T: Real>(beta: T) -> T {
    -beta * beta * lit(2.0)
}

/// `2ζ^D(L, β)`: the quadrant truncated to `(0, L)²` with Dirichlet far
/// sides, through the product structure.
pub fn quadrant_numeric<T: Real>(side: T, beta: T) -> Result<T> {
    Ok(t_dirichlet_eigenvalue(side, beta)? * lit(2.0))
}

/// Bottom `−β²` of the essential spectrum of the halfplane.
pub fn halfplane_threshold<T: Real>(beta: T) -> T {
    -beta * beta
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_values() {
        assert!((bessel_k(0, 1.0f64).unwrap() - 0.421_024_438_240_708_3).abs() < 1e-14);
        assert!((bessel_k(1, 1.0f64).unwrap() - 0.601_907_230_197_234_6).abs() < 1e-14);
        assert!((bessel_k(0, 3.0f64).unwrap() - 0.034_739_504_386_279_99).abs() < 1e-15);
    }

    #[test]
    fn logderiv_limits() {
        assert!(bessel_logderiv(0, 1e-6f64).unwrap() < 0.1);
        assert!((bessel_logderiv(2, 0.01f64).unwrap() - 2.0).abs() < 1e-3);
        let x = 400.0f64;
        let m = 3.0;
        let asym = x + 0.5 + (4.0 * m * m - 1.0) / (8.0 * x);
        assert!((bessel_logderiv(3, x).unwrap() - asym).abs() < 1e-4);
    }

    #[test]
    fn disc_root_matches_expansion() {
        let d = disc_exterior_eigenvalue(1.0f64, 5.0, 0).unwrap();
        assert!((d.u_root - 4.525).abs() < 0.01);
        assert!(d.lambda > -25.0 && d.multiplicity == 1);
        assert!(disc_exterior_eigenvalue(1.0f64, 1.0, 1).is_err());
        assert_eq!(disc_exterior_asymptotic(1.0f64, 10.0, 0), -90.5);
    }

    #[test]
    fn quadrant() {
        assert_eq!(quadrant_eigenvalue(3.0f64), -18.0);
        let n = quadrant_numeric(4.0f64, 3.0).unwrap();
        assert!((n + 18.0).abs() <= 8.0 * 9.0 * (-12.0f64).exp());
    }
}
