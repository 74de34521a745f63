//! Bracketed scalar root finding.

use crate::error::{Error, Result};
use crate::numeric::{lit, Real};

/// Bisection on `[lo, hi]`; the function must change sign on the bracket.
///
/// Stops when the bracket width is below `tol * max(1, |mid|)`.
pub fn bisect<T: Real, F: FnMut(T) -> T>(mut f: F, mut lo: T, mut hi: T, tol: T) -> Result<T> {
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == T::zero() {
        return Ok(lo);
    }
    if fhi == T::zero() {
        return Ok(hi);
    }
    if (flo > T::zero()) == (fhi > T::zero()) || flo.is_nan() || fhi.is_nan() {
        return Err(Error::NoBracket { lo: lo.to_f64_lossy(), hi: hi.to_f64_lossy() });
    }
    for _ in 0..400 {
        let mid = (lo + hi) * lit(0.5);
        if (hi - lo).abs() <= tol * mid.abs().max(T::one()) || mid == lo || mid == hi {
            return Ok(mid);
        }
        let fm = f(mid);
        if fm == T::zero() {
            return Ok(mid);
        }
        if (fm > T::zero()) == (flo > T::zero()) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok((lo + hi) * lit(0.5))
}

/// Locates the sign change closest to `hi` by scanning `samples` equal
/// sub-intervals of `[lo, hi]` from the right, then bisects it.
pub fn largest_root<T: Real, F: FnMut(T) -> T>(mut f: F, lo: T, hi: T, samples: usize, tol: T) -> Result<T> {
    let n = samples.max(2);
    let step = (hi - lo) / lit::<T>(n as f64);
    let mut right = hi;
    let mut f_right = f(right);
    for i in (0..n).rev() {
        let left = lo + step * lit::<T>(i as f64);
        let f_left = f(left);
        if f_left == T::zero() {
            return Ok(left);
        }
        if (f_left > T::zero()) != (f_right > T::zero()) {
            return bisect(&mut f, left, right, tol);
        }
        right = left;
        f_right = f_left;
    }
    Err(Error::NoBracket { lo: lo.to_f64_lossy(), hi: hi.to_f64_lossy() })
}

/// Golden-section search for a maximum of a unimodal function on `[a, b]`.
pub fn golden_max<T: Real, F: FnMut(T) -> T>(mut f: F, mut a: T, mut b: T, tol: T) -> (T, T) {
    let inv_phi: T = (lit::<T>(5.0).sqrt() - T::one()) * lit(0.5);
    let mut c = b - (b - a) * inv_phi;
    let mut d = a + (b - a) * inv_phi;
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..200 {
        if (b - a).abs() <= tol {
            break;
        }
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - (b - a) * inv_phi;
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + (b - a) * inv_phi;
            fd = f(d);
        }
    }
    if fc > fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bisect_finds_sqrt_two() {
        let r = bisect(|x: f64| x * x - 2.0, 0.0, 2.0, 1e-14).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn bisect_rejects_non_bracket() {
        assert!(matches!(bisect(|x: f64| x * x + 1.0, -1.0, 1.0, 1e-12), Err(Error::NoBracket { .. })));
    }

    #[test]
    fn largest_root_picks_rightmost() {
        let r = largest_root(|x: f64| (x - 1.0) * (x - 3.0), 0.0, 5.0, 100, 1e-13).unwrap();
        assert!((r - 3.0).abs() < 1e-12);
    }

    #[test]
    fn golden_section_locates_peak() {
        let (x, fx) = golden_max(|x: f64| -(x - 0.3).powi(2) + 1.0, -1.0, 2.0, 1e-10);
        assert!((x - 0.3).abs() < 1e-8);
        assert!((fx - 1.0).abs() < 1e-14);
    }
}
