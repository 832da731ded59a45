//! Scalar helpers: bracketed root finding and fixed-precision number output.

use crate::error::{Error, Result};

const BISECT_MAX_ITER: usize = 400;

/// Finds the root of an increasing function on `[lo, hi]` by bisection.
///
/// Requires `f(lo) <= 0 <= f(hi)`. Iterates until the bracket can no longer be
/// split in floating point.
pub fn bisect_increasing<F>(f: F, mut lo: f64, mut hi: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let flo = f(lo);
    let fhi = f(hi);
    if flo > 0.0 || fhi < 0.0 || !flo.is_finite() || !fhi.is_finite() {
        return Err(Error::RootNotFound {
            iterations: 0,
            residual: flo.abs().min(fhi.abs()),
        });
    }
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    for _ in 0..BISECT_MAX_ITER {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return Ok(if f(hi).abs() < f(lo).abs() { hi } else { lo });
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mid = 0.5 * (lo + hi);
    Err(Error::RootNotFound {
        iterations: BISECT_MAX_ITER,
        residual: f(mid).abs(),
    })
}

/// Formats `x` with `digits` significant digits, `%g` style.
///
/// Fixed notation is used for decimal exponents in `[-5, digits)`, scientific
/// otherwise; trailing zeros are trimmed.
pub fn fmt_sig(x: f64, digits: usize) -> String {
    if x.is_nan() {
        return "NaN".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".to_string();
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent marker");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -5 || exp >= digits as i32 {
        let m = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        return format!("{m}e{sign}{:02}", exp.abs());
    }
    let decimals = (digits as i32 - 1 - exp).max(0) as usize;
    trim_zeros(&format!("{:.*}", decimals, x)).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Fifteen significant digits, the precision used for every numeric output.
pub fn fmt15(x: f64) -> String {
    fmt_sig(x, 15)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bisect_cubic() {
        // q^3 + q - 1 = 0
        let q = bisect_increasing(|q| q * q * q + q - 1.0, 0.0, 1.0).unwrap();
        assert!((q * q * q + q - 1.0).abs() < 1e-15);
        assert!((q - 0.682_327_803_828_019_3).abs() < 1e-14);
    }

    #[test]
    fn bisect_rejects_bad_bracket() {
        assert!(bisect_increasing(|x| x - 5.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn sig_formatting() {
        assert_eq!(fmt_sig(1.0, 15), "1");
        assert_eq!(fmt_sig(0.5, 15), "0.5");
        assert_eq!(fmt_sig(-2.25, 15), "-2.25");
        assert_eq!(fmt_sig(1.0 / 3.0, 15), "0.333333333333333");
        assert_eq!(fmt_sig(1e-7, 15), "1e-07");
        assert_eq!(fmt_sig(123456.0, 3), "1.23e+05");
        assert_eq!(fmt_sig(0.99999999999999999, 15), "1");
        assert_eq!(fmt_sig(2000.0, 15), "2000");
        assert_eq!(fmt_sig(f64::NAN, 15), "NaN");
    }

    #[test]
    fn sig_formatting_roundtrips_to_15_digits() {
        for &x in &[std::f64::consts::PI, 1.234_567_890_123_456_7e-9, 9.87e12, -4.2e-3] {
            let back: f64 = fmt15(x).parse().unwrap();
            assert!(((back - x) / x).abs() < 1e-14, "{x} -> {}", fmt15(x));
        }
    }
}
