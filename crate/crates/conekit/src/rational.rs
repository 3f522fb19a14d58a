//! Exact rational arithmetic helpers.
//!
//! All exact computations in the crate run on arbitrary-precision rationals
//! ([`num_rational::BigRational`]), which keep numerator and denominator
//! coprime with a positive denominator.  This module adds the small amount
//! of glue the rest of the crate needs: `p/q` string parsing and rendering,
//! conversion to `f64`, and short constructors.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::{Error, Result};

/// Rational from an integer pair; panics on zero denominator.
pub fn rat(num: i64, den: i64) -> BigRational {
    assert!(den != 0, "zero denominator");
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Rational from an integer.
pub fn rat_int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Parses `"p/q"` or `"p"` with optional sign into an exact rational.
pub fn parse_rational(text: &str) -> Result<BigRational> {
    let s = text.trim();
    let mk_err = || Error::Parse(format!("invalid rational literal {s:?}"));
    let (num_s, den_s) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num: BigInt = num_s.parse().map_err(|_| mk_err())?;
    let den: BigInt = den_s.parse().map_err(|_| mk_err())?;
    if den.is_zero() {
        return Err(Error::Parse(format!("zero denominator in {s:?}")));
    }
    Ok(BigRational::new(num, den))
}

/// Renders a rational as `p/q`, or `p` when the denominator is one.
pub fn format_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Nearest-`f64` value of a rational.
pub fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // Fall back to a division of rounded parts for astronomically large
        // operands; the rationals in this crate never get close to that.
        let n = r.numer().to_f64().unwrap_or(f64::NAN);
        let d = r.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

/// True when `r` lies strictly between `lo` and `hi`.
pub fn strictly_between(r: &BigRational, lo: &BigRational, hi: &BigRational) -> bool {
    r > lo && r < hi
}

/// Sign of a rational as -1, 0 or 1.
pub fn sign(r: &BigRational) -> i32 {
    if r.is_zero() {
        0
    } else if r.is_positive() {
        1
    } else {
        -1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format_round_trip() {
        for text in ["2/3", "-7/5", "4", "0", "-12"] {
            let r = parse_rational(text).unwrap();
            assert_eq!(format_rational(&r), text);
        }
    }

    #[test]
    fn parse_normalizes() {
        assert_eq!(parse_rational("4/6").unwrap(), rat(2, 3));
        assert_eq!(parse_rational("3/-6").unwrap(), rat(-1, 2));
        assert_eq!(format_rational(&parse_rational("3/-6").unwrap()), "-1/2");
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!(parse_rational("a/b").is_err());
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("1.5").is_err());
        assert!(parse_rational("").is_err());
    }

    #[test]
    fn f64_conversion() {
        assert_eq!(to_f64(&rat(1, 2)), 0.5);
        assert!((to_f64(&rat(2, 3)) - 2.0 / 3.0).abs() < 1e-16);
    }
}
