//! Exact rational helpers used for imbalance arithmetic.
//!
//! Imbalance parameters are kept as [`BigRational`] so that block weight caps
//! such as `ceil((1 + eps) * total / k)` are computed without rounding error.
//! `0.1` parsed from text is exactly `1/10`, never `0.1000000000000000055..`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub use num_rational::BigRational as Rational;

/// Fractional bits kept when a `d`-th root has to be approximated.
pub const ROOT_PRECISION_BITS: u32 = 48;

/// Parses `"0.03"`, `"3/100"`, `"1e-2"` or `"2"` into an exact rational.
pub fn parse_ratio(text: &str) -> Result<BigRational> {
    let s = text.trim();
    let bad = || Error::Rational(text.to_string());
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((num, den)) = s.split_once('/') {
        let num: BigInt = num.trim().parse().map_err(|_| bad())?;
        let den: BigInt = den.trim().parse().map_err(|_| bad())?;
        if den.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(num, den));
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => {
            let exp: i32 = s[pos + 1..].parse().map_err(|_| bad())?;
            (&s[..pos], exp)
        }
        None => (s, 0),
    };
    let (negative, mantissa) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits = format!("{int_part}{frac_part}");
    let mut num: BigInt = digits.parse().map_err(|_| bad())?;
    if negative {
        num = -num;
    }
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10u32);
    let value = if scale >= 0 {
        BigRational::from_integer(num * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(num, num_traits::pow(ten, (-scale) as usize))
    };
    Ok(value)
}

pub fn from_u64(v: u64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

pub fn ceil_u64(r: &BigRational) -> u64 {
    to_u64(&r.ceil())
}

pub fn floor_u64(r: &BigRational) -> u64 {
    to_u64(&r.floor())
}

fn to_u64(r: &BigRational) -> u64 {
    if r.is_negative() {
        0
    } else {
        r.to_integer().to_u64().unwrap_or(u64::MAX)
    }
}

pub fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Largest multiple of `2^-bits` that is `<= r^(1/d)`, for `r >= 0`.
///
/// The result `q` always satisfies `q^d <= r`, and equals the true root
/// whenever the root is itself a multiple of `2^-bits` (for example `r = 1`).
pub fn root_floor(r: &BigRational, d: u32, bits: u32) -> BigRational {
    assert!(d >= 1, "root degree must be positive");
    if !r.is_positive() {
        return BigRational::zero();
    }
    if d == 1 {
        return r.clone();
    }
    let scaled = (r.numer() << (bits as usize * d as usize)).div_floor(r.denom());
    let root = scaled.nth_root(d);
    BigRational::new(root, BigInt::one() << bits as usize)
}
