//! Exact rational helpers shared by every module.

use num::bigint::{BigInt, Sign};
use num::rational::BigRational;
use num::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Unbounded-precision rational number.
pub type Q = BigRational;

pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// Parses `"p/q"` or a bare integer `"p"`.
pub fn parse_q(s: &str) -> Result<Q> {
    let err = || Error::ParseRational(s.to_string());
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| err())?;
            let d: BigInt = d.trim().parse().map_err(|_| err())?;
            if d.is_zero() {
                return Err(err());
            }
            Ok(Q::new(n, d))
        }
        None => {
            let n: BigInt = s.parse().map_err(|_| err())?;
            Ok(Q::from_integer(n))
        }
    }
}

/// Always renders `numerator/denominator`, e.g. `2/1`.
pub fn format_q(x: &Q) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

pub fn require_positive(x: &Q) -> Result<()> {
    if x.is_positive() {
        Ok(())
    } else {
        Err(Error::NonPositive(format_q(x)))
    }
}

pub fn require_nonnegative(x: &Q) -> Result<()> {
    if x.is_negative() {
        Err(Error::Negative(format_q(x)))
    } else {
        Ok(())
    }
}

fn ln_bigint(n: &BigInt) -> f64 {
    let bits = n.bits();
    if bits <= 1000 {
        n.to_f64().unwrap_or(f64::INFINITY).ln()
    } else {
        let shift = bits - 900;
        let top: BigInt = n >> shift;
        top.to_f64().unwrap().ln() + (shift as f64) * std::f64::consts::LN_2
    }
}

/// Natural logarithm of a positive rational without overflowing on huge parts.
pub fn ln_q(x: &Q) -> f64 {
    debug_assert!(x.is_positive());
    ln_bigint(x.numer()) - ln_bigint(x.denom())
}

pub fn to_f64(x: &Q) -> f64 {
    match x.to_f64() {
        Some(v) if v.is_finite() => v,
        _ => {
            let sign = if x.is_negative() { -1.0 } else { 1.0 };
            if x.is_zero() {
                0.0
            } else {
                sign * ln_q(&x.abs()).exp()
            }
        }
    }
}

/// Exact square root when `x` is the square of a rational.
pub fn exact_sqrt(x: &Q) -> Option<Q> {
    if x.is_negative() {
        return None;
    }
    let root = |n: &BigInt| {
        let r = n.sqrt();
        (&r * &r == *n).then_some(r)
    };
    let n = root(x.numer())?;
    let d = root(x.denom())?;
    Some(Q::new(n, d))
}

pub fn is_one(x: &Q) -> bool {
    x.is_one()
}

pub fn sign_of(x: &Q) -> Sign {
    x.numer().sign()
}
