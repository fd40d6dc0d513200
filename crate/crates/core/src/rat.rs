//! Arbitrary-precision rational scalars and parsing helpers.
//!
//! Every structural quantity in this crate (coordinates, pairings, angles as
//! multiples of pi) is a `Rat`; floating point appears only at evaluation
//! boundaries.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

/// Exact rational scalar used throughout the crate.
pub type Rat = BigRational;

/// Errors from parsing rational literals.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseRatError {
    #[error("empty rational literal")]
    Empty,
    #[error("malformed rational literal `{0}`")]
    Malformed(String),
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
}

/// Builds `n/d` exactly. Panics if `d == 0`.
#[must_use]
pub fn rat(n: i64, d: i64) -> Rat {
    assert!(d != 0, "zero denominator");
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// Builds the integer rational `n`.
#[must_use]
pub fn rint(n: i64) -> Rat {
    Rat::from(BigInt::from(n))
}

/// Parses `p`, `-p`, or `p/q` into an exact rational.
pub fn parse_rat(s: &str) -> Result<Rat, ParseRatError> {
    let s = s.trim();
    if s.is_empty() {
        return Err(ParseRatError::Empty);
    }
    let mk = |t: &str| -> Result<BigInt, ParseRatError> {
        t.parse::<BigInt>()
            .map_err(|_| ParseRatError::Malformed(s.to_string()))
    };
    match s.split_once('/') {
        None => Ok(Rat::from(mk(s)?)),
        Some((p, q)) => {
            let num = mk(p)?;
            let den = mk(q)?;
            if den.is_zero() {
                return Err(ParseRatError::ZeroDenominator(s.to_string()));
            }
            Ok(Rat::new(num, den))
        }
    }
}

/// Sign of a rational as -1, 0, or +1.
#[must_use]
pub fn sign(r: &Rat) -> i32 {
    if r.is_zero() {
        0
    } else if r.is_positive() {
        1
    } else {
        -1
    }
}

/// Exact conversion to `f64` (numerator/denominator division; adequate for
/// the magnitudes appearing in this crate).
#[must_use]
pub fn to_f64(r: &Rat) -> f64 {
    let num = r.numer();
    let den = r.denom();
    // Split off the integer part first so huge intermediate values cannot
    // overflow before the division.
    let (q, rem) = num_integer::Integer::div_rem(num, den);
    let qf = bigint_to_f64(&q);
    let rf = bigint_to_f64(&rem) / bigint_to_f64(den);
    qf + rf
}

fn bigint_to_f64(b: &BigInt) -> f64 {
    use num_traits::ToPrimitive;
    b.to_f64().unwrap_or(f64::NAN)
}

/// Formats a rational as `p` or `p/q`.
#[must_use]
pub fn format_rat(r: &Rat) -> String {
    if r.denom().is_one() {
        format!("{}", r.numer())
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}
