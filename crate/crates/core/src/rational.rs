//! Exact rational arithmetic helpers.
//!
//! All probabilities, payoffs, and solver values in this crate are
//! `num_rational::BigRational` values: arbitrary-precision fractions that are
//! kept in lowest terms by the `num` crates. Nothing here ever round-trips
//! through floating point.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::Error;

pub type Rational = BigRational;

/// `n / d` as an exact rational. Panics if `d == 0`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// The integer `n` as an exact rational.
pub fn rat_int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses `"p/q"` or `"p"` into an exact rational.
///
/// Rejects empty input, malformed integers, and zero denominators. Parsing
/// stays in integer arithmetic throughout.
pub fn parse_rational(text: &str) -> Result<Rational, Error> {
    let trimmed = text.trim();
    if trimmed.is_empty() {
        return Err(Error::BadRational {
            text: text.to_owned(),
            reason: "empty string".to_owned(),
        });
    }
    let (num_text, den_text) = match trimmed.split_once('/') {
        Some((n, d)) => (n.trim(), Some(d.trim())),
        None => (trimmed, None),
    };
    let numer: BigInt = num_text.parse().map_err(|_| Error::BadRational {
        text: text.to_owned(),
        reason: format!("`{num_text}` is not an integer"),
    })?;
    let denom: BigInt = match den_text {
        Some(d) => d.parse().map_err(|_| Error::BadRational {
            text: text.to_owned(),
            reason: format!("`{d}` is not an integer"),
        })?,
        None => BigInt::one(),
    };
    if denom.is_zero() {
        return Err(Error::BadRational {
            text: text.to_owned(),
            reason: "zero denominator".to_owned(),
        });
    }
    Ok(Rational::new(numer, denom))
}

/// Renders a rational as `"p/q"` in lowest terms, or `"p"` when q = 1.
pub fn format_rational(value: &Rational) -> String {
    value.to_string()
}

/// True iff `value` is in the closed interval [0, 1].
pub fn is_probability(value: &Rational) -> bool {
    !value.is_negative() && *value <= Rational::one()
}
