//! Rendering of exact rationals: `num/den` strings, 4-place decimals and the
//! `{num, den, decimal}` JSON object used by reports.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};
use serde::Serialize;

/// "n/d", or just "n" for integers.
pub fn fraction(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Decimal with 4 places, rounding half away from zero. Negative values that
/// round to zero keep their sign ("-0.0000").
pub fn decimal4(q: &BigRational) -> String {
    let scaled = q.abs() * BigInt::from(10_000);
    let (whole, rem) = scaled.numer().div_rem(scaled.denom());
    let units = if rem * 2u32 >= *scaled.denom() {
        whole + 1u32
    } else {
        whole
    };
    let (int, frac) = units.div_rem(&BigInt::from(10_000));
    let sign = if q.is_negative() { "-" } else { "" };
    format!("{sign}{int}.{:04}", frac.to_u32().unwrap_or(0))
}

/// An integer that serializes as a JSON number when it fits in 64 bits and as
/// a decimal string otherwise.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum JsonInt {
    Small(i64),
    Big(String),
}

impl From<&BigInt> for JsonInt {
    fn from(n: &BigInt) -> Self {
        match n.to_i64() {
            Some(k) => JsonInt::Small(k),
            None => JsonInt::Big(n.to_string()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RationalJson {
    pub num: JsonInt,
    pub den: JsonInt,
    pub decimal: String,
}

impl From<&BigRational> for RationalJson {
    fn from(q: &BigRational) -> Self {
        RationalJson {
            num: q.numer().into(),
            den: q.denom().into(),
            decimal: decimal4(q),
        }
    }
}
