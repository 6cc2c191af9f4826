//! Exact rational helpers shared by every module.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

pub type Rational = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RationalParseError {
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("malformed rational literal `{0}`")]
    Malformed(String),
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `p`, `-p` or `p/q`; the result is in lowest terms with positive denominator.
pub fn parse_rational(text: &str) -> Result<Rational, RationalParseError> {
    let malformed = || RationalParseError::Malformed(text.to_string());
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text.trim(), "1"),
    };
    let num: BigInt = num.parse().map_err(|_| malformed())?;
    if den.starts_with(['+', '-']) {
        return Err(malformed());
    }
    let den: BigInt = den.parse().map_err(|_| malformed())?;
    if den.is_zero() {
        return Err(RationalParseError::ZeroDenominator);
    }
    Ok(Rational::new(num, den))
}

/// `{"num": "3", "den": "2"}`; strings avoid precision loss in JSON consumers.
pub fn to_json(q: &Rational) -> Value {
    json!({ "num": q.numer().to_string(), "den": q.denom().to_string() })
}

pub fn vec_to_json(v: &[Rational]) -> Value {
    Value::Array(v.iter().map(to_json).collect())
}

/// Least common multiple of the denominators of `values` (1 for an empty slice).
pub fn denominator_lcm<'a>(values: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    values
        .into_iter()
        .fold(BigInt::one(), |acc, q| acc.lcm(q.denom()))
}

/// Scales a rational vector to the primitive integer vector on the same ray.
pub fn primitive_integer(values: &[Rational]) -> Vec<BigInt> {
    let l = denominator_lcm(values);
    let ints: Vec<BigInt> = values
        .iter()
        .map(|q| (q * Rational::from_integer(l.clone())).to_integer())
        .collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() {
        return ints;
    }
    ints.into_iter().map(|x| x / &g).collect()
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn is_nonnegative(values: &[Rational]) -> bool {
    values.iter().all(|q| !q.is_negative())
}

pub fn is_integral(values: &[Rational]) -> bool {
    values.iter().all(|q| q.is_integer())
}

/// Comma separated rendering used by text reports, e.g. `(2/5, 3/5, 0)`.
pub fn fmt_tuple(values: &[Rational]) -> String {
    let inner: Vec<String> = values.iter().map(|q| q.to_string()).collect();
    format!("({})", inner.join(", "))
}
