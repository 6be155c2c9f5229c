//! Scalars as they appear in configs, JSON documents and CSV cells.

use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::Zero;
use serde_json::{Number, Value};
use supercyc_core::{Rational, RealScalar, SparseVec};

use crate::ConfigError;

/// The scalar types selectable with `--mode`.
pub trait ModeScalar: RealScalar {
    fn from_rational(q: &Rational) -> Self;

    /// Scalar field in a report: `"num/den"` (exact) or a JSON number.
    fn to_json(&self) -> Value;

    /// One `SparseVec` entry: `[index, num, den]` or `[index, value]`.
    fn entry_json(index: usize, v: &Self) -> Value;

    fn to_cell(&self) -> String;
}

impl ModeScalar for Rational {
    fn from_rational(q: &Rational) -> Self {
        q.clone()
    }

    fn to_json(&self) -> Value {
        Value::String(fraction_string(self))
    }

    fn entry_json(index: usize, v: &Self) -> Value {
        Value::Array(vec![Value::from(index), big_json(v.numer()), big_json(v.denom())])
    }

    fn to_cell(&self) -> String {
        fraction_string(self)
    }
}

impl ModeScalar for f64 {
    fn from_rational(q: &Rational) -> Self {
        q.to_f64()
    }

    fn to_json(&self) -> Value {
        float_json(*self)
    }

    fn entry_json(index: usize, v: &Self) -> Value {
        Value::Array(vec![Value::from(index), float_json(*v)])
    }

    fn to_cell(&self) -> String {
        format!("{self:?}")
    }
}

fn float_json(v: f64) -> Value {
    Number::from_f64(v).map_or_else(|| Value::String(format!("{v}")), Value::Number)
}

pub fn big_json(n: &BigInt) -> Value {
    Value::Number(Number::from_str(&n.to_string()).expect("integer literal"))
}

/// `"num/den"` in lowest terms, denominator always written.
pub fn fraction_string(q: &Rational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

/// Parses `"p/q"`, `"p"`, or a decimal literal exactly.
pub fn parse_rational(s: &str) -> Result<Rational, ConfigError> {
    let s = s.trim();
    let bad = || ConfigError::Invalid(format!("not a rational number: {s:?}"));
    if let Some((n, d)) = s.split_once('/') {
        let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
        let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(n, d));
    }
    parse_decimal(s).ok_or_else(bad)
}

/// Exact value of a decimal literal such as `-1.25e-3`.
fn parse_decimal(s: &str) -> Option<Rational> {
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i64>().ok()?),
        None => (s, 0),
    };
    let (int, frac) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    let negative = int.starts_with('-');
    let digits = format!("{}{}", int.trim_start_matches(['-', '+']), frac);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let mut n = BigInt::from_str(&digits).ok()?;
    if negative {
        n = -n;
    }
    let scale = exp - frac.len() as i64;
    let ten = BigInt::from(10);
    Some(if scale >= 0 {
        Rational::from_integer(n * num_traits::pow(ten, scale as usize))
    } else {
        Rational::new(n, num_traits::pow(ten, scale.unsigned_abs() as usize))
    })
}

/// A rational given as a JSON number or string.
pub fn rational_from_json(v: &Value) -> Result<Rational, ConfigError> {
    match v {
        Value::Number(n) => parse_rational(&n.to_string()),
        Value::String(s) => parse_rational(s),
        other => Err(ConfigError::Invalid(format!("expected a number, got {other}"))),
    }
}

/// A `SparseVec` in any of the accepted layouts: `[[i, num, den], …]`,
/// `[[i, value], …]` or a dense list of values for indices `1, 2, …`.
pub fn sparse_from_json(v: &Value) -> Result<SparseVec<Rational>, ConfigError> {
    let items = v
        .as_array()
        .ok_or_else(|| ConfigError::Invalid(format!("expected a vector, got {v}")))?;
    let mut pairs = Vec::with_capacity(items.len());
    for (pos, item) in items.iter().enumerate() {
        match item {
            Value::Array(entry) => {
                let index = entry
                    .first()
                    .and_then(Value::as_u64)
                    .filter(|i| *i >= 1)
                    .ok_or_else(|| ConfigError::Invalid(format!("bad index in {item}")))?
                    as usize;
                let value = match entry.len() {
                    2 => rational_from_json(&entry[1])?,
                    3 => {
                        let n = rational_from_json(&entry[1])?;
                        let d = rational_from_json(&entry[2])?;
                        if d.is_zero() {
                            return Err(ConfigError::Invalid(format!("zero denominator in {item}")));
                        }
                        n / d
                    }
                    _ => return Err(ConfigError::Invalid(format!("bad entry {item}"))),
                };
                pairs.push((index, value));
            }
            scalar => pairs.push((pos + 1, rational_from_json(scalar)?)),
        }
    }
    Ok(SparseVec::from_pairs(pairs))
}

pub fn sparse_to_json<S: ModeScalar>(x: &SparseVec<S>) -> Value {
    Value::Array(x.iter().map(|(n, v)| S::entry_json(*n, v)).collect())
}

pub fn convert<S: ModeScalar>(x: &SparseVec<Rational>) -> SparseVec<S> {
    x.map(S::from_rational)
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    #[test]
    fn parses_rationals() {
        assert_eq!(parse_rational("3/6").unwrap(), q(1, 2));
        assert_eq!(parse_rational("-7").unwrap(), q(-7, 1));
        assert_eq!(parse_rational("0.25").unwrap(), q(1, 4));
        assert_eq!(parse_rational("-1.5e-2").unwrap(), q(-3, 200));
        assert_eq!(parse_rational("2E3").unwrap(), q(2000, 1));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert_eq!(rational_from_json(&json!(0.1)).unwrap(), q(1, 10));
    }

    #[test]
    fn sparse_layouts() {
        let expect = SparseVec::from_pairs([(1, q(1, 1)), (3, q(-1, 2))]);
        assert_eq!(sparse_from_json(&json!([[1, 1, 1], [3, -1, 2]])).unwrap(), expect);
        assert_eq!(sparse_from_json(&json!([[1, 1], [3, "-1/2"]])).unwrap(), expect);
        assert_eq!(sparse_from_json(&json!([1, 0, -0.5])).unwrap(), expect);
        assert!(sparse_from_json(&json!([[0, 1]])).is_err());
    }

    #[test]
    fn json_round_trip() {
        let x = SparseVec::from_pairs([(2, q(-3, 4)), (5, q(7, 1))]);
        let v = sparse_to_json(&x);
        assert_eq!(v.to_string(), "[[2,-3,4],[5,7,1]]");
        assert_eq!(sparse_from_json(&v).unwrap(), x);
        let f: SparseVec<f64> = convert(&x);
        assert_eq!(sparse_to_json(&f).to_string(), "[[2,-0.75],[5,7.0]]");
        assert_eq!(q(5, 1).to_cell(), "5/1");
        assert_eq!(0.5f64.to_cell(), "0.5");
    }
}
