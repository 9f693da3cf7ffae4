//! Carrier values shared by every layer of a model.
//!
//! Numbers are exact rationals so that decimal scales (`0.01 .. 0.20 step
//! 0.01`) enumerate and compare without rounding noise.

use std::fmt;
use std::sync::Arc;

use num_rational::Ratio;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Interned-ish identifier used for every name in a model.
pub type Name = Arc<str>;

/// Exact numeric value.
pub type Number = Ratio<i64>;

pub fn name(s: &str) -> Name {
    Arc::from(s)
}

/// A single element of some carrier: a scale value or a reified symbol.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Value {
    Num(Number),
    /// A value of an enumerated scale.
    Enum(Name),
    /// A reified symbol declaration, usable as an element of higher carriers.
    Sym(Name),
}

impl Value {
    pub fn int(v: i64) -> Self {
        Value::Num(Number::from_integer(v))
    }

    pub fn enumerated(s: &str) -> Self {
        Value::Enum(name(s))
    }

    pub fn symbol(s: &str) -> Self {
        Value::Sym(name(s))
    }

    pub fn as_number(&self) -> Option<&Number> {
        match self {
            Value::Num(n) => Some(n),
            _ => None,
        }
    }

    pub fn as_symbol(&self) -> Option<&Name> {
        match self {
            Value::Sym(s) => Some(s),
            _ => None,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Num(n) => f.write_str(&format_number(n)),
            Value::Enum(s) | Value::Sym(s) => f.write_str(s),
        }
    }
}

impl Serialize for Value {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Value {
    /// Numbers come back as `Num`; identifiers come back as `Enum` and are
    /// re-resolved against a model by the caller when they name a symbol.
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        match parse_number(&text) {
            Some(n) => Ok(Value::Num(n)),
            None => Ok(Value::Enum(name(&text))),
        }
    }
}

/// Parse `-?digits(.digits)?` into an exact rational.
pub fn parse_number(text: &str) -> Option<Number> {
    let (neg, body) = match text.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, text),
    };
    let (int_part, frac_part) = match body.split_once('.') {
        Some((i, f)) => (i, f),
        None => (body, ""),
    };
    if int_part.is_empty() || !int_part.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    if body.contains('.') && (frac_part.is_empty() || !frac_part.bytes().all(|b| b.is_ascii_digit())) {
        return None;
    }
    if frac_part.len() > 15 {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let mantissa: i64 = digits.parse().ok()?;
    let denom = 10i64.checked_pow(frac_part.len() as u32)?;
    let r = Number::new(mantissa, denom);
    Some(if neg { -r } else { r })
}

/// Render a rational as a finite decimal when possible (`0.05`, `12`, `-3.5`),
/// falling back to `p/q` for non-terminating fractions.
pub fn format_number(n: &Number) -> String {
    if n.is_integer() {
        return n.numer().to_string();
    }
    let neg = n.is_negative();
    let abs = n.abs();
    let mut scaled = abs;
    let mut places = 0usize;
    while !scaled.is_integer() && places < 18 {
        scaled *= Number::from_integer(10);
        places += 1;
    }
    if !scaled.is_integer() {
        return format!("{}/{}", n.numer(), n.denom());
    }
    let digits = format!("{:0>width$}", scaled.numer(), width = places + 1);
    let (i, f) = digits.split_at(digits.len() - places);
    format!("{}{}.{}", if neg { "-" } else { "" }, i, f)
}

/// Round `v` to the nearest point of the grid `lo + k*step` (ties go up).
pub fn snap_to_grid(v: &Number, lo: &Number, step: &Number) -> Option<Number> {
    if step.is_zero() {
        return None;
    }
    let k = (v - lo) / step;
    let half = Number::new(1, 2);
    let k = (k + half).floor();
    Some(lo + k * step)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_text_round_trips() {
        for s in ["0", "12", "-3", "0.05", "1.5", "-0.25", "600"] {
            let n = parse_number(s).unwrap();
            assert_eq!(format_number(&n), s);
        }
        assert_eq!(format_number(&Number::new(1, 3)), "1/3");
        assert_eq!(parse_number("1."), None);
        assert_eq!(parse_number(".5"), None);
        assert_eq!(parse_number("abc"), None);
    }

    #[test]
    fn snapping_rounds_half_up() {
        let lo = Number::from_integer(0);
        let step = Number::from_integer(5);
        assert_eq!(snap_to_grid(&Number::new(12, 1), &lo, &step), Some(Number::from_integer(10)));
        assert_eq!(snap_to_grid(&Number::new(25, 2), &lo, &step), Some(Number::from_integer(15)));
        assert_eq!(snap_to_grid(&Number::new(13, 1), &lo, &step), Some(Number::from_integer(15)));
    }

    #[test]
    fn values_order_deterministically() {
        let mut v = vec![Value::symbol("b"), Value::enumerated("z"), Value::int(3), Value::int(-1)];
        v.sort();
        assert_eq!(v, vec![Value::int(-1), Value::int(3), Value::enumerated("z"), Value::symbol("b")]);
    }
}
