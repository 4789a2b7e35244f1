//! Closed intervals over the extended reals, the carrier of three-valued
//! evaluation. A point is an interval with equal endpoints; an unknown
//! quantity is the whole line.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtendedValue {
    lower: f64,
    upper: f64,
}

/// Outcome of a comparison under interval semantics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Truth {
    True,
    False,
    Unknown,
}

impl Truth {
    pub fn and(self, other: Truth) -> Truth {
        match (self, other) {
            (Truth::False, _) | (_, Truth::False) => Truth::False,
            (Truth::True, Truth::True) => Truth::True,
            _ => Truth::Unknown,
        }
    }
}

impl From<bool> for Truth {
    fn from(b: bool) -> Self {
        if b {
            Truth::True
        } else {
            Truth::False
        }
    }
}

impl ExtendedValue {
    pub fn point(x: f64) -> Self {
        ExtendedValue { lower: x, upper: x }
    }

    /// Panics if `lower > upper` or either bound is NaN.
    pub fn interval(lower: f64, upper: f64) -> Self {
        assert!(lower <= upper, "invalid interval [{lower}, {upper}]");
        ExtendedValue { lower, upper }
    }

    pub fn indeterminate() -> Self {
        ExtendedValue { lower: f64::NEG_INFINITY, upper: f64::INFINITY }
    }

    pub fn lower(&self) -> f64 {
        self.lower
    }

    pub fn upper(&self) -> f64 {
        self.upper
    }

    pub fn is_point(&self) -> bool {
        self.lower == self.upper
    }

    pub fn as_point(&self) -> Option<f64> {
        self.is_point().then_some(self.lower)
    }

    pub fn is_indeterminate(&self) -> bool {
        self.lower == f64::NEG_INFINITY && self.upper == f64::INFINITY
    }

    pub fn is_bounded(&self) -> bool {
        self.lower.is_finite() && self.upper.is_finite()
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lower <= x && x <= self.upper
    }

    pub fn contains_interval(&self, other: &ExtendedValue) -> bool {
        self.lower <= other.lower && other.upper <= self.upper
    }

    pub fn contains_zero(&self) -> bool {
        self.contains(0.0)
    }

    pub fn max(self, other: Self) -> Self {
        ExtendedValue { lower: self.lower.max(other.lower), upper: self.upper.max(other.upper) }
    }

    pub fn min(self, other: Self) -> Self {
        ExtendedValue { lower: self.lower.min(other.lower), upper: self.upper.min(other.upper) }
    }

    pub fn abs(self) -> Self {
        if self.lower >= 0.0 {
            self
        } else if self.upper <= 0.0 {
            -self
        } else {
            ExtendedValue { lower: 0.0, upper: (-self.lower).max(self.upper) }
        }
    }

    /// `None` when the divisor interval contains zero.
    pub fn checked_div(self, rhs: Self) -> Option<Self> {
        if rhs.contains_zero() {
            return None;
        }
        let inv = ExtendedValue::interval(1.0 / rhs.upper, 1.0 / rhs.lower);
        Some(self * inv)
    }

    /// `self > rhs` for every pair of members (True), for none (False), or neither.
    pub fn gt(&self, rhs: &Self) -> Truth {
        if self.lower > rhs.upper {
            Truth::True
        } else if self.upper <= rhs.lower {
            Truth::False
        } else {
            Truth::Unknown
        }
    }

    pub fn lt(&self, rhs: &Self) -> Truth {
        rhs.gt(self)
    }

    /// `self >= 0` decided over the whole interval.
    pub fn nonnegative(&self) -> Truth {
        if self.lower >= 0.0 {
            Truth::True
        } else if self.upper < 0.0 {
            Truth::False
        } else {
            Truth::Unknown
        }
    }
}

/// Endpoint product with `0 * inf = 0`: an infinite endpoint stands for an
/// unbounded finite value, never for an actual infinity.
fn endpoint_mul(a: f64, b: f64) -> f64 {
    if a == 0.0 || b == 0.0 {
        0.0
    } else {
        a * b
    }
}

impl Add for ExtendedValue {
    type Output = ExtendedValue;

    fn add(self, rhs: Self) -> Self {
        ExtendedValue { lower: self.lower + rhs.lower, upper: self.upper + rhs.upper }
    }
}

impl Sub for ExtendedValue {
    type Output = ExtendedValue;

    fn sub(self, rhs: Self) -> Self {
        ExtendedValue { lower: self.lower - rhs.upper, upper: self.upper - rhs.lower }
    }
}

impl Neg for ExtendedValue {
    type Output = ExtendedValue;

    fn neg(self) -> Self {
        ExtendedValue { lower: -self.upper, upper: -self.lower }
    }
}

impl Mul for ExtendedValue {
    type Output = ExtendedValue;

    fn mul(self, rhs: Self) -> Self {
        if let (Some(a), Some(b)) = (self.as_point(), rhs.as_point()) {
            return ExtendedValue::point(a * b);
        }
        let products = [
            endpoint_mul(self.lower, rhs.lower),
            endpoint_mul(self.lower, rhs.upper),
            endpoint_mul(self.upper, rhs.lower),
            endpoint_mul(self.upper, rhs.upper),
        ];
        ExtendedValue {
            lower: products.iter().copied().fold(f64::INFINITY, f64::min),
            upper: products.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        }
    }
}

impl From<f64> for ExtendedValue {
    fn from(x: f64) -> Self {
        ExtendedValue::point(x)
    }
}

impl fmt::Display for ExtendedValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_point() {
            write!(f, "{}", self.lower)
        } else if self.is_indeterminate() {
            f.write_str("indeterminate")
        } else {
            write!(f, "[{}, {}]", self.lower, self.upper)
        }
    }
}

/// Unbounded endpoints serialize as `null`.
#[derive(Serialize, Deserialize)]
struct Wire {
    lower: Option<f64>,
    upper: Option<f64>,
}

impl Serialize for ExtendedValue {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        Wire {
            lower: self.lower.is_finite().then_some(self.lower),
            upper: self.upper.is_finite().then_some(self.upper),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ExtendedValue {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let w = Wire::deserialize(deserializer)?;
        let lower = w.lower.unwrap_or(f64::NEG_INFINITY);
        let upper = w.upper.unwrap_or(f64::INFINITY);
        if !(lower <= upper) {
            return Err(serde::de::Error::custom("interval lower bound exceeds upper bound"));
        }
        Ok(ExtendedValue { lower, upper })
    }
}
