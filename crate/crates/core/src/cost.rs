//! Exact cost arithmetic.
//!
//! Costs are stored as signed integers in units of one millionth. Every
//! comparison inside the solvers is therefore exact; conversion to and from
//! floating point only happens at file boundaries.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Sub, SubAssign};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Number of internal units per unit of cost.
pub const COST_SCALE: i64 = 1_000_000;

/// Largest deviation tolerated when a floating point value is mapped onto the
/// fixed-point grid.
pub const IO_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Cost(i64);

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CostParseError {
    #[error("cost {0} is not finite")]
    NotFinite(f64),
    #[error("cost {0} is out of range")]
    OutOfRange(f64),
    #[error("cost {0} is not representable at a resolution of 1e-6")]
    Unrepresentable(f64),
}

impl Cost {
    pub const ZERO: Cost = Cost(0);
    pub const MAX: Cost = Cost(i64::MAX);

    /// Cost of `units` whole units.
    pub const fn new(units: i64) -> Self {
        Cost(units * COST_SCALE)
    }

    pub const fn from_raw(raw: i64) -> Self {
        Cost(raw)
    }

    pub const fn raw(self) -> i64 {
        self.0
    }

    pub fn try_from_f64(value: f64) -> Result<Self, CostParseError> {
        if !value.is_finite() {
            return Err(CostParseError::NotFinite(value));
        }
        let scaled = value * COST_SCALE as f64;
        if scaled.abs() > (i64::MAX / 4) as f64 {
            return Err(CostParseError::OutOfRange(value));
        }
        let raw = scaled.round() as i64;
        if (raw as f64 / COST_SCALE as f64 - value).abs() > IO_TOLERANCE.max(value.abs() * 1e-15) {
            return Err(CostParseError::Unrepresentable(value));
        }
        Ok(Cost(raw))
    }

    pub fn to_f64(self) -> f64 {
        self.0 as f64 / COST_SCALE as f64
    }

    pub fn is_negative(self) -> bool {
        self.0 < 0
    }

    pub fn saturating_add(self, other: Cost) -> Cost {
        Cost(self.0.saturating_add(other.0))
    }

    /// Ratio `self / other` as a float; `1.0` when both are zero.
    pub fn ratio(self, other: Cost) -> f64 {
        if self.0 == other.0 {
            1.0
        } else if other.0 == 0 {
            f64::INFINITY
        } else {
            self.0 as f64 / other.0 as f64
        }
    }

    fn to_json_number(self) -> serde_json::Number {
        if self.0 % COST_SCALE == 0 {
            serde_json::Number::from(self.0 / COST_SCALE)
        } else {
            serde_json::Number::from_f64(self.to_f64()).expect("finite cost")
        }
    }
}

impl fmt::Display for Cost {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.0 < 0 { "-" } else { "" };
        let abs = self.0.unsigned_abs();
        let whole = abs / COST_SCALE as u64;
        let frac = abs % COST_SCALE as u64;
        if frac == 0 {
            write!(f, "{sign}{whole}")
        } else {
            let digits = format!("{frac:06}");
            write!(f, "{sign}{whole}.{}", digits.trim_end_matches('0'))
        }
    }
}

impl Add for Cost {
    type Output = Cost;
    fn add(self, rhs: Cost) -> Cost {
        Cost(self.0 + rhs.0)
    }
}

impl AddAssign for Cost {
    fn add_assign(&mut self, rhs: Cost) {
        self.0 += rhs.0;
    }
}

impl Sub for Cost {
    type Output = Cost;
    fn sub(self, rhs: Cost) -> Cost {
        Cost(self.0 - rhs.0)
    }
}

impl SubAssign for Cost {
    fn sub_assign(&mut self, rhs: Cost) {
        self.0 -= rhs.0;
    }
}

impl Sum for Cost {
    fn sum<I: Iterator<Item = Cost>>(iter: I) -> Cost {
        iter.fold(Cost::ZERO, Add::add)
    }
}

impl<'a> Sum<&'a Cost> for Cost {
    fn sum<I: Iterator<Item = &'a Cost>>(iter: I) -> Cost {
        iter.copied().sum()
    }
}

impl Serialize for Cost {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.to_json_number().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Cost {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let number = serde_json::Number::deserialize(deserializer)?;
        if let Some(i) = number.as_i64() {
            return i
                .checked_mul(COST_SCALE)
                .map(Cost)
                .ok_or_else(|| serde::de::Error::custom(CostParseError::OutOfRange(i as f64)));
        }
        let value = number
            .as_f64()
            .ok_or_else(|| serde::de::Error::custom("cost is not a number"))?;
        Cost::try_from_f64(value).map_err(serde::de::Error::custom)
    }
}
