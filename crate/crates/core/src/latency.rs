// SPDX-License-Identifier: Apache-2.0
// Copyright The slick-packets Authors

//! Fixed-point millisecond quantities.
//!
//! Link latencies, failure times and packet generation times all share one
//! integer representation so that every comparison in the forwarding and
//! stretch code is exact. One millisecond is [`Latency::TICKS_PER_MS`] ticks.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Mul, Sub};
use std::str::FromStr;

/// A duration or point in time, in millionths of a millisecond.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Latency(i64);

impl Latency {
    /// Ticks per millisecond.
    pub const TICKS_PER_MS: i64 = 1_000_000;
    /// Zero.
    pub const ZERO: Latency = Latency(0);
    /// One millisecond.
    pub const ONE_MS: Latency = Latency(Self::TICKS_PER_MS);

    /// Builds a value from raw ticks.
    pub const fn from_ticks(ticks: i64) -> Self {
        Latency(ticks)
    }

    /// Builds a value from whole milliseconds.
    pub const fn from_ms(ms: i64) -> Self {
        Latency(ms * Self::TICKS_PER_MS)
    }

    /// Rounds a floating-point millisecond value to the nearest tick.
    pub fn from_ms_f64(ms: f64) -> Self {
        Latency((ms * Self::TICKS_PER_MS as f64).round() as i64)
    }

    /// Raw ticks.
    pub const fn ticks(self) -> i64 {
        self.0
    }

    /// Value in milliseconds as a float (lossy for huge values only).
    pub fn as_ms_f64(self) -> f64 {
        self.0 as f64 / Self::TICKS_PER_MS as f64
    }

    pub fn is_negative(self) -> bool {
        self.0 < 0
    }

    pub fn max(self, other: Latency) -> Latency {
        Latency(self.0.max(other.0))
    }

    /// Smallest multiple of `step` that is `>= self`. `step` must be positive.
    pub fn ceil_to_multiple(self, step: Latency) -> Latency {
        debug_assert!(step.0 > 0);
        Latency(self.0.div_euclid(step.0) * step.0 + if self.0.rem_euclid(step.0) == 0 { 0 } else { step.0 })
    }
}

impl Add for Latency {
    type Output = Latency;
    fn add(self, rhs: Latency) -> Latency {
        Latency(self.0 + rhs.0)
    }
}

impl AddAssign for Latency {
    fn add_assign(&mut self, rhs: Latency) {
        self.0 += rhs.0;
    }
}

impl Sub for Latency {
    type Output = Latency;
    fn sub(self, rhs: Latency) -> Latency {
        Latency(self.0 - rhs.0)
    }
}

impl Mul<i64> for Latency {
    type Output = Latency;
    fn mul(self, rhs: i64) -> Latency {
        Latency(self.0 * rhs)
    }
}

impl Sum for Latency {
    fn sum<I: Iterator<Item = Latency>>(iter: I) -> Latency {
        iter.fold(Latency::ZERO, Add::add)
    }
}

impl fmt::Display for Latency {
    /// Decimal milliseconds without trailing zeros, e.g. `12.5`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.0 < 0 { "-" } else { "" };
        let abs = self.0.unsigned_abs();
        let whole = abs / Self::TICKS_PER_MS as u64;
        let frac = abs % Self::TICKS_PER_MS as u64;
        if frac == 0 {
            write!(f, "{sign}{whole}")
        } else {
            let digits = format!("{frac:06}");
            write!(f, "{sign}{whole}.{}", digits.trim_end_matches('0'))
        }
    }
}

/// Error returned when a latency string is not a non-negative decimal number.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid latency `{0}`")]
pub struct ParseLatencyError(pub String);

impl FromStr for Latency {
    type Err = ParseLatencyError;

    /// Parses a non-negative decimal millisecond value. Up to six fractional
    /// digits are taken exactly; anything else goes through `f64` and is
    /// rounded to the nearest tick.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseLatencyError(s.to_string());
        let t = s.trim();
        if t.is_empty() || t.starts_with('-') {
            return Err(err());
        }
        let exact = t.split_once('.').map_or(Some((t, "")), Some).and_then(|(int, frac)| {
            let plain = |p: &str| p.bytes().all(|b| b.is_ascii_digit());
            if !plain(int) || !plain(frac) || frac.len() > 6 || (int.is_empty() && frac.is_empty()) {
                return None;
            }
            let int: i64 = if int.is_empty() { 0 } else { int.parse().ok()? };
            let mut scaled: i64 = if frac.is_empty() { 0 } else { frac.parse().ok()? };
            for _ in frac.len()..6 {
                scaled *= 10;
            }
            int.checked_mul(Self::TICKS_PER_MS)?.checked_add(scaled)
        });
        if let Some(ticks) = exact {
            return Ok(Latency(ticks));
        }
        let v: f64 = t.parse().map_err(|_| err())?;
        if !v.is_finite() || v < 0.0 {
            return Err(err());
        }
        Ok(Latency::from_ms_f64(v))
    }
}
