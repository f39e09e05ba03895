//! Integer-second time base.
//!
//! All instants are seconds relative to an instance epoch. Documents may
//! spell them as plain integers, as `HH:MM[:SS]` clock times (hours may
//! exceed 24 for multi-day instances) or as ISO-8601 local timestamps when
//! the document declares an epoch.

use std::fmt;
use std::ops::{Add, AddAssign, Sub};

use chrono::NaiveDateTime;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TimePoint(pub i64);

/// A non-negative span of seconds.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Duration(i64);

impl TimePoint {
    pub const MIN: TimePoint = TimePoint(i64::MIN / 4);
    pub const MAX: TimePoint = TimePoint(i64::MAX / 4);

    #[inline]
    pub const fn secs(self) -> i64 {
        self.0
    }
}

impl Duration {
    pub const ZERO: Duration = Duration(0);

    pub fn new(secs: i64) -> Result<Self> {
        if secs < 0 {
            return Err(Error::NegativeDuration(secs));
        }
        Ok(Duration(secs))
    }

    /// Panics on negative input; for literals and generator code.
    pub const fn from_secs(secs: i64) -> Self {
        assert!(secs >= 0, "negative duration");
        Duration(secs)
    }

    #[inline]
    pub const fn secs(self) -> i64 {
        self.0
    }
}

impl Add<i64> for TimePoint {
    type Output = TimePoint;
    #[inline]
    fn add(self, rhs: i64) -> TimePoint {
        TimePoint(self.0 + rhs)
    }
}

impl Sub<i64> for TimePoint {
    type Output = TimePoint;
    #[inline]
    fn sub(self, rhs: i64) -> TimePoint {
        TimePoint(self.0 - rhs)
    }
}

impl Add<Duration> for TimePoint {
    type Output = TimePoint;
    #[inline]
    fn add(self, rhs: Duration) -> TimePoint {
        TimePoint(self.0 + rhs.0)
    }
}

impl Sub<Duration> for TimePoint {
    type Output = TimePoint;
    #[inline]
    fn sub(self, rhs: Duration) -> TimePoint {
        TimePoint(self.0 - rhs.0)
    }
}

impl Sub for TimePoint {
    type Output = i64;
    #[inline]
    fn sub(self, rhs: TimePoint) -> i64 {
        self.0 - rhs.0
    }
}

impl AddAssign<i64> for TimePoint {
    fn add_assign(&mut self, rhs: i64) {
        self.0 += rhs;
    }
}

impl Add for Duration {
    type Output = Duration;
    fn add(self, rhs: Duration) -> Duration {
        Duration(self.0 + rhs.0)
    }
}

impl fmt::Display for TimePoint {
    /// `HH:MM:SS`, with hours running past 24 on later days.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = self.0;
        if s < 0 {
            return write!(f, "{s}");
        }
        write!(f, "{:02}:{:02}:{:02}", s / 3600, (s / 60) % 60, s % 60)
    }
}

impl fmt::Display for Duration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}s", self.0)
    }
}

/// The reference instant that ISO timestamps are measured against.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Epoch(pub NaiveDateTime);

impl Epoch {
    pub fn parse(text: &str) -> Result<Self> {
        parse_iso(text)
            .map(Epoch)
            .ok_or_else(|| Error::InvalidValue(format!("bad epoch timestamp `{text}`")))
    }
}

impl fmt::Display for Epoch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0.format("%Y-%m-%dT%H:%M:%S"))
    }
}

fn parse_iso(text: &str) -> Option<NaiveDateTime> {
    NaiveDateTime::parse_from_str(text, "%Y-%m-%dT%H:%M:%S")
        .or_else(|_| NaiveDateTime::parse_from_str(text, "%Y-%m-%dT%H:%M"))
        .ok()
}

/// Parses an instant in any accepted spelling.
pub fn parse_time(text: &str, epoch: Option<Epoch>) -> Result<TimePoint> {
    let text = text.trim();
    if let Ok(v) = text.parse::<i64>() {
        return Ok(TimePoint(v));
    }
    if text.contains('T') {
        let stamp = parse_iso(text)
            .ok_or_else(|| Error::InvalidValue(format!("bad timestamp `{text}`")))?;
        let epoch = epoch.ok_or_else(|| {
            Error::InvalidValue(format!("timestamp `{text}` needs an epoch declaration"))
        })?;
        return Ok(TimePoint((stamp - epoch.0).num_seconds()));
    }
    let parts: Vec<&str> = text.split(':').collect();
    if !(2..=3).contains(&parts.len()) {
        return Err(Error::InvalidValue(format!("bad time `{text}`")));
    }
    let mut fields = [0i64; 3];
    for (slot, part) in fields.iter_mut().zip(&parts) {
        *slot = part
            .parse::<i64>()
            .ok()
            .filter(|v| *v >= 0)
            .ok_or_else(|| Error::InvalidValue(format!("bad time `{text}`")))?;
    }
    if fields[1] >= 60 || fields[2] >= 60 {
        return Err(Error::InvalidValue(format!("bad time `{text}`")));
    }
    Ok(TimePoint(fields[0] * 3600 + fields[1] * 60 + fields[2]))
}

pub fn parse_duration(text: &str) -> Result<Duration> {
    let v = text
        .trim()
        .parse::<i64>()
        .map_err(|_| Error::InvalidValue(format!("bad duration `{text}`")))?;
    Duration::new(v)
}
