use std::fmt;
use std::ops::{Add, Sub};

use crate::error::SimError;

/// Simulation timestamp with 1 ns resolution.
///
/// Arithmetic through [`SimTime::checked_add`] is the overflow-safe path; the
/// `Add` impl panics on overflow instead of wrapping.
#[derive(Debug, Default, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SimTime(u64);

pub const NANOS_PER_SEC: u64 = 1_000_000_000;

impl SimTime {
    pub const ZERO: SimTime = SimTime(0);
    pub const MAX: SimTime = SimTime(u64::MAX);

    pub const fn from_nanos(ns: u64) -> Self {
        SimTime(ns)
    }

    pub const fn from_micros(us: u64) -> Self {
        SimTime(us * 1_000)
    }

    pub const fn from_millis(ms: u64) -> Self {
        SimTime(ms * 1_000_000)
    }

    pub const fn from_secs(s: u64) -> Self {
        SimTime(s * NANOS_PER_SEC)
    }

    /// Rounds to the nearest tick. Negative and non-finite inputs are rejected.
    pub fn from_secs_f64(s: f64) -> Result<Self, SimError> {
        if !s.is_finite() || s < 0.0 {
            return Err(SimError::InvalidTime(s));
        }
        let ns = (s * NANOS_PER_SEC as f64).round();
        if ns > u64::MAX as f64 {
            return Err(SimError::TimeOverflow);
        }
        Ok(SimTime(ns as u64))
    }

    pub fn from_millis_f64(ms: f64) -> Result<Self, SimError> {
        Self::from_secs_f64(ms / 1e3)
    }

    pub const fn as_nanos(self) -> u64 {
        self.0
    }

    pub fn as_secs_f64(self) -> f64 {
        self.0 as f64 / NANOS_PER_SEC as f64
    }

    pub fn as_millis_f64(self) -> f64 {
        self.0 as f64 / 1e6
    }

    pub fn checked_add(self, rhs: SimTime) -> Result<SimTime, SimError> {
        self.0.checked_add(rhs.0).map(SimTime).ok_or(SimError::TimeOverflow)
    }

    pub fn checked_sub(self, rhs: SimTime) -> Option<SimTime> {
        self.0.checked_sub(rhs.0).map(SimTime)
    }

    pub fn saturating_sub(self, rhs: SimTime) -> SimTime {
        SimTime(self.0.saturating_sub(rhs.0))
    }
}

impl Add for SimTime {
    type Output = SimTime;

    fn add(self, rhs: SimTime) -> SimTime {
        SimTime(self.0.checked_add(rhs.0).expect("SimTime overflow"))
    }
}

impl Sub for SimTime {
    type Output = SimTime;

    fn sub(self, rhs: SimTime) -> SimTime {
        SimTime(self.0.checked_sub(rhs.0).expect("SimTime underflow"))
    }
}

impl fmt::Display for SimTime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.6}ms", self.as_millis_f64())
    }
}
