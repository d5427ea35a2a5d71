//! Packet corruption processes: a memoryless rate model and a burst model.
//!
//! Corruption is a per-packet verdict; payload bytes are never altered.

use serde::{Deserialize, Serialize};

use crate::error::SimError;
use crate::sim::RngStream;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorUnit {
    Bit,
    #[default]
    Byte,
    Packet,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateErrorConfig {
    pub rate: f64,
    pub unit: ErrorUnit,
}

impl RateErrorConfig {
    pub fn validate(&self) -> Result<(), SimError> {
        if !(0.0..=1.0).contains(&self.rate) {
            return Err(SimError::InvalidConfig(format!(
                "error rate must lie in [0, 1], got {}",
                self.rate
            )));
        }
        Ok(())
    }

    /// Closed-form probability that a packet of `size_bytes` is corrupted.
    pub fn packet_error_probability(&self, size_bytes: usize) -> f64 {
        let trials = match self.unit {
            ErrorUnit::Packet => return self.rate,
            ErrorUnit::Byte => size_bytes as f64,
            ErrorUnit::Bit => 8.0 * size_bytes as f64,
        };
        // 1 − (1 − r)^k without cancellation for tiny r.
        -f64::exp_m1(trials * f64::ln_1p(-self.rate))
    }
}

/// Finite distribution over burst lengths (all ≥ 1).
#[derive(Debug, Clone, PartialEq)]
pub enum BurstSizeDist {
    Uniform { min: u32, max: u32 },
    Weighted(Vec<(u32, f64)>),
}

impl BurstSizeDist {
    pub fn validate(&self) -> Result<(), SimError> {
        match self {
            BurstSizeDist::Uniform { min, max } if *min >= 1 && min <= max => Ok(()),
            BurstSizeDist::Weighted(w)
                if !w.is_empty()
                    && w.iter().all(|(s, p)| *s >= 1 && *p >= 0.0)
                    && w.iter().map(|(_, p)| p).sum::<f64>() > 0.0 =>
            {
                Ok(())
            }
            other => Err(SimError::InvalidConfig(format!("invalid burst size distribution {other:?}"))),
        }
    }

    pub fn mean(&self) -> f64 {
        match self {
            BurstSizeDist::Uniform { min, max } => (*min as f64 + *max as f64) / 2.0,
            BurstSizeDist::Weighted(w) => {
                let total: f64 = w.iter().map(|(_, p)| p).sum();
                w.iter().map(|(s, p)| *s as f64 * p).sum::<f64>() / total
            }
        }
    }

    /// Probability mass of burst length `s`.
    pub fn pmf(&self, s: u32) -> f64 {
        match self {
            BurstSizeDist::Uniform { min, max } => {
                if (*min..=*max).contains(&s) {
                    1.0 / (max - min + 1) as f64
                } else {
                    0.0
                }
            }
            BurstSizeDist::Weighted(w) => {
                let total: f64 = w.iter().map(|(_, p)| p).sum();
                w.iter().filter(|(k, _)| *k == s).map(|(_, p)| p).sum::<f64>() / total
            }
        }
    }

    pub fn support_max(&self) -> u32 {
        match self {
            BurstSizeDist::Uniform { max, .. } => *max,
            BurstSizeDist::Weighted(w) => w.iter().map(|(s, _)| *s).max().unwrap_or(1),
        }
    }

    fn sample(&self, stream: &mut RngStream) -> u32 {
        match self {
            BurstSizeDist::Uniform { min, max } => stream.uniform_int(*min, *max),
            BurstSizeDist::Weighted(w) => {
                let total: f64 = w.iter().map(|(_, p)| p).sum();
                let mut u = stream.uniform() * total;
                for (s, p) in w {
                    if u < *p {
                        return *s;
                    }
                    u -= p;
                }
                w.last().map(|(s, _)| *s).unwrap_or(1)
            }
        }
    }
}

impl Default for BurstSizeDist {
    fn default() -> Self {
        BurstSizeDist::Uniform { min: 1, max: 4 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BurstErrorConfig {
    pub burst_rate: f64,
    pub size_dist: BurstSizeDist,
}

impl BurstErrorConfig {
    pub fn validate(&self) -> Result<(), SimError> {
        if !(0.0..=1.0).contains(&self.burst_rate) {
            return Err(SimError::InvalidConfig(format!(
                "burst rate must lie in [0, 1], got {}",
                self.burst_rate
            )));
        }
        self.size_dist.validate()
    }

    /// Long-run fraction of corrupted packets. A renewal cycle is a geometric
    /// wait ending in a burst start plus the `s − 1` continuation packets.
    pub fn corrupt_fraction(&self) -> f64 {
        let b = self.burst_rate;
        if b == 0.0 {
            return 0.0;
        }
        let e = self.size_dist.mean();
        e / (1.0 / b - 1.0 + e)
    }

    /// Burst-start probability whose long-run corrupted fraction equals `fraction`.
    pub fn burst_rate_for_fraction(fraction: f64, size_dist: &BurstSizeDist) -> f64 {
        if fraction <= 0.0 {
            return 0.0;
        }
        let e = size_dist.mean();
        (fraction / (e * (1.0 - fraction) + fraction)).min(1.0)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BurstState {
    pub remaining: u32,
}

/// One draw, true with the closed-form probability for this packet size.
pub fn rate_is_corrupt(packet_size_bytes: usize, cfg: &RateErrorConfig, stream: &mut RngStream) -> bool {
    let p = cfg.packet_error_probability(packet_size_bytes);
    stream.uniform() < p
}

pub fn burst_is_corrupt(cfg: &BurstErrorConfig, state: &mut BurstState, stream: &mut RngStream) -> bool {
    if state.remaining > 0 {
        state.remaining -= 1;
        return true;
    }
    if stream.uniform() < cfg.burst_rate {
        let s = cfg.size_dist.sample(stream);
        state.remaining = s - 1;
        return true;
    }
    false
}

pub fn reset_error_state(state: &mut BurstState) {
    state.remaining = 0;
}

/// A model instance: configuration, private state and its own random stream.
#[derive(Debug, Clone)]
pub enum ErrorModel {
    Rate {
        cfg: RateErrorConfig,
        stream: RngStream,
    },
    Burst {
        cfg: BurstErrorConfig,
        state: BurstState,
        stream: RngStream,
    },
}

impl ErrorModel {
    pub fn rate(cfg: RateErrorConfig, stream: RngStream) -> Self {
        ErrorModel::Rate { cfg, stream }
    }

    pub fn burst(cfg: BurstErrorConfig, stream: RngStream) -> Self {
        ErrorModel::Burst {
            cfg,
            state: BurstState::default(),
            stream,
        }
    }

    pub fn is_corrupt(&mut self, size_bytes: usize) -> bool {
        match self {
            ErrorModel::Rate { cfg, stream } => rate_is_corrupt(size_bytes, cfg, stream),
            ErrorModel::Burst { cfg, state, stream } => burst_is_corrupt(cfg, state, stream),
        }
    }

    pub fn reset(&mut self) {
        if let ErrorModel::Burst { state, .. } = self {
            reset_error_state(state);
        }
    }
}
