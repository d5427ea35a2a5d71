//! Receiver playout deadline.

use crate::error::SimError;
use crate::sim::SimTime;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PlayoutConfig {
    pub frame_deadline: SimTime,
    pub enabled: bool,
}

impl Default for PlayoutConfig {
    fn default() -> Self {
        Self {
            frame_deadline: SimTime::from_millis(12),
            enabled: false,
        }
    }
}

impl PlayoutConfig {
    pub fn validate(&self) -> Result<(), SimError> {
        if self.frame_deadline == SimTime::ZERO {
            return Err(SimError::InvalidConfig("frame deadline must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlayoutVerdict {
    OnTime,
    LateDiscard,
}

/// The bound is inclusive. A disabled deadline never discards.
pub fn frame_deadline_check(completion: SimTime, nominal: SimTime, cfg: &PlayoutConfig) -> PlayoutVerdict {
    if cfg.enabled && completion.as_nanos() > nominal.as_nanos().saturating_add(cfg.frame_deadline.as_nanos()) {
        PlayoutVerdict::LateDiscard
    } else {
        PlayoutVerdict::OnTime
    }
}
