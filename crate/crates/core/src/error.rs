use thiserror::Error;

use crate::sim::SimTime;

#[derive(Debug, Error, PartialEq)]
pub enum SimError {
    #[error("event scheduled at {fire_at} but clock is already at {now}")]
    SchedulingInPast { fire_at: SimTime, now: SimTime },
    #[error("simulation time overflow")]
    TimeOverflow,
    #[error("invalid time value {0}")]
    InvalidTime(f64),
    #[error("packet of {size} bytes exceeds link MTU {mtu}")]
    OversizedPacket { size: usize, mtu: usize },
    #[error("node {0} is not an active member of the channel")]
    MemberNotActive(usize),
    #[error("negative delay: received at {recv} before send time {sent}")]
    NegativeDelay { sent: SimTime, recv: SimTime },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

#[derive(Debug, Error, PartialEq)]
pub enum CodecError {
    #[error("frame dimensions {got:?} differ from {expected:?}")]
    DimensionMismatch {
        expected: (usize, usize),
        got: (usize, usize),
    },
    #[error("no frames to encode")]
    EmptyInput,
    #[error("frame dimensions must be positive and even, got {0}x{1}")]
    OddDimensions(usize, usize),
    #[error("invalid GOP configuration: {0}")]
    InvalidGop(String),
    #[error("malformed bitstream: {0}")]
    Malformed(String),
}

#[derive(Debug, Error, PartialEq)]
pub enum TransportError {
    #[error("frame {0} has an empty payload")]
    EmptyPayload(u32),
    #[error("MTU {mtu} leaves no room for a {header}-byte header")]
    MtuTooSmall { mtu: usize, header: usize },
    #[error("duplicate fragment {frag_index} of frame {frame_index}")]
    DuplicateFragment { frame_index: u32, frag_index: u32 },
    #[error("inconsistent fragment header for frame {0}")]
    InconsistentFragment(u32),
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("parse error{}: {message}", location.as_ref().map(|l| format!(" at {l}")).unwrap_or_default())]
    Parse {
        message: String,
        location: Option<String>,
    },
    #[error("validation error: {0}")]
    Validation(String),
    #[error("cannot read config {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

/// Umbrella error for scenario runs and the CLI.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Codec(#[from] CodecError),
    #[error(transparent)]
    Transport(#[from] TransportError),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("{0}")]
    Other(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
