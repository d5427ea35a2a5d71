//! Discrete-event core: time base, engine, and random streams.

pub mod engine;
pub mod rng;
pub mod time;

pub use engine::{Engine, EventHandle, EventKind, Scheduler, TraceRecord, World};
pub use rng::{derive_seed, RngStream};
pub use time::SimTime;
