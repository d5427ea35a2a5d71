//! Discrete-event simulation of GOP-structured video streaming over a
//! disaster-area broadband network.
//!
//! Video is encoded by a toy GOP codec, split into MTU-sized segments, carried
//! over wired, Wi-Fi and WiMAX hops with drop-tail queues, rate/burst error
//! models and mobility-driven loss, then reassembled, decoded with frame-repeat
//! concealment and scored (Y-PSNR, bitrate, delay, jitter, throughput).
//!
//! See the `examples/` directory for one runnable program per capability.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod codec;
pub mod error;
pub mod error_model;
pub mod mobility;
pub mod scenario;
pub mod sim;
pub mod topology;
pub mod transport;

pub use error::{Error, Result};
