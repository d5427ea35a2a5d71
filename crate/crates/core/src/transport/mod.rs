//! Packetization, reassembly and per-flow QoS statistics.

mod packetize;
mod playout;
mod reassembly;
mod stats;

pub use packetize::{packetize, Packetizer, Segment, DEFAULT_HEADER_BYTES};
pub use playout::{frame_deadline_check, PlayoutConfig, PlayoutVerdict};
pub use reassembly::{CompletedFrame, LossCause, Reassembler, Reassembly};
pub use stats::{flow_throughput, record_delivery, FlowStats, JitterEstimator};
