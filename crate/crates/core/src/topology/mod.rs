//! Nodes, links, queues and the shared-channel abstractions.

pub mod channel;
pub mod link;
pub mod queue;

pub use channel::{contention_efficiency, per_member_rate, ChannelKind, NodeId, SharedChannel, Tier};
pub use link::{transmission_delay, Delivery, Link, LinkConfig, LinkCounters, LinkEvent, LinkId, WirePacket};
pub use queue::{DropTailQueue, EnqueueOutcome};
