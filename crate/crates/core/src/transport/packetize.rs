//! Splitting encoded frames into MTU-bounded segments.

use crate::codec::{EncodedFrame, FrameType};
use crate::error::TransportError;
use crate::sim::SimTime;
use crate::topology::WirePacket;

/// IP + UDP + a 12-byte application header.
pub const DEFAULT_HEADER_BYTES: usize = 40;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Segment {
    pub flow_id: u32,
    pub seq: u64,
    pub frame_index: u32,
    pub frame_type: FrameType,
    pub frag_index: u32,
    pub frag_count: u32,
    pub payload: Vec<u8>,
    pub header_bytes: usize,
    /// Stamped when the segment is injected into the first hop.
    pub send_time: SimTime,
}

impl WirePacket for Segment {
    fn wire_size(&self) -> usize {
        self.header_bytes + self.payload.len()
    }
}

/// Per-flow packetizer keeping the sequence counter.
#[derive(Debug, Clone)]
pub struct Packetizer {
    pub flow_id: u32,
    pub mtu_bytes: usize,
    pub header_bytes: usize,
    next_seq: u64,
}

impl Packetizer {
    pub fn new(flow_id: u32, mtu_bytes: usize, header_bytes: usize) -> Result<Self, TransportError> {
        if mtu_bytes <= header_bytes {
            return Err(TransportError::MtuTooSmall {
                mtu: mtu_bytes,
                header: header_bytes,
            });
        }
        Ok(Self {
            flow_id,
            mtu_bytes,
            header_bytes,
            next_seq: 0,
        })
    }

    pub fn max_fragment(&self) -> usize {
        self.mtu_bytes - self.header_bytes
    }

    pub fn next_seq(&self) -> u64 {
        self.next_seq
    }

    pub fn packetize(&mut self, frame: &EncodedFrame) -> Result<Vec<Segment>, TransportError> {
        if frame.payload.is_empty() {
            return Err(TransportError::EmptyPayload(frame.index));
        }
        let chunk = self.max_fragment();
        let frag_count = frame.payload.len().div_ceil(chunk) as u32;
        let segments = frame
            .payload
            .chunks(chunk)
            .enumerate()
            .map(|(i, part)| {
                let seq = self.next_seq;
                self.next_seq += 1;
                Segment {
                    flow_id: self.flow_id,
                    seq,
                    frame_index: frame.index,
                    frame_type: frame.frame_type,
                    frag_index: i as u32,
                    frag_count,
                    payload: part.to_vec(),
                    header_bytes: self.header_bytes,
                    send_time: SimTime::ZERO,
                }
            })
            .collect();
        Ok(segments)
    }
}

/// One-shot packetization with sequence numbers starting at 0.
pub fn packetize(
    frame: &EncodedFrame,
    flow_id: u32,
    mtu_bytes: usize,
    header_bytes: usize,
) -> Result<Vec<Segment>, TransportError> {
    Packetizer::new(flow_id, mtu_bytes, header_bytes)?.packetize(frame)
}
