//! Receiver-side frame reassembly.

use std::collections::BTreeMap;

use super::packetize::Segment;
use crate::codec::FrameType;
use crate::error::TransportError;
use crate::sim::SimTime;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LossCause {
    Corrupt,
    QueueDrop,
    Late,
    Incomplete,
}

impl LossCause {
    pub fn label(self) -> &'static str {
        match self {
            LossCause::Corrupt => "lost_corrupt",
            LossCause::QueueDrop => "lost_queue",
            LossCause::Late => "lost_late",
            LossCause::Incomplete => "lost_incomplete",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompletedFrame {
    pub frame_index: u32,
    pub frame_type: FrameType,
    pub payload: Vec<u8>,
    pub completed_at: SimTime,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Reassembly {
    Pending,
    Complete(CompletedFrame),
    /// The fragment arrived but its frame is already known to be lost.
    Unusable,
    Duplicate,
}

#[derive(Debug, Clone)]
struct FrameSlot {
    frame_type: FrameType,
    fragments: Vec<Option<Vec<u8>>>,
    received: u32,
    lost: Option<LossCause>,
    done: bool,
}

impl FrameSlot {
    fn new(frame_type: FrameType, frag_count: u32) -> Self {
        Self {
            frame_type,
            fragments: vec![None; frag_count as usize],
            received: 0,
            lost: None,
            done: false,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Reassembler {
    slots: BTreeMap<u32, FrameSlot>,
    pub duplicates: u64,
    pub unusable: u64,
}

impl Reassembler {
    pub fn new() -> Self {
        Self::default()
    }

    fn slot(&mut self, frame_index: u32, frame_type: FrameType, frag_count: u32) -> Result<&mut FrameSlot, TransportError> {
        let slot = self
            .slots
            .entry(frame_index)
            .or_insert_with(|| FrameSlot::new(frame_type, frag_count));
        if slot.fragments.len() != frag_count as usize || slot.frame_type != frame_type {
            return Err(TransportError::InconsistentFragment(frame_index));
        }
        Ok(slot)
    }

    /// Buffers an uncorrupted fragment; emits the frame once all fragments are in.
    pub fn on_segment(&mut self, seg: &Segment, now: SimTime) -> Result<Reassembly, TransportError> {
        if seg.frag_index >= seg.frag_count {
            return Err(TransportError::InconsistentFragment(seg.frame_index));
        }
        let slot = self.slot(seg.frame_index, seg.frame_type, seg.frag_count)?;
        let cell = &mut slot.fragments[seg.frag_index as usize];
        if cell.is_some() {
            self.duplicates += 1;
            return Ok(Reassembly::Duplicate);
        }
        *cell = Some(seg.payload.clone());
        slot.received += 1;
        if slot.lost.is_some() {
            self.unusable += 1;
            return Ok(Reassembly::Unusable);
        }
        if slot.received as usize == slot.fragments.len() {
            slot.done = true;
            let payload = slot.fragments.iter().flatten().flat_map(|p| p.iter().copied()).collect();
            return Ok(Reassembly::Complete(CompletedFrame {
                frame_index: seg.frame_index,
                frame_type: slot.frame_type,
                payload,
                completed_at: now,
            }));
        }
        Ok(Reassembly::Pending)
    }

    /// Records that a fragment of the frame will never arrive intact.
    pub fn mark_fragment_lost(&mut self, frame_index: u32, frame_type: FrameType, frag_count: u32, cause: LossCause) -> Result<(), TransportError> {
        let slot = self.slot(frame_index, frame_type, frag_count)?;
        if slot.lost.is_none() {
            slot.lost = Some(cause);
            // Fragments already buffered can no longer be used.
            self.unusable += slot.received as u64;
        }
        Ok(())
    }

    /// Marks a completed frame as discarded by the playout deadline.
    pub fn mark_late(&mut self, frame_index: u32) {
        if let Some(slot) = self.slots.get_mut(&frame_index) {
            slot.lost.get_or_insert(LossCause::Late);
        }
    }

    pub fn loss_cause(&self, frame_index: u32) -> Option<LossCause> {
        let slot = self.slots.get(&frame_index)?;
        slot.lost.or(if slot.done { None } else { Some(LossCause::Incomplete) })
    }

    /// Final per-frame verdict for frames `0..frame_count`.
    pub fn outcomes(&self, frame_count: u32) -> Vec<Option<LossCause>> {
        (0..frame_count)
            .map(|i| match self.slots.get(&i) {
                None => Some(LossCause::Incomplete),
                Some(_) => self.loss_cause(i),
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codec::EncodedFrame;
    use crate::transport::packetize::packetize;

    fn segments(len: usize) -> (Vec<u8>, Vec<Segment>) {
        let payload: Vec<u8> = (0..len).map(|i| (i % 253) as u8).collect();
        let f = EncodedFrame {
            index: 0,
            frame_type: FrameType::I,
            payload: payload.clone(),
            qp: 32,
            ref_index: None,
        };
        (payload, packetize(&f, 0, 1400, 40).unwrap())
    }

    #[test]
    fn in_order_completes_on_last_fragment() {
        let (payload, segs) = segments(3000);
        let mut r = Reassembler::new();
        assert_eq!(r.on_segment(&segs[0], SimTime::from_millis(1)).unwrap(), Reassembly::Pending);
        assert_eq!(r.on_segment(&segs[1], SimTime::from_millis(2)).unwrap(), Reassembly::Pending);
        match r.on_segment(&segs[2], SimTime::from_millis(3)).unwrap() {
            Reassembly::Complete(c) => {
                assert_eq!(c.payload, payload);
                assert_eq!(c.completed_at, SimTime::from_millis(3));
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(r.outcomes(1), vec![None]);
    }

    #[test]
    fn out_of_order_gives_same_bytes() {
        let (payload, segs) = segments(3000);
        let mut r = Reassembler::new();
        let mut last = Reassembly::Pending;
        for i in [2, 0, 1] {
            last = r.on_segment(&segs[i], SimTime::ZERO).unwrap();
        }
        assert!(matches!(last, Reassembly::Complete(c) if c.payload == payload));
    }

    #[test]
    fn any_single_lost_fragment_loses_the_frame() {
        let (_, segs) = segments(3000);
        for lost in 0..segs.len() {
            let mut r = Reassembler::new();
            for (i, s) in segs.iter().enumerate() {
                if i == lost {
                    r.mark_fragment_lost(0, FrameType::I, 3, LossCause::Corrupt).unwrap();
                } else {
                    let out = r.on_segment(s, SimTime::ZERO).unwrap();
                    assert!(!matches!(out, Reassembly::Complete(_)));
                }
            }
            assert_eq!(r.outcomes(1), vec![Some(LossCause::Corrupt)]);
            assert_eq!(r.unusable, 2);
        }
    }

    #[test]
    fn duplicates_are_counted_and_ignored() {
        let (_, segs) = segments(100);
        let mut r = Reassembler::new();
        assert!(matches!(r.on_segment(&segs[0], SimTime::ZERO).unwrap(), Reassembly::Complete(_)));
        assert_eq!(r.on_segment(&segs[0], SimTime::ZERO).unwrap(), Reassembly::Duplicate);
        assert_eq!(r.duplicates, 1);
        assert_eq!(r.outcomes(1), vec![None]);
    }

    #[test]
    fn never_seen_frames_are_incomplete() {
        let r = Reassembler::new();
        assert_eq!(r.outcomes(2), vec![Some(LossCause::Incomplete); 2]);
    }
}
