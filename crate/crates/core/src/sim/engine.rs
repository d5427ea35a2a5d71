//! Single-threaded discrete-event engine.
//!
//! Events are ordered by `(fire_at, seq)` where `seq` is a per-engine insertion
//! counter, so events scheduled for the same instant fire in FIFO order.

use std::cmp::{Ordering, Reverse};
use std::collections::{BinaryHeap, HashSet};
use std::io::Write;

use super::time::SimTime;
use crate::error::SimError;

/// Implemented by event payloads so that traces can name the handler.
pub trait EventKind {
    fn handler_name(&self) -> &'static str;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EventHandle(u64);

impl EventHandle {
    pub fn seq(self) -> u64 {
        self.0
    }
}

#[derive(Debug)]
pub struct Event<E> {
    pub fire_at: SimTime,
    pub seq: u64,
    pub action: E,
}

impl<E> PartialEq for Event<E> {
    fn eq(&self, other: &Self) -> bool {
        self.fire_at == other.fire_at && self.seq == other.seq
    }
}

impl<E> Eq for Event<E> {}

impl<E> PartialOrd for Event<E> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<E> Ord for Event<E> {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.fire_at, self.seq).cmp(&(other.fire_at, other.seq))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceRecord {
    pub fire_at: SimTime,
    pub seq: u64,
    pub handler: &'static str,
}

/// Pending-event queue plus the clock. Handlers receive `&mut Scheduler` so they
/// can schedule follow-up events but cannot re-enter the run loop.
#[derive(Debug)]
pub struct Scheduler<E> {
    now: SimTime,
    next_seq: u64,
    pending: BinaryHeap<Reverse<Event<E>>>,
    cancelled: HashSet<u64>,
}

impl<E> Default for Scheduler<E> {
    fn default() -> Self {
        Self {
            now: SimTime::ZERO,
            next_seq: 0,
            pending: BinaryHeap::new(),
            cancelled: HashSet::new(),
        }
    }
}

impl<E> Scheduler<E> {
    pub fn now(&self) -> SimTime {
        self.now
    }

    pub fn schedule(&mut self, fire_at: SimTime, action: E) -> Result<EventHandle, SimError> {
        if fire_at < self.now {
            return Err(SimError::SchedulingInPast {
                fire_at,
                now: self.now,
            });
        }
        let seq = self.next_seq;
        self.next_seq += 1;
        self.pending.push(Reverse(Event {
            fire_at,
            seq,
            action,
        }));
        Ok(EventHandle(seq))
    }

    pub fn schedule_in(&mut self, delay: SimTime, action: E) -> Result<EventHandle, SimError> {
        let at = self.now.checked_add(delay)?;
        self.schedule(at, action)
    }

    /// Returns false if the event already fired or was cancelled before.
    pub fn cancel(&mut self, handle: EventHandle) -> bool {
        if handle.0 >= self.next_seq {
            return false;
        }
        let live = self.pending.iter().any(|Reverse(e)| e.seq == handle.0);
        live && self.cancelled.insert(handle.0)
    }

    pub fn pending_len(&self) -> usize {
        self.pending.len() - self.cancelled.len()
    }

    fn pop_due(&mut self, t_end: SimTime) -> Option<Event<E>> {
        loop {
            let due = matches!(self.pending.peek(), Some(Reverse(e)) if e.fire_at <= t_end);
            if !due {
                return None;
            }
            let Reverse(ev) = self.pending.pop()?;
            if self.cancelled.remove(&ev.seq) {
                continue;
            }
            return Some(ev);
        }
    }
}

/// Owner of the event-handling state for one engine instance.
pub trait World<E> {
    fn handle(&mut self, sched: &mut Scheduler<E>, event: E) -> Result<(), SimError>;
}

#[derive(Debug)]
pub struct Engine<E> {
    sched: Scheduler<E>,
    trace: Option<Vec<TraceRecord>>,
}

impl<E> Default for Engine<E> {
    fn default() -> Self {
        Self {
            sched: Scheduler::default(),
            trace: None,
        }
    }
}

impl<E: EventKind> Engine<E> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_trace() -> Self {
        Self {
            sched: Scheduler::default(),
            trace: Some(Vec::new()),
        }
    }

    pub fn now(&self) -> SimTime {
        self.sched.now
    }

    pub fn scheduler(&mut self) -> &mut Scheduler<E> {
        &mut self.sched
    }

    pub fn schedule(&mut self, fire_at: SimTime, action: E) -> Result<EventHandle, SimError> {
        self.sched.schedule(fire_at, action)
    }

    pub fn cancel(&mut self, handle: EventHandle) -> bool {
        self.sched.cancel(handle)
    }

    /// Processes every event with `fire_at <= t_end`. The clock finishes at
    /// `t_end`, or stays put if `t_end` is already in the past.
    pub fn run_until<W: World<E>>(&mut self, t_end: SimTime, world: &mut W) -> Result<u64, SimError> {
        let mut processed = 0;
        while let Some(ev) = self.sched.pop_due(t_end) {
            debug_assert!(ev.fire_at >= self.sched.now);
            self.sched.now = ev.fire_at;
            if let Some(trace) = self.trace.as_mut() {
                trace.push(TraceRecord {
                    fire_at: ev.fire_at,
                    seq: ev.seq,
                    handler: ev.action.handler_name(),
                });
            }
            world.handle(&mut self.sched, ev.action)?;
            processed += 1;
        }
        if t_end > self.sched.now {
            self.sched.now = t_end;
        }
        Ok(processed)
    }

    /// Like [`run_until`](Self::run_until) but stops as soon as the queue drains,
    /// leaving the clock at the last processed event.
    pub fn run_to_quiescence<W: World<E>>(&mut self, limit: SimTime, world: &mut W) -> Result<u64, SimError> {
        let mut processed = 0;
        while let Some(ev) = self.sched.pop_due(limit) {
            self.sched.now = ev.fire_at;
            if let Some(trace) = self.trace.as_mut() {
                trace.push(TraceRecord {
                    fire_at: ev.fire_at,
                    seq: ev.seq,
                    handler: ev.action.handler_name(),
                });
            }
            world.handle(&mut self.sched, ev.action)?;
            processed += 1;
        }
        Ok(processed)
    }

    pub fn trace(&self) -> Option<&[TraceRecord]> {
        self.trace.as_deref()
    }

    /// Tab-separated dump: `fire_at_ns<TAB>seq<TAB>handler_name`.
    pub fn write_trace<Wr: Write>(&self, out: &mut Wr) -> std::io::Result<()> {
        for r in self.trace.iter().flatten() {
            writeln!(out, "{}\t{}\t{}", r.fire_at.as_nanos(), r.seq, r.handler)?;
        }
        Ok(())
    }

    /// FNV-1a over the trace dump; a cheap fingerprint for determinism checks.
    pub fn trace_hash(&self) -> u64 {
        let mut buf = Vec::new();
        self.write_trace(&mut buf).expect("write to Vec");
        super::rng::fnv1a64(&buf)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::rng::RngStream;

    #[derive(Debug, Clone, Copy)]
    struct Tag(u32);

    impl EventKind for Tag {
        fn handler_name(&self) -> &'static str {
            "tag"
        }
    }

    #[derive(Default)]
    struct Recorder {
        seen: Vec<(SimTime, u32)>,
    }

    impl World<Tag> for Recorder {
        fn handle(&mut self, sched: &mut Scheduler<Tag>, ev: Tag) -> Result<(), SimError> {
            self.seen.push((sched.now(), ev.0));
            Ok(())
        }
    }

    #[test]
    fn empty_queue_advances_clock() {
        let mut eng: Engine<Tag> = Engine::new();
        let n = eng.run_until(SimTime::from_secs(1), &mut Recorder::default()).unwrap();
        assert_eq!(n, 0);
        assert_eq!(eng.now(), SimTime::from_secs(1));
    }

    #[test]
    fn stops_at_t_end() {
        let mut eng: Engine<Tag> = Engine::new();
        for ms in 1..=3 {
            eng.schedule(SimTime::from_millis(ms), Tag(ms as u32)).unwrap();
        }
        let mut rec = Recorder::default();
        assert_eq!(eng.run_until(SimTime::from_millis(2), &mut rec).unwrap(), 2);
        assert_eq!(eng.now(), SimTime::from_millis(2));
        assert_eq!(eng.run_until(SimTime::from_millis(10), &mut rec).unwrap(), 1);
    }

    #[test]
    fn scheduling_in_past_is_rejected() {
        let mut eng: Engine<Tag> = Engine::new();
        eng.run_until(SimTime::from_millis(5), &mut Recorder::default()).unwrap();
        let now = eng.now();
        assert!(eng.schedule(now, Tag(0)).is_ok());
        let err = eng.schedule(SimTime::from_nanos(now.as_nanos() - 1), Tag(1));
        assert!(matches!(err, Err(SimError::SchedulingInPast { .. })));
    }

    #[test]
    fn event_at_now_fires_before_later_events() {
        let mut eng: Engine<Tag> = Engine::new();
        eng.schedule(SimTime::from_millis(1), Tag(1)).unwrap();
        eng.schedule(SimTime::ZERO, Tag(0)).unwrap();
        let mut rec = Recorder::default();
        eng.run_until(SimTime::from_millis(1), &mut rec).unwrap();
        assert_eq!(rec.seen.iter().map(|s| s.1).collect::<Vec<_>>(), vec![0, 1]);
    }

    #[test]
    fn cancel_removes_pending_event() {
        let mut eng: Engine<Tag> = Engine::new();
        let h = eng.schedule(SimTime::from_millis(1), Tag(1)).unwrap();
        eng.schedule(SimTime::from_millis(2), Tag(2)).unwrap();
        assert!(eng.cancel(h));
        assert!(!eng.cancel(h));
        let mut rec = Recorder::default();
        eng.run_until(SimTime::from_secs(1), &mut rec).unwrap();
        assert_eq!(rec.seen.len(), 1);
        assert_eq!(rec.seen[0].1, 2);
    }

    #[test]
    fn randomized_order_matches_stable_sort_oracle() {
        let mut rng = RngStream::new(99, "order-oracle");
        let mut eng: Engine<Tag> = Engine::new();
        let mut expected: Vec<(u64, u32)> = Vec::new();
        for i in 0..10_000u32 {
            // Few distinct timestamps so ties are common.
            let t = rng.uniform_int(0, 200) as u64;
            eng.schedule(SimTime::from_micros(t), Tag(i)).unwrap();
            expected.push((t, i));
        }
        // Stable sort by time keeps insertion order among equal times.
        expected.sort_by_key(|&(t, _)| t);
        let mut rec = Recorder::default();
        assert_eq!(eng.run_until(SimTime::from_secs(1), &mut rec).unwrap(), 10_000);
        let got: Vec<(u64, u32)> = rec
            .seen
            .iter()
            .map(|(t, i)| (t.as_nanos() / 1_000, *i))
            .collect();
        assert_eq!(got, expected);
    }

    #[test]
    fn trace_lines_are_tab_separated() {
        let mut eng: Engine<Tag> = Engine::with_trace();
        eng.schedule(SimTime::from_nanos(5), Tag(0)).unwrap();
        eng.run_until(SimTime::from_secs(1), &mut Recorder::default()).unwrap();
        let mut out = Vec::new();
        eng.write_trace(&mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "5\t0\ttag\n");
    }
}
