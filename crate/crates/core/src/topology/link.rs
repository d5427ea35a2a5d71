//! Point-to-point store-and-forward links with a drop-tail transmit queue.

use crate::error::SimError;
use crate::error_model::ErrorModel;
use crate::sim::{Scheduler, SimTime};

use super::queue::{DropTailQueue, EnqueueOutcome};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LinkId(pub usize);

#[derive(Debug, Clone, PartialEq)]
pub struct LinkConfig {
    pub rate_bps: f64,
    pub prop_delay: SimTime,
    pub mtu_bytes: usize,
    pub queue_capacity_pkts: usize,
}

impl LinkConfig {
    /// Relief-centre CSMA segment: 5 Mbps, 2 ms, MTU 1400.
    pub fn csma_default() -> Self {
        Self {
            rate_bps: 5e6,
            prop_delay: SimTime::from_millis(2),
            mtu_bytes: 1400,
            queue_capacity_pkts: 100,
        }
    }

    /// BTS-to-server backhaul: 100 Mbps Ethernet, 2 ms, MTU 1400.
    pub fn backhaul_default() -> Self {
        Self {
            rate_bps: 100e6,
            ..Self::csma_default()
        }
    }

    pub fn validate(&self) -> Result<(), SimError> {
        if !(self.rate_bps > 0.0) || !self.rate_bps.is_finite() {
            return Err(SimError::InvalidConfig(format!(
                "link rate must be positive, got {}",
                self.rate_bps
            )));
        }
        if self.mtu_bytes < 64 {
            return Err(SimError::InvalidConfig(format!(
                "MTU must be at least 64 bytes, got {}",
                self.mtu_bytes
            )));
        }
        if self.queue_capacity_pkts == 0 {
            return Err(SimError::InvalidConfig("queue capacity must be positive".into()));
        }
        Ok(())
    }
}

impl Default for LinkConfig {
    fn default() -> Self {
        Self::csma_default()
    }
}

/// Serialization time `size·8 / rate`, rounded to the nearest tick.
pub fn transmission_delay(size_bytes: usize, rate_bps: f64) -> SimTime {
    let ns = (size_bytes as f64 * 8.0 * 1e9 / rate_bps).round();
    SimTime::from_nanos(ns as u64)
}

pub trait WirePacket {
    fn wire_size(&self) -> usize;
}

/// Events a link needs scheduled on its behalf.
#[derive(Debug, Clone)]
pub enum LinkEvent<P> {
    /// The packet in service has finished serializing.
    TxDone(LinkId),
    /// A packet reaches the far end after propagation.
    Arrive(LinkId, P),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Delivery<P> {
    Intact(P),
    Corrupt(P),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LinkCounters {
    pub injected: u64,
    pub delivered: u64,
    pub corrupted: u64,
    pub queue_dropped: u64,
}

impl LinkCounters {
    pub fn in_flight(&self) -> u64 {
        self.injected - self.delivered - self.corrupted - self.queue_dropped
    }
}

#[derive(Debug)]
pub struct Link<P> {
    id: LinkId,
    cfg: LinkConfig,
    queue: DropTailQueue<P>,
    in_service: Option<P>,
    error_model: Option<ErrorModel>,
    counters: LinkCounters,
}

impl<P: WirePacket> Link<P> {
    pub fn new(id: LinkId, cfg: LinkConfig) -> Self {
        let queue = DropTailQueue::new(cfg.queue_capacity_pkts);
        Self {
            id,
            cfg,
            queue,
            in_service: None,
            error_model: None,
            counters: LinkCounters::default(),
        }
    }

    pub fn with_error_model(mut self, model: ErrorModel) -> Self {
        self.error_model = Some(model);
        self
    }

    pub fn id(&self) -> LinkId {
        self.id
    }

    pub fn config(&self) -> &LinkConfig {
        &self.cfg
    }

    /// Applies a new rate, e.g. after the shared-channel membership changes.
    /// The packet in service keeps its already-scheduled completion time.
    pub fn set_rate(&mut self, rate_bps: f64) {
        self.cfg.rate_bps = rate_bps;
    }

    pub fn counters(&self) -> LinkCounters {
        self.counters
    }

    pub fn queue_len(&self) -> usize {
        self.queue.len()
    }

    pub fn is_busy(&self) -> bool {
        self.in_service.is_some()
    }

    pub fn error_model_mut(&mut self) -> Option<&mut ErrorModel> {
        self.error_model.as_mut()
    }

    /// Hands a packet to the link. An idle transmitter starts serializing at
    /// the current tick; otherwise the packet waits in the drop-tail queue.
    pub fn link_transfer<E: From<LinkEvent<P>>>(
        &mut self,
        sched: &mut Scheduler<E>,
        pkt: P,
    ) -> Result<EnqueueOutcome, SimError> {
        Ok(match self.link_transfer_or_return(sched, pkt)? {
            None => EnqueueOutcome::Accepted,
            Some(_) => EnqueueOutcome::DroppedTail,
        })
    }

    /// Like [`link_transfer`](Self::link_transfer) but hands back a tail-dropped
    /// packet so the caller can attribute the loss.
    pub fn link_transfer_or_return<E: From<LinkEvent<P>>>(
        &mut self,
        sched: &mut Scheduler<E>,
        pkt: P,
    ) -> Result<Option<P>, SimError> {
        let size = pkt.wire_size();
        if size > self.cfg.mtu_bytes {
            return Err(SimError::OversizedPacket {
                size,
                mtu: self.cfg.mtu_bytes,
            });
        }
        self.counters.injected += 1;
        if self.in_service.is_none() {
            self.start_service(sched, pkt)?;
            return Ok(None);
        }
        match self.queue.try_enqueue(pkt) {
            Ok(()) => Ok(None),
            Err(p) => {
                self.counters.queue_dropped += 1;
                Ok(Some(p))
            }
        }
    }

    fn start_service<E: From<LinkEvent<P>>>(&mut self, sched: &mut Scheduler<E>, pkt: P) -> Result<(), SimError> {
        let tx = transmission_delay(pkt.wire_size(), self.cfg.rate_bps);
        self.in_service = Some(pkt);
        sched.schedule_in(tx, LinkEvent::TxDone(self.id).into())?;
        Ok(())
    }

    /// Moves the serialized packet onto the wire and starts the next one.
    pub fn on_tx_done<E: From<LinkEvent<P>>>(&mut self, sched: &mut Scheduler<E>) -> Result<(), SimError> {
        let pkt = self
            .in_service
            .take()
            .expect("TxDone on a link with nothing in service");
        sched.schedule_in(self.cfg.prop_delay, LinkEvent::Arrive(self.id, pkt).into())?;
        if let Some(next) = self.queue.dequeue() {
            self.start_service(sched, next)?;
        }
        Ok(())
    }

    /// Receive-side verdict. The attached error model is consulted exactly once;
    /// `extra_corrupt` lets the caller fold in an independent loss process.
    pub fn on_arrive(&mut self, pkt: P, extra_corrupt: bool) -> Delivery<P> {
        let size = pkt.wire_size();
        let model_corrupt = self
            .error_model
            .as_mut()
            .map(|m| m.is_corrupt(size))
            .unwrap_or(false);
        if model_corrupt || extra_corrupt {
            self.counters.corrupted += 1;
            Delivery::Corrupt(pkt)
        } else {
            self.counters.delivered += 1;
            Delivery::Intact(pkt)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error_model::{ErrorModel, RateErrorConfig, ErrorUnit};
    use crate::sim::{Engine, EventKind, RngStream, World};

    #[derive(Debug, Clone)]
    struct Pkt {
        id: u32,
        size: usize,
    }

    impl WirePacket for Pkt {
        fn wire_size(&self) -> usize {
            self.size
        }
    }

    #[derive(Debug)]
    enum Ev {
        Link(LinkEvent<Pkt>),
        Inject(Pkt),
    }

    impl From<LinkEvent<Pkt>> for Ev {
        fn from(e: LinkEvent<Pkt>) -> Self {
            Ev::Link(e)
        }
    }

    impl EventKind for Ev {
        fn handler_name(&self) -> &'static str {
            match self {
                Ev::Link(LinkEvent::TxDone(_)) => "tx_done",
                Ev::Link(LinkEvent::Arrive(..)) => "arrive",
                Ev::Inject(_) => "inject",
            }
        }
    }

    struct OneLink {
        link: Link<Pkt>,
        arrivals: Vec<(u32, SimTime, bool)>,
        max_queue: usize,
    }

    impl World<Ev> for OneLink {
        fn handle(&mut self, sched: &mut Scheduler<Ev>, ev: Ev) -> Result<(), SimError> {
            match ev {
                Ev::Inject(p) => {
                    self.link.link_transfer(sched, p)?;
                    self.max_queue = self.max_queue.max(self.link.queue_len());
                }
                Ev::Link(LinkEvent::TxDone(_)) => self.link.on_tx_done(sched)?,
                Ev::Link(LinkEvent::Arrive(_, p)) => match self.link.on_arrive(p, false) {
                    Delivery::Intact(p) => self.arrivals.push((p.id, sched.now(), false)),
                    Delivery::Corrupt(p) => self.arrivals.push((p.id, sched.now(), true)),
                },
            }
            Ok(())
        }
    }

    fn world(cfg: LinkConfig) -> OneLink {
        OneLink {
            link: Link::new(LinkId(0), cfg),
            arrivals: Vec::new(),
            max_queue: 0,
        }
    }

    #[test]
    fn transmission_delay_values() {
        assert_eq!(transmission_delay(0, 5e6), SimTime::ZERO);
        assert_eq!(transmission_delay(1400, 5e6), SimTime::from_micros(2240));
    }

    #[test]
    fn idle_hop_delivers_after_tx_plus_prop() {
        let mut eng = Engine::new();
        let mut w = world(LinkConfig::csma_default());
        eng.schedule(SimTime::ZERO, Ev::Inject(Pkt { id: 0, size: 1400 })).unwrap();
        eng.run_until(SimTime::from_secs(1), &mut w).unwrap();
        assert_eq!(w.arrivals, vec![(0, SimTime::from_micros(4240), false)]);
    }

    #[test]
    fn back_to_back_packets_pipeline() {
        let mut eng = Engine::new();
        let mut w = world(LinkConfig::csma_default());
        for id in 0..2 {
            eng.schedule(SimTime::ZERO, Ev::Inject(Pkt { id, size: 1400 })).unwrap();
        }
        eng.run_until(SimTime::from_secs(1), &mut w).unwrap();
        assert_eq!(w.arrivals[1].1 - w.arrivals[0].1, SimTime::from_micros(2240));
    }

    #[test]
    fn oversized_packet_is_rejected() {
        let mut eng: Engine<Ev> = Engine::new();
        let mut link = Link::new(LinkId(0), LinkConfig::csma_default());
        let err = link.link_transfer(eng.scheduler(), Pkt { id: 0, size: 1401 });
        assert_eq!(err, Err(SimError::OversizedPacket { size: 1401, mtu: 1400 }));
    }

    #[test]
    fn rate_one_packet_unit_corrupts_everything() {
        let model = ErrorModel::rate(
            RateErrorConfig {
                rate: 1.0,
                unit: ErrorUnit::Packet,
            },
            RngStream::new(1, "t"),
        );
        let mut eng = Engine::new();
        let mut w = world(LinkConfig::csma_default());
        w.link = w.link.with_error_model(model);
        eng.schedule(SimTime::ZERO, Ev::Inject(Pkt { id: 0, size: 100 })).unwrap();
        eng.run_until(SimTime::from_secs(1), &mut w).unwrap();
        assert!(w.arrivals[0].2);
        assert_eq!(w.link.counters().corrupted, 1);
    }

    #[test]
    fn overload_saturates_queue_and_drops_half() {
        // 1000-byte packets at 1 Mbps: 8 ms service, arrivals every 4 ms.
        let cfg = LinkConfig {
            rate_bps: 1e6,
            prop_delay: SimTime::from_millis(1),
            mtu_bytes: 1400,
            queue_capacity_pkts: 20,
        };
        let mut eng = Engine::new();
        let mut w = world(cfg);
        let n = 250;
        for i in 0..n {
            eng.schedule(SimTime::from_millis(4 * i as u64), Ev::Inject(Pkt { id: i, size: 1000 }))
                .unwrap();
        }
        // Let the queue fill, then measure the steady state over the second half.
        eng.run_until(SimTime::from_millis(498), &mut w).unwrap();
        let before = w.link.counters().queue_dropped;
        eng.run_until(SimTime::from_millis(998), &mut w).unwrap();
        assert_eq!(w.max_queue, 20);
        assert_eq!(w.link.queue_len(), 20);
        let dropped = w.link.counters().queue_dropped - before;
        // Fluid model: once full, drops ≈ (λ − μ)/λ = 0.5 of the 125 arrivals.
        let drop_frac = dropped as f64 / 125.0;
        assert!((drop_frac - 0.5).abs() < 0.02, "drop fraction {drop_frac}");
        // Packet conservation at any quiescent instant.
        eng.run_until(SimTime::from_secs(10), &mut w).unwrap();
        let c = w.link.counters();
        assert_eq!(c.injected, c.delivered + c.corrupted + c.queue_dropped);
        assert_eq!(c.in_flight(), 0);
    }

    #[test]
    fn work_conserving_after_idle_gap() {
        let mut eng = Engine::new();
        let mut w = world(LinkConfig::csma_default());
        eng.schedule(SimTime::ZERO, Ev::Inject(Pkt { id: 0, size: 1400 })).unwrap();
        eng.schedule(SimTime::from_millis(10), Ev::Inject(Pkt { id: 1, size: 1400 })).unwrap();
        eng.run_until(SimTime::from_secs(1), &mut w).unwrap();
        assert_eq!(w.arrivals[1].1, SimTime::from_micros(14_240));
    }
}
