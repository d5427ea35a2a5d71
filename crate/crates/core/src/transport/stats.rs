//! Per-flow QoS accounting.

use super::packetize::Segment;
use super::reassembly::LossCause;
use crate::error::SimError;
use crate::sim::SimTime;

/// RTP-style interarrival jitter with gain 1/16, kept in fractional nanoseconds.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct JitterEstimator {
    jitter_ns: f64,
    last_transit_ns: Option<i128>,
    sum_ns: f64,
    updates: u64,
}

impl JitterEstimator {
    pub fn update(&mut self, transit: SimTime) {
        let t = transit.as_nanos() as i128;
        if let Some(prev) = self.last_transit_ns {
            let d = (t - prev).abs() as f64;
            self.jitter_ns += (d - self.jitter_ns) / 16.0;
            self.sum_ns += self.jitter_ns;
            self.updates += 1;
        }
        self.last_transit_ns = Some(t);
    }

    pub fn jitter_ns(&self) -> f64 {
        self.jitter_ns
    }

    /// Mean of the estimate over every update; 0 before the second packet.
    pub fn mean_ns(&self) -> f64 {
        if self.updates == 0 {
            0.0
        } else {
            self.sum_ns / self.updates as f64
        }
    }

    pub fn jitter(&self) -> SimTime {
        SimTime::from_nanos(self.jitter_ns.round() as u64)
    }
}

#[derive(Debug, Clone, Default)]
pub struct FlowStats {
    pub flow_id: u32,
    pub sent_pkts: u64,
    pub recv_pkts: u64,
    pub corrupt_pkts: u64,
    /// Subset of `corrupt_pkts` caused by the mobility speed hook.
    pub speed_drops: u64,
    pub queue_drops: u64,
    /// Frames discarded by the playout deadline.
    pub deadline_drops: u64,
    pub delay_sum: SimTime,
    pub delay_max: SimTime,
    pub jitter: JitterEstimator,
    pub recv_bytes: u64,
    pub first_send: Option<SimTime>,
    pub last_recv: Option<SimTime>,
    /// `None` = delivered, indexed by frame.
    pub frame_outcomes: Vec<Option<LossCause>>,
}

impl FlowStats {
    pub fn new(flow_id: u32) -> Self {
        Self {
            flow_id,
            ..Self::default()
        }
    }

    pub fn record_send(&mut self, seg: &Segment) {
        self.sent_pkts += 1;
        self.first_send.get_or_insert(seg.send_time);
    }

    pub fn mean_delay(&self) -> Option<f64> {
        (self.recv_pkts > 0).then(|| self.delay_sum.as_nanos() as f64 / self.recv_pkts as f64)
    }

    pub fn mean_delay_ms(&self) -> f64 {
        self.mean_delay().unwrap_or(0.0) / 1e6
    }

    /// Lifetime mean of the smoothed estimator. The final estimate alone only
    /// reflects the last few packets of a short stream.
    pub fn jitter_ms(&self) -> f64 {
        self.jitter.mean_ns() / 1e6
    }

    /// Packets neither delivered nor dropped yet.
    pub fn in_flight(&self) -> u64 {
        self.sent_pkts - self.recv_pkts - self.corrupt_pkts - self.queue_drops
    }

    pub fn is_conserved(&self) -> bool {
        self.sent_pkts == self.recv_pkts + self.corrupt_pkts + self.queue_drops
    }

    pub fn frames_lost(&self) -> usize {
        self.frame_outcomes.iter().filter(|o| o.is_some()).count()
    }

    /// Throughput over the span from first injection to last delivery.
    pub fn throughput_bps(&self) -> f64 {
        match (self.first_send, self.last_recv) {
            (Some(a), Some(b)) if b > a => flow_throughput(self, b - a),
            _ => 0.0,
        }
    }
}

/// Accounts one intact delivery at the receiver.
pub fn record_delivery(seg: &Segment, recv_time: SimTime, stats: &mut FlowStats) -> Result<(), SimError> {
    let delay = recv_time.checked_sub(seg.send_time).ok_or(SimError::NegativeDelay {
        sent: seg.send_time,
        recv: recv_time,
    })?;
    stats.recv_pkts += 1;
    stats.recv_bytes += seg.payload.len() as u64;
    stats.delay_sum = stats.delay_sum + delay;
    stats.delay_max = stats.delay_max.max(delay);
    stats.jitter.update(delay);
    stats.last_recv = Some(stats.last_recv.map_or(recv_time, |t| t.max(recv_time)));
    Ok(())
}

/// Payload bits per second over `interval`.
pub fn flow_throughput(stats: &FlowStats, interval: SimTime) -> f64 {
    if interval == SimTime::ZERO {
        return 0.0;
    }
    stats.recv_bytes as f64 * 8.0 / interval.as_secs_f64()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codec::FrameType;

    fn seg(send_ms: f64, bytes: usize) -> Segment {
        Segment {
            flow_id: 0,
            seq: 0,
            frame_index: 0,
            frame_type: FrameType::I,
            frag_index: 0,
            frag_count: 1,
            payload: vec![0; bytes],
            header_bytes: 40,
            send_time: SimTime::from_millis_f64(send_ms).unwrap(),
        }
    }

    fn ms(v: f64) -> SimTime {
        SimTime::from_millis_f64(v).unwrap()
    }

    #[test]
    fn first_difference_of_16ms_gives_1ms() {
        let mut j = JitterEstimator::default();
        j.update(ms(10.0));
        j.update(ms(26.0));
        assert_eq!(j.jitter(), ms(1.0));
    }

    #[test]
    fn constant_delay_has_zero_jitter() {
        let mut s = FlowStats::new(0);
        for k in 0..100 {
            record_delivery(&seg(k as f64, 100), ms(k as f64 + 4.24), &mut s).unwrap();
        }
        assert_eq!(s.jitter_ns(), 0.0);
        assert!((s.mean_delay_ms() - 4.24).abs() < 1e-9);
    }

    impl FlowStats {
        fn jitter_ns(&self) -> f64 {
            self.jitter.jitter_ns()
        }
    }

    #[test]
    fn single_packet() {
        let mut s = FlowStats::new(0);
        record_delivery(&seg(1.0, 100), ms(6.0), &mut s).unwrap();
        assert_eq!(s.jitter_ns(), 0.0);
        assert_eq!(s.delay_max, ms(5.0));
    }

    #[test]
    fn negative_delay_is_rejected() {
        let mut s = FlowStats::new(0);
        assert!(matches!(
            record_delivery(&seg(5.0, 10), ms(4.0), &mut s),
            Err(SimError::NegativeDelay { .. })
        ));
        assert_eq!(s.recv_pkts, 0);
    }

    // Alternating transit a, a+x has |D| = x every step; J converges to x.
    fn converged(x_ms: f64) -> f64 {
        let mut j = JitterEstimator::default();
        for k in 0..2000 {
            j.update(ms(3.0 + if k % 2 == 0 { 0.0 } else { x_ms }));
        }
        j.jitter_ns()
    }

    #[test]
    fn mean_tracks_the_running_estimate() {
        let mut j = JitterEstimator::default();
        j.update(ms(10.0));
        assert_eq!(j.mean_ns(), 0.0);
        j.update(ms(26.0));
        j.update(ms(26.0));
        // J = 1 ms, then 1 - 1/16 ms.
        assert!((j.mean_ns() - (1e6 + 1e6 * 15.0 / 16.0) / 2.0).abs() < 1e-6);
    }

    #[test]
    fn jitter_is_scale_correct() {
        let a = converged(1.5);
        let b = converged(3.0);
        assert!((a - 1.5e6).abs() < 1.0);
        assert!((b - 2.0 * a).abs() < 1.0);
    }

    #[test]
    fn throughput_examples() {
        let mut s = FlowStats::new(0);
        assert_eq!(flow_throughput(&s, SimTime::from_secs(1)), 0.0);
        s.recv_bytes = 125_000;
        assert_eq!(flow_throughput(&s, SimTime::from_secs(1)), 1e6);
    }
}
