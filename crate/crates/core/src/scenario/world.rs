//! One scenario instance: topology, flows and the event loop.

use std::collections::{BTreeMap, BTreeSet};

use super::assets::VideoAssets;
use super::config::{AccessScheduling, ErrorModelKind, Pacing, ScenarioConfig};
use crate::codec::bitrate_from_bytes;
use crate::error::{Result, SimError};
use crate::error_model::ErrorModel;
use crate::mobility::{
    rw_step, speed_excess_per, BoundingBox, MobilityModel, MobilityState, SpeedDegradationConfig,
};
use crate::sim::{Engine, EventKind, RngStream, Scheduler, SimTime, World};
use crate::topology::{
    ChannelKind, Delivery, Link, LinkConfig, LinkEvent, LinkId, NodeId, SharedChannel, Tier, WirePacket,
};
use crate::transport::{
    frame_deadline_check, record_delivery, FlowStats, LossCause, Packetizer, PlayoutConfig, PlayoutVerdict,
    Reassembler, Reassembly, Segment,
};

#[derive(Debug, Clone)]
pub struct Packet {
    pub seg: Segment,
    pub flow: usize,
    pub hop: usize,
}

impl WirePacket for Packet {
    fn wire_size(&self) -> usize {
        self.seg.wire_size()
    }
}

#[derive(Debug)]
pub enum Ev {
    Link(LinkEvent<Packet>),
    Inject { flow: usize, index: usize },
    Walk { flow: usize },
}

impl From<LinkEvent<Packet>> for Ev {
    fn from(e: LinkEvent<Packet>) -> Self {
        Ev::Link(e)
    }
}

impl EventKind for Ev {
    fn handler_name(&self) -> &'static str {
        match self {
            Ev::Link(LinkEvent::TxDone(_)) => "tx_done",
            Ev::Link(LinkEvent::Arrive(..)) => "arrive",
            Ev::Inject { .. } => "inject",
            Ev::Walk { .. } => "walk",
        }
    }
}

struct FlowState {
    node: NodeId,
    pending: Vec<Option<Segment>>,
    route: Vec<LinkId>,
    stats: FlowStats,
    reassembler: Reassembler,
    /// Deadline reference per frame: injection time of its last fragment.
    nominal: Vec<SimTime>,
    error_model: Option<ErrorModel>,
    speed_stream: RngStream,
    walk_stream: RngStream,
    mobility: MobilityState,
    received: BTreeMap<u32, Vec<u8>>,
}

struct NetWorld {
    links: Vec<Link<Packet>>,
    flows: Vec<FlowState>,
    playout: PlayoutConfig,
    speed_cfg: SpeedDegradationConfig,
    bbox: BoundingBox,
    walk_until: SimTime,
}

impl NetWorld {
    fn lose(&mut self, flow: usize, seg: &Segment, cause: LossCause) -> std::result::Result<(), SimError> {
        self.flows[flow]
            .reassembler
            .mark_fragment_lost(seg.frame_index, seg.frame_type, seg.frag_count, cause)
            .map_err(|e| SimError::InvalidConfig(e.to_string()))
    }

    fn forward(&mut self, sched: &mut Scheduler<Ev>, pkt: Packet) -> std::result::Result<(), SimError> {
        let link = self.flows[pkt.flow].route[pkt.hop];
        if let Some(dropped) = self.links[link.0].link_transfer_or_return(sched, pkt)? {
            self.flows[dropped.flow].stats.queue_drops += 1;
            self.lose(dropped.flow, &dropped.seg, LossCause::QueueDrop)?;
        }
        Ok(())
    }

    fn on_arrive(&mut self, sched: &mut Scheduler<Ev>, link: LinkId, pkt: Packet) -> std::result::Result<(), SimError> {
        let flow = pkt.flow;
        let (model_corrupt, speed_corrupt) = if pkt.hop == 0 {
            let f = &mut self.flows[flow];
            let size = pkt.wire_size();
            let model = f.error_model.as_mut().is_some_and(|m| m.is_corrupt(size));
            // Always one draw so paired runs stay aligned across speeds.
            let u = f.speed_stream.uniform();
            (model, u < speed_excess_per(f.mobility.speed(), &self.speed_cfg))
        } else {
            (false, false)
        };
        match self.links[link.0].on_arrive(pkt, model_corrupt || speed_corrupt) {
            Delivery::Corrupt(p) => {
                let stats = &mut self.flows[flow].stats;
                stats.corrupt_pkts += 1;
                if speed_corrupt && !model_corrupt {
                    stats.speed_drops += 1;
                }
                self.lose(flow, &p.seg, LossCause::Corrupt)
            }
            Delivery::Intact(mut p) => {
                if p.hop + 1 < self.flows[flow].route.len() {
                    p.hop += 1;
                    return self.forward(sched, p);
                }
                self.deliver(sched.now(), p)
            }
        }
    }

    fn deliver(&mut self, now: SimTime, p: Packet) -> std::result::Result<(), SimError> {
        let f = &mut self.flows[p.flow];
        record_delivery(&p.seg, now, &mut f.stats)?;
        let out = f
            .reassembler
            .on_segment(&p.seg, now)
            .map_err(|e| SimError::InvalidConfig(e.to_string()))?;
        if let Reassembly::Complete(frame) = out {
            let nominal = f.nominal[frame.frame_index as usize];
            match frame_deadline_check(frame.completed_at, nominal, &self.playout) {
                PlayoutVerdict::OnTime => {
                    f.received.insert(frame.frame_index, frame.payload);
                }
                PlayoutVerdict::LateDiscard => {
                    f.stats.deadline_drops += 1;
                    f.reassembler.mark_late(frame.frame_index);
                }
            }
        }
        Ok(())
    }
}

impl World<Ev> for NetWorld {
    fn handle(&mut self, sched: &mut Scheduler<Ev>, event: Ev) -> std::result::Result<(), SimError> {
        match event {
            Ev::Link(LinkEvent::TxDone(id)) => self.links[id.0].on_tx_done(sched),
            Ev::Link(LinkEvent::Arrive(id, pkt)) => self.on_arrive(sched, id, pkt),
            Ev::Inject { flow, index } => {
                let now = sched.now();
                let f = &mut self.flows[flow];
                let mut seg = f.pending[index].take().expect("segment injected twice");
                seg.send_time = now;
                f.stats.record_send(&seg);
                self.forward(sched, Packet { seg, flow, hop: 0 })
            }
            Ev::Walk { flow } => {
                let f = &mut self.flows[flow];
                rw_step(&mut f.mobility, &self.bbox, &mut f.walk_stream);
                let next = sched.now().checked_add(f.mobility.walk_epoch)?;
                if next <= self.walk_until {
                    sched.schedule(next, Ev::Walk { flow })?;
                }
                Ok(())
            }
        }
    }
}

/// Outcome of one flow after the network drained.
#[derive(Debug, Clone)]
pub struct FlowResult {
    pub node: NodeId,
    pub stats: FlowStats,
    /// Per-frame Y-PSNR of the concealed decode; `None` for pass-through video.
    pub frame_psnr: Option<Vec<f64>>,
    pub mean_psnr_db: Option<f64>,
    /// Bitrate of the frames that survived to playout.
    pub bitrate_bps: f64,
    /// Every delivered frame is byte-identical to the transmitted one.
    pub payload_identical: bool,
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub flows: Vec<FlowResult>,
    pub events: u64,
    pub end_time: SimTime,
}

impl RunResult {
    pub fn all_conserved(&self) -> bool {
        self.flows.iter().all(|f| f.stats.is_conserved())
    }
}

fn channel_kind(tier: Tier) -> ChannelKind {
    match tier {
        Tier::WifiClient => ChannelKind::Wifi,
        Tier::WimaxSs => ChannelKind::Wimax,
        _ => ChannelKind::Csma,
    }
}

/// Every link, and per source the links it traverses in order.
type Topology = (Vec<Link<Packet>>, Vec<Vec<LinkId>>);

fn build_topology(cfg: &ScenarioConfig) -> Result<Topology> {
    let t = &cfg.topology;
    let cap = t.queue_capacity_pkts;
    let n = cfg.nodes.count;
    let tier = cfg.nodes.tier;
    let mut links: Vec<Link<Packet>> = Vec::new();
    let mut add = |c: LinkConfig| {
        let id = LinkId(links.len());
        links.push(Link::new(id, c));
        id
    };
    let routes = match tier {
        Tier::ReliefCenterLan => {
            let lan = t.lan.to_link_config(cap)?;
            (0..n).map(|_| vec![add(lan.clone())]).collect()
        }
        Tier::WifiClient | Tier::WimaxSs => {
            let (cell, core) = if tier == Tier::WifiClient {
                (&t.wifi, &t.ap_uplink)
            } else {
                (&t.wimax, &t.backhaul)
            };
            let mut channel = SharedChannel::new(channel_kind(tier), cell.rate_bps, t.contention)?;
            for i in 0..n {
                channel.join(NodeId::new(i, tier));
            }
            let per_member = channel.effective_rate(NodeId::new(0, tier))?;
            let core_id = add(core.to_link_config(cap)?);
            let mut access = cell.to_link_config(cap)?;
            match t.access {
                AccessScheduling::Shared => {
                    access.rate_bps = per_member * n as f64;
                    // Every member brings its own buffer to the pooled queue.
                    access.queue_capacity_pkts = cap * n;
                    let up = add(access);
                    (0..n).map(|_| vec![up, core_id]).collect()
                }
                AccessScheduling::Dedicated => {
                    access.rate_bps = per_member;
                    (0..n).map(|_| vec![add(access.clone()), core_id]).collect()
                }
            }
        }
        other => return Err(SimError::InvalidConfig(format!("tier {other:?} cannot source video")).into()),
    };
    Ok((links, routes))
}

/// Runs one scenario to quiescence and scores every flow.
pub fn run_scenario(cfg: &ScenarioConfig, assets: &VideoAssets) -> Result<RunResult> {
    cfg.validate()?;
    let seed = cfg.seed;
    let (links, routes) = build_topology(cfg)?;
    let bs = &assets.bitstream;
    let frame_count = bs.frame_count();
    let frame_interval = 1.0 / cfg.video.frame_rate;
    let bbox = cfg.mobility.bounding_box();
    let mtu = links[routes[0][0].0].config().mtu_bytes;

    let mut engine: Engine<Ev> = Engine::new();
    let mut flows = Vec::with_capacity(routes.len());
    let mut last_inject = SimTime::ZERO;
    for (i, route) in routes.into_iter().enumerate() {
        let node = NodeId::new(i, cfg.nodes.tier);
        let mut start_stream = RngStream::new(seed, format!("start/flow{i}"));
        let offset = start_stream.uniform() * cfg.transport.start_spread_ms * 1e-3;
        let mut pos_stream = RngStream::new(seed, format!("position/node{i}"));
        let position = bbox.random_position(&mut pos_stream);
        let m = &cfg.mobility;
        let mobility = match m.model {
            MobilityModel::Static => MobilityState::stationary(position),
            MobilityModel::ConstantVelocity => {
                let h = m.heading_deg.to_radians();
                MobilityState::constant_velocity(position, (m.speed * h.cos(), m.speed * h.sin()))
            }
            MobilityModel::RandomWalk => {
                let mut s = MobilityState::random_walk(position);
                s.walk_epoch = SimTime::from_secs_f64(m.walk_epoch_s)?;
                s.speed_range = (m.walk_speed_min, m.walk_speed_max);
                s
            }
        };
        let error_stream = RngStream::new(seed, format!("error/flow{i}"));
        let error_model = match cfg.error.model {
            ErrorModelKind::None => None,
            ErrorModelKind::Rate => Some(ErrorModel::rate(cfg.error.rate_config(), error_stream)),
            ErrorModelKind::Burst => Some(ErrorModel::burst(cfg.error.burst_config(), error_stream)),
        };

        let mut packetizer = Packetizer::new(i as u32, mtu, cfg.transport.header_bytes)?;
        let mut pending = Vec::new();
        let mut nominal = Vec::with_capacity(frame_count);
        for (k, frame) in bs.frames.iter().enumerate() {
            let segs = packetizer.packetize(frame)?;
            let m_count = segs.len();
            let base = match cfg.transport.pacing {
                Pacing::BackToBack => offset,
                _ => offset + k as f64 * frame_interval,
            };
            let mut last = SimTime::ZERO;
            for (j, seg) in segs.into_iter().enumerate() {
                let at_s = match cfg.transport.pacing {
                    Pacing::Spread => base + frame_interval * j as f64 / m_count as f64,
                    _ => base,
                };
                let at = SimTime::from_secs_f64(at_s)?;
                engine.schedule(at, Ev::Inject { flow: i, index: pending.len() })?;
                pending.push(Some(seg));
                last = at;
            }
            nominal.push(last);
            last_inject = last_inject.max(last);
        }
        if m.model == MobilityModel::RandomWalk {
            engine.schedule(SimTime::ZERO, Ev::Walk { flow: i })?;
        }
        flows.push(FlowState {
            node,
            pending,
            route,
            stats: FlowStats::new(i as u32),
            reassembler: Reassembler::new(),
            nominal,
            error_model,
            speed_stream: RngStream::new(seed, format!("speed/node{i}")),
            walk_stream: RngStream::new(seed, format!("walk/node{i}")),
            mobility,
            received: BTreeMap::new(),
        });
    }

    let mut world = NetWorld {
        links,
        flows,
        playout: cfg.transport.playout()?,
        speed_cfg: cfg.mobility.speed_degradation(),
        bbox,
        walk_until: last_inject,
    };
    let limit = SimTime::from_secs_f64(cfg.duration_s)?;
    let events = engine.run_to_quiescence(limit, &mut world)?;
    if engine.scheduler().pending_len() > 0 {
        return Err(SimError::InvalidConfig(format!(
            "network did not drain within duration_s = {}",
            cfg.duration_s
        ))
        .into());
    }

    let mut results = Vec::with_capacity(world.flows.len());
    for f in world.flows {
        let mut stats = f.stats;
        stats.frame_outcomes = f.reassembler.outcomes(frame_count as u32);
        debug_assert!(stats.is_conserved());
        let lost: BTreeSet<u32> = stats
            .frame_outcomes
            .iter()
            .enumerate()
            .filter_map(|(k, o)| o.map(|_| k as u32))
            .collect();
        let frame_psnr = assets.frame_psnr(&lost)?.map(|p| p.to_vec());
        let mean_psnr_db = frame_psnr.as_ref().map(|p| p.iter().sum::<f64>() / p.len() as f64);
        let delivered_bytes: usize = f.received.values().map(Vec::len).sum();
        let payload_identical = f
            .received
            .iter()
            .all(|(&k, p)| bs.frames[k as usize].payload == *p);
        results.push(FlowResult {
            node: f.node,
            stats,
            frame_psnr,
            mean_psnr_db,
            bitrate_bps: bitrate_from_bytes(delivered_bytes, frame_count, cfg.video.frame_rate),
            payload_identical,
        });
    }
    Ok(RunResult {
        flows: results,
        events,
        end_time: engine.now(),
    })
}
