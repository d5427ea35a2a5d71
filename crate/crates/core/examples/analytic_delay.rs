//! One hop, one packet: the measured delay equals serialization plus
//! propagation. Then a back-to-back burst shows queueing on the same link.
//!
//! cargo run --example analytic_delay

use vnsim::sim::{Engine, EventKind, Scheduler, SimTime, World};
use vnsim::topology::{transmission_delay, Delivery, Link, LinkConfig, LinkEvent, LinkId, WirePacket};

struct Pkt {
    id: u32,
    sent: SimTime,
}

impl WirePacket for Pkt {
    fn wire_size(&self) -> usize {
        1400
    }
}

struct Ev(LinkEvent<Pkt>);

impl From<LinkEvent<Pkt>> for Ev {
    fn from(e: LinkEvent<Pkt>) -> Self {
        Ev(e)
    }
}

impl EventKind for Ev {
    fn handler_name(&self) -> &'static str {
        match self.0 {
            LinkEvent::TxDone(_) => "tx_done",
            LinkEvent::Arrive(..) => "arrive",
        }
    }
}

struct OneHop {
    link: Link<Pkt>,
    delays: Vec<(u32, SimTime)>,
}

impl World<Ev> for OneHop {
    fn handle(&mut self, sched: &mut Scheduler<Ev>, ev: Ev) -> Result<(), vnsim::error::SimError> {
        match ev.0 {
            LinkEvent::TxDone(_) => self.link.on_tx_done(sched)?,
            LinkEvent::Arrive(_, p) => {
                if let Delivery::Intact(p) = self.link.on_arrive(p, false) {
                    self.delays.push((p.id, sched.now() - p.sent));
                }
            }
        }
        Ok(())
    }
}

fn run(burst: u32) -> Vec<(u32, SimTime)> {
    let mut engine = Engine::new();
    let mut world = OneHop {
        link: Link::new(LinkId(0), LinkConfig::csma_default()),
        delays: Vec::new(),
    };
    for id in 0..burst {
        let pkt = Pkt { id, sent: SimTime::ZERO };
        world.link.link_transfer(engine.scheduler(), pkt).unwrap();
    }
    engine.run_to_quiescence(SimTime::from_secs(1), &mut world).unwrap();
    world.delays
}

fn main() {
    let cfg = LinkConfig::csma_default();
    let expected = transmission_delay(1400, cfg.rate_bps) + cfg.prop_delay;
    let single = run(1);
    println!("single 1400 B packet at 5 Mbit/s, 2 ms: {} (expected {expected})", single[0].1);

    println!("burst of 5: each waits one more serialization time");
    for (id, d) in run(5) {
        println!("  packet {id}: {:.3} ms", d.as_millis_f64());
    }
}
