//! Node-count sweep on the shared WiMAX cell: delay, jitter and throughput
//! against the number of subscriber stations, and the first count that
//! breaks the streaming QoS rule.
//!
//! cargo run --release --example node_sweep [profile] [reps]

use std::path::PathBuf;

use vnsim::scenario::{mean_by_value, run_node_sweep, ScenarioConfig, QOS_DELAY_MS, QOS_JITTER_MS};

fn main() -> vnsim::Result<()> {
    let mut args = std::env::args().skip(1);
    let path = args.next().map(PathBuf::from).unwrap_or_else(|| "profiles/paper.profile".into());
    let mut cfg = ScenarioConfig::load(&path)?;
    if let Some(k) = args.next() {
        cfg.experiments.nodes.replications = k.parse().expect("reps is an integer");
    }
    let results = run_node_sweep(&cfg, None)?;
    let delay = mean_by_value(&results, |r| r.mean_delay_ms);
    let jitter = mean_by_value(&results, |r| r.jitter_ms);
    let thr = mean_by_value(&results, |r| r.throughput_bps);
    println!("{:>5} {:>10} {:>10} {:>16}", "nodes", "delay_ms", "jitter_ms", "throughput_kbps");
    let mut knee = None;
    for ((d, j), t) in delay.iter().zip(&jitter).zip(&thr) {
        println!("{:>5} {:>10.3} {:>10.3} {:>16.1}", d.1, d.2, j.2, t.2 / 1e3);
        if knee.is_none() && !(d.2 < QOS_DELAY_MS && j.2 < QOS_JITTER_MS) {
            knee = Some(d.1);
        }
    }
    match knee {
        Some(n) => println!("first count violating delay < {QOS_DELAY_MS} ms and jitter < {QOS_JITTER_MS} ms: {n}"),
        None => println!("QoS holds at every count"),
    }
    Ok(())
}
