//! Speed sweep: 20 vehicles at a common speed, with speed-induced drops,
//! delay and jitter against speed.
//!
//! cargo run --release --example speed_sweep [profile] [reps]

use std::path::PathBuf;

use vnsim::scenario::{mean_by_value, run_speed_sweep, ScenarioConfig};

fn main() -> vnsim::Result<()> {
    let mut args = std::env::args().skip(1);
    let path = args.next().map(PathBuf::from).unwrap_or_else(|| "profiles/paper.profile".into());
    let mut cfg = ScenarioConfig::load(&path)?;
    if let Some(k) = args.next() {
        cfg.experiments.speed.replications = k.parse().expect("reps is an integer");
    }
    let results = run_speed_sweep(&cfg, None)?;
    let drops = mean_by_value(&results, |r| r.speed_drops as f64);
    let delay = mean_by_value(&results, |r| r.mean_delay_ms);
    let jitter = mean_by_value(&results, |r| r.jitter_ms);
    println!("{:>5} {:>12} {:>10} {:>10}", "m/s", "speed_drops", "delay_ms", "jitter_ms");
    for ((s, d), j) in drops.iter().zip(&delay).zip(&jitter) {
        println!("{:>5} {:>12.1} {:>10.3} {:>10.3}", s.1, s.2, d.2, j.2);
    }
    if let Some(worst) = results.iter().max_by_key(|r| r.row.speed_drops) {
        println!("\nper-node drops at {} m/s, rep {}:", worst.row.value, worst.row.rep);
        for f in &worst.flows {
            print!(" {}", f.stats.speed_drops);
        }
        println!();
    }
    Ok(())
}
