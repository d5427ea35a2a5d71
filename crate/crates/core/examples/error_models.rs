//! Rate and burst error models against their closed forms.
//!
//! cargo run --release --example error_models

use vnsim::error_model::{
    burst_is_corrupt, rate_is_corrupt, BurstErrorConfig, BurstSizeDist, BurstState, ErrorUnit, RateErrorConfig,
};
use vnsim::sim::RngStream;

const PACKETS: usize = 200_000;

fn main() {
    println!("rate model, {PACKETS} packets per cell");
    println!("{:>8} {:>7} {:>6} {:>10} {:>10}", "rate", "unit", "bytes", "expected", "observed");
    for rate in [1e-5, 1e-4, 1e-3] {
        for unit in [ErrorUnit::Bit, ErrorUnit::Byte, ErrorUnit::Packet] {
            for size in [64, 1400] {
                let cfg = RateErrorConfig { rate, unit };
                let mut rng = RngStream::new(1, format!("{unit:?}/{size}"));
                let hits = (0..PACKETS).filter(|_| rate_is_corrupt(size, &cfg, &mut rng)).count();
                println!(
                    "{rate:>8.0e} {:>7} {size:>6} {:>10.5} {:>10.5}",
                    format!("{unit:?}"),
                    cfg.packet_error_probability(size),
                    hits as f64 / PACKETS as f64
                );
            }
        }
    }

    let dist = BurstSizeDist::Uniform { min: 1, max: 4 };
    println!("\nburst model, sizes uniform on 1..=4");
    println!("{:>8} {:>10} {:>10} {:>10}", "target", "b", "observed", "mean run");
    for target in [0.001, 0.01, 0.05] {
        let b = BurstErrorConfig::burst_rate_for_fraction(target, &dist);
        let cfg = BurstErrorConfig { burst_rate: b, size_dist: dist.clone() };
        let mut state = BurstState::default();
        let mut rng = RngStream::new(1, "burst");
        let (mut hits, mut runs, mut prev) = (0usize, 0usize, false);
        for _ in 0..PACKETS {
            let c = burst_is_corrupt(&cfg, &mut state, &mut rng);
            hits += c as usize;
            runs += (c && !prev) as usize;
            prev = c;
        }
        println!(
            "{target:>8} {b:>10.5} {:>10.5} {:>10.2}",
            hits as f64 / PACKETS as f64,
            hits as f64 / runs.max(1) as f64
        );
    }
}
