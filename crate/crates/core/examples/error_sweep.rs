//! Error-rate sweep: Y-PSNR and received bitrate against the error value for
//! the rate and burst models.
//!
//! cargo run --release --example error_sweep [profile] [reps]

use std::path::PathBuf;

use vnsim::scenario::{mean_by_value, run_error_sweep, ScenarioConfig};

fn main() -> vnsim::Result<()> {
    let mut args = std::env::args().skip(1);
    let path = args.next().map(PathBuf::from).unwrap_or_else(|| "profiles/paper.profile".into());
    let mut cfg = ScenarioConfig::load(&path)?;
    if let Some(k) = args.next() {
        cfg.experiments.error.replications = k.parse().expect("reps is an integer");
    }
    let results = run_error_sweep(&cfg, None)?;
    let codec = results[0].row.codec_psnr_db.unwrap_or(f64::NAN);
    println!("codec-only Y-PSNR {codec:.2} dB");
    let psnr = mean_by_value(&results, |r| r.mean_y_psnr_db.unwrap_or(f64::NAN));
    let rate = mean_by_value(&results, |r| r.bitrate_bps);
    let lost = mean_by_value(&results, |r| r.frames_lost as f64);
    println!("{:>6} {:>8} {:>10} {:>14} {:>12}", "model", "value", "psnr_db", "bitrate_kbps", "frames_lost");
    for ((p, b), l) in psnr.iter().zip(&rate).zip(&lost) {
        println!("{:>6} {:>8} {:>10.3} {:>14.1} {:>12.1}", p.0, p.1, p.2, b.2 / 1e3, l.2);
    }
    Ok(())
}
