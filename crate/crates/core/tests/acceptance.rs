//! Acceptance criteria, one PASS/FAIL line each. Run with
//! `cargo test --test acceptance`.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use vnsim::codec::{decode, decode_with_concealment, encode_sequence, psnr_y_sequence, GopConfig, SyntheticSequence};
use vnsim::error_model::{burst_is_corrupt, BurstErrorConfig, BurstSizeDist, BurstState, ErrorUnit, RateErrorConfig};
use vnsim::error_model::rate_is_corrupt;
use vnsim::scenario::{
    emit_report, mean_by_value, run_scenario, run_sweep, ExperimentKind, PointResult, ScenarioConfig, VideoAssets,
    QOS_DELAY_MS, QOS_JITTER_MS,
};
use vnsim::sim::{RngStream, SimTime};
use vnsim::topology::Tier;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, budget_s: u64, what: &str) -> Result<(), String> {
    ensure(elapsed <= Duration::from_secs(budget_s), || {
        format!("{what} took {:.1} s, budget {budget_s} s", elapsed.as_secs_f64())
    })
}

fn c1_analytic_delay() -> Outcome {
    let t0 = Instant::now();
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut cfg = ScenarioConfig::default();
    cfg.nodes.count = 1;
    cfg.nodes.tier = Tier::ReliefCenterLan;
    // 1360 B payload + 40 B header = one 1400 B packet.
    common::use_passthrough(&mut cfg, dir.path(), &[1360]);
    cfg.video.frames = 1;
    let assets = VideoAssets::prepare(&cfg.video).map_err(|e| e.to_string())?;
    let run = run_scenario(&cfg, &assets).map_err(|e| e.to_string())?;
    let s = &run.flows[0].stats;
    let expected = SimTime::from_micros(4240);
    ensure(s.recv_pkts == 1 && s.sent_pkts == 1, || format!("sent {} received {}", s.sent_pkts, s.recv_pkts))?;
    let got = s.delay_max;
    let err = got.as_nanos().abs_diff(expected.as_nanos());
    ensure(err <= 1, || format!("delay {got} vs {expected}"))?;
    within(t0.elapsed(), 1, "analytic oracle")?;
    Ok(format!("{:.6} ms, |error| = {err} ns", got.as_millis_f64()))
}

fn c2_error_statistics() -> Outcome {
    let t0 = Instant::now();
    const N: u64 = 1_000_000;
    let mut worst = 0.0f64;
    for (ri, rate) in [1e-6, 1e-5, 1e-4, 1e-3].into_iter().enumerate() {
        for unit in [ErrorUnit::Bit, ErrorUnit::Byte, ErrorUnit::Packet] {
            for size in [64usize, 512, 1400] {
                let cfg = RateErrorConfig { rate, unit };
                let k = match unit {
                    ErrorUnit::Bit => size as f64 * 8.0,
                    ErrorUnit::Byte => size as f64,
                    ErrorUnit::Packet => 1.0,
                };
                // Independent closed form, evaluated with powf.
                let p = 1.0 - (1.0 - rate).powf(k);
                let mut stream = RngStream::new(1000 + ri as u64, format!("grid/{unit:?}/{size}"));
                let hits = (0..N).filter(|_| rate_is_corrupt(size, &cfg, &mut stream)).count() as f64;
                let sigma = (N as f64 * p * (1.0 - p)).sqrt();
                let z = if sigma == 0.0 { 0.0 } else { (hits - N as f64 * p).abs() / sigma };
                worst = worst.max(z);
                ensure(z <= 3.0, || format!("rate {rate} {unit:?} {size} B: {hits} hits, expected {:.1}", N as f64 * p))?;
            }
        }
    }

    // Run lengths of corrupted packets: each run chains K >= 1 bursts, K
    // geometric with continuation probability b, sizes uniform on 1..=4.
    let b = 0.05;
    let dist = BurstSizeDist::Uniform { min: 1, max: 4 };
    let cfg = BurstErrorConfig { burst_rate: b, size_dist: dist };
    let mut state = BurstState::default();
    let mut stream = RngStream::new(7, "burst-runs");
    let mut runs: BTreeMap<usize, u64> = BTreeMap::new();
    let mut current = 0usize;
    for _ in 0..N {
        if burst_is_corrupt(&cfg, &mut state, &mut stream) {
            current += 1;
        } else if current > 0 {
            *runs.entry(current).or_default() += 1;
            current = 0;
        }
    }
    const BINS: usize = 9;
    let max_len = 64;
    let mut pmf = vec![0.0f64; max_len + 1];
    // conv[k][l] = P(sum of k sizes = l), accumulated over k.
    let mut conv = vec![0.0f64; max_len + 1];
    conv[0] = 1.0;
    let mut weight = 1.0 - b;
    for _ in 1..=16 {
        let mut next = vec![0.0; max_len + 1];
        for (l, &c) in conv.iter().enumerate() {
            for s in 1..=4 {
                if l + s <= max_len {
                    next[l + s] += c * 0.25;
                }
            }
        }
        conv = next;
        for l in 0..=max_len {
            pmf[l] += weight * conv[l];
        }
        weight *= b;
    }
    let total: u64 = runs.values().sum();
    let observed: Vec<f64> = (1..=BINS)
        .map(|l| {
            if l < BINS {
                *runs.get(&l).unwrap_or(&0) as f64
            } else {
                runs.range(BINS..).map(|(_, c)| *c as f64).sum()
            }
        })
        .collect();
    let expected: Vec<f64> = (1..=BINS)
        .map(|l| {
            let p = if l < BINS { pmf[l] } else { pmf[BINS..].iter().sum() };
            p * total as f64
        })
        .collect();
    let chi2: f64 = observed.iter().zip(&expected).map(|(o, e)| (o - e).powi(2) / e).sum();
    // Upper 1% point of chi-squared with 8 degrees of freedom.
    const CRIT_DF8: f64 = 20.090;
    ensure(chi2 < CRIT_DF8, || format!("run-length chi2 {chi2:.2} >= {CRIT_DF8}"))?;
    within(t0.elapsed(), 30, "error statistics")?;
    Ok(format!("36 grid points, max |z| = {worst:.2}; burst runs chi2 = {chi2:.2} (df 8, crit {CRIT_DF8})"))
}

fn c3_lossless_round_trip() -> Outcome {
    let t0 = Instant::now();
    let mut checked = 0;
    for (w, h) in [(832, 480), (1920, 720), (1280, 720), (2650, 1600)] {
        for qp in [22u8, 27, 32, 37] {
            let mut cfg = ScenarioConfig::default();
            cfg.nodes.count = 1;
            cfg.nodes.tier = Tier::ReliefCenterLan;
            cfg.topology.lan.rate_bps = 1e9;
            cfg.topology.queue_capacity_pkts = 100_000;
            cfg.video.width = w;
            cfg.video.height = h;
            cfg.video.qp = qp;
            let assets = VideoAssets::prepare(&cfg.video).map_err(|e| e.to_string())?;
            let run = run_scenario(&cfg, &assets).map_err(|e| e.to_string())?;
            let f = &run.flows[0];
            ensure(f.stats.frames_lost() == 0 && f.payload_identical, || {
                format!("{w}x{h} qp{qp}: {} frames lost, identical = {}", f.stats.frames_lost(), f.payload_identical)
            })?;
            let raw = assets.raw.as_ref().expect("synthetic source");
            let codec_only = psnr_y_sequence(raw, &decode(&assets.bitstream).map_err(|e| e.to_string())?)
                .map_err(|e| e.to_string())?;
            ensure(f.frame_psnr.as_deref() == Some(&codec_only[..]), || {
                format!("{w}x{h} qp{qp}: received PSNR differs from codec-only")
            })?;
            checked += 1;
        }
    }
    within(t0.elapsed(), 60, "lossless round trip")?;
    Ok(format!("{checked} resolution/QP pairs bit-identical, PSNR equal"))
}

fn c4_error_threshold(results: &[PointResult]) -> Outcome {
    let clean = results[0].row.codec_psnr_db.ok_or("no codec PSNR")?;
    let psnr = mean_by_value(results, |r| r.mean_y_psnr_db.unwrap_or(f64::NAN));
    let rate: Vec<(f64, f64)> = psnr.iter().filter(|e| e.0 == "rate").map(|e| (e.1, e.2)).collect();
    let at = |v: f64| rate.iter().find(|e| e.0 == v).map(|e| e.1).ok_or(format!("value {v} missing"));
    let (p3, p2) = (at(0.001)?, at(0.01)?);
    ensure(clean - p3 <= 1.0, || format!("0.001: {p3:.3} dB vs lossless {clean:.3} dB"))?;
    ensure(clean - p2 > 3.0, || format!("0.01: {p2:.3} dB vs lossless {clean:.3} dB"))?;
    ensure(rate.windows(2).all(|w| w[1].1 <= w[0].1), || format!("PSNR not nonincreasing: {rate:?}"))?;
    Ok(format!(
        "lossless {clean:.2} dB, 0.001 -> -{:.2} dB, 0.01 -> -{:.2} dB, nonincreasing over {} values",
        clean - p3,
        clean - p2,
        rate.len()
    ))
}

fn c5_i_vs_b() -> Outcome {
    let cfg = common::paper_profile();
    let v = &cfg.video;
    let gop: GopConfig = v.gop();
    let raw = SyntheticSequence::new(v.width, v.height)
        .with_motion(v.motion)
        .with_texture(v.texture)
        .frames(10);
    let bs = encode_sequence(&raw, &gop).map_err(|e| e.to_string())?;
    let mean = |lost: &BTreeSet<u32>| -> Result<f64, String> {
        let shown = decode_with_concealment(&bs, lost).map_err(|e| e.to_string())?;
        let p = psnr_y_sequence(&raw, &shown).map_err(|e| e.to_string())?;
        Ok(p.iter().sum::<f64>() / p.len() as f64)
    };
    let clean = mean(&BTreeSet::new())?;
    let (mut min_i, mut max_b) = (f64::INFINITY, f64::NEG_INFINITY);
    for k in 0..10u32 {
        let drop = clean - mean(&BTreeSet::from([k]))?;
        match gop.frame_type(k) {
            vnsim::codec::FrameType::I => min_i = min_i.min(drop),
            vnsim::codec::FrameType::B => max_b = max_b.max(drop),
        }
    }
    ensure(min_i > max_b, || format!("smallest I drop {min_i:.3} dB <= largest B drop {max_b:.3} dB"))?;
    Ok(format!("smallest I-loss drop {min_i:.3} dB > largest B-loss drop {max_b:.3} dB"))
}

fn c6_node_threshold(results: &[PointResult]) -> Outcome {
    let delay = mean_by_value(results, |r| r.mean_delay_ms);
    let jitter = mean_by_value(results, |r| r.jitter_ms);
    let thr = mean_by_value(results, |r| r.throughput_bps);
    let n: Vec<f64> = delay.iter().map(|e| e.1).collect();
    ensure(n == (1..=30).map(f64::from).collect::<Vec<_>>(), || format!("sweep values {n:?}"))?;
    let d: Vec<f64> = delay.iter().map(|e| e.2).collect();
    let j: Vec<f64> = jitter.iter().map(|e| e.2).collect();
    let t: Vec<f64> = thr.iter().map(|e| e.2).collect();
    ensure(d.windows(2).all(|w| w[1] >= w[0]), || format!("delay not nondecreasing: {d:.3?}"))?;
    ensure(j.windows(2).all(|w| w[1] >= w[0]), || format!("jitter not nondecreasing: {j:.3?}"))?;
    let knee = (0..n.len())
        .find(|&i| !(d[i] < QOS_DELAY_MS && j[i] < QOS_JITTER_MS))
        .ok_or("no violation up to 30 nodes")?;
    ensure((12.0..=18.0).contains(&n[knee]), || format!("first violation at n = {}", n[knee]))?;
    ensure(t[knee..].windows(2).all(|w| w[1] < w[0]), || {
        format!("throughput not strictly decreasing from n = {}: {:.0?}", n[knee], &t[knee..])
    })?;
    Ok(format!(
        "first violation at n = {} (delay {:.2} ms, jitter {:.2} ms); throughput {:.0} -> {:.0} kbit/s from the knee",
        n[knee],
        d[knee],
        j[knee],
        t[knee] / 1e3,
        t[t.len() - 1] / 1e3
    ))
}

fn c7_speed_threshold(results: &[PointResult]) -> Outcome {
    let mut slow = 0u64;
    let mut fast = None;
    for r in results {
        ensure(r.row.nodes == 20, || format!("{} nodes", r.row.nodes))?;
        if r.row.value <= 80.0 {
            slow += r.row.speed_drops;
        }
        if r.row.value == 100.0 {
            *fast.get_or_insert(0u64) += r.row.speed_drops;
        }
    }
    let values: BTreeSet<u64> = results.iter().map(|r| r.row.value as u64).collect();
    ensure(values == (2..=10).map(|v| v * 10).collect(), || format!("speeds {values:?}"))?;
    let fast = fast.ok_or("100 m/s missing")?;
    ensure(slow == 0, || format!("{slow} speed-induced drops at <= 80 m/s"))?;
    ensure(fast > 0, || "no drops at 100 m/s".to_string())?;
    Ok(format!("0 drops through 80 m/s, {fast} drops at 100 m/s over all replications"))
}

fn read_dir_bytes(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).unwrap())
        })
        .collect()
}

fn c8_determinism(cfg: &ScenarioConfig, first: &[(ExperimentKind, Vec<PointResult>)], suite: Duration) -> Outcome {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut files = 0;
    for (kind, results) in first {
        let a = tmp.path().join(format!("{}-a", kind.label()));
        let b = tmp.path().join(format!("{}-b", kind.label()));
        emit_report(results, &a).map_err(|e| e.to_string())?;
        let again = run_sweep(cfg, *kind, None).map_err(|e| e.to_string())?;
        emit_report(&again, &b).map_err(|e| e.to_string())?;
        let (x, y) = (read_dir_bytes(&a), read_dir_bytes(&b));
        ensure(x == y, || format!("{} outputs differ between runs", kind.label()))?;
        files += x.len();
    }
    within(suite, 600, "three-experiment suite")?;
    Ok(format!(
        "{files} output files byte-identical across reruns; suite took {:.1} s",
        suite.as_secs_f64()
    ))
}

fn c9_conservation(first: &[(ExperimentKind, Vec<PointResult>)]) -> Outcome {
    let mut flows = 0;
    for (_, results) in first {
        for r in results {
            for f in &r.flows {
                let s = &f.stats;
                ensure(s.sent_pkts == s.recv_pkts + s.corrupt_pkts + s.queue_drops, || {
                    format!("{} {} rep {} flow {}: identity broken", r.row.experiment, r.row.value, r.row.rep, s.flow_id)
                })?;
                flows += 1;
            }
        }
    }
    Ok(format!("{flows} flows satisfy sent == received + corrupt + queue_drops"))
}

fn run(name: &str, f: impl FnOnce() -> Outcome) -> bool {
    let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
        Err(p
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_else(|| "panicked".into()))
    });
    match outcome {
        Ok(detail) => {
            println!("PASS {name}: {detail}");
            true
        }
        Err(why) => {
            println!("FAIL {name}: {why}");
            false
        }
    }
}

fn main() -> ExitCode {
    let mut ok = true;
    ok &= run("1 analytic delay oracle", c1_analytic_delay);
    ok &= run("2 error-model statistics", c2_error_statistics);
    ok &= run("3 lossless round trip", c3_lossless_round_trip);

    let cfg = common::paper_profile();
    let t0 = Instant::now();
    let mut suite = Vec::new();
    for kind in [ExperimentKind::Error, ExperimentKind::Nodes, ExperimentKind::Speed] {
        match run_sweep(&cfg, kind, None) {
            Ok(r) => suite.push((kind, r)),
            Err(e) => println!("FAIL {} sweep did not run: {e}", kind.label()),
        }
    }
    let suite_time = t0.elapsed();
    let get = |k: ExperimentKind| suite.iter().find(|(x, _)| *x == k).map(|(_, r)| r.as_slice());
    let missing = || Err::<String, String>("sweep missing".into());

    ok &= run("4 error threshold", || get(ExperimentKind::Error).map_or_else(missing, c4_error_threshold));
    ok &= run("5 I-frame loss dominance", c5_i_vs_b);
    ok &= run("6 node threshold", || get(ExperimentKind::Nodes).map_or_else(missing, c6_node_threshold));
    ok &= run("7 speed threshold", || get(ExperimentKind::Speed).map_or_else(missing, c7_speed_threshold));
    ok &= run("8 determinism", || c8_determinism(&cfg, &suite, suite_time));
    ok &= run("9 conservation", || c9_conservation(&suite));
    ok &= suite.len() == 3;
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
