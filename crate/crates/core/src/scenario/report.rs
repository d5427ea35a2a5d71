//! CSV and plain-text report emission.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::config::{ErrorModelKind, ExperimentKind};
use super::sweep::{mean_by_value, PointResult, QOS_DELAY_MS, QOS_JITTER_MS};
use crate::error::{Error, Result};

pub const FLOW_COLUMNS: [&str; 13] = [
    "flow_id",
    "sent",
    "received",
    "corrupt",
    "queue_drops",
    "deadline_drops",
    "mean_delay_ms",
    "max_delay_ms",
    "jitter_ms",
    "throughput_bps",
    "frames_lost",
    "mean_y_psnr_db",
    "bitrate_bps",
];

pub const FRAMEMAP_COLUMNS: [&str; 5] = ["flow_id", "frame_index", "frame_type", "outcome", "y_psnr_db"];

#[derive(Debug, Serialize)]
struct FlowRow {
    flow_id: u32,
    sent: u64,
    received: u64,
    corrupt: u64,
    queue_drops: u64,
    deadline_drops: u64,
    mean_delay_ms: f64,
    max_delay_ms: f64,
    jitter_ms: f64,
    throughput_bps: f64,
    frames_lost: usize,
    mean_y_psnr_db: Option<f64>,
    bitrate_bps: f64,
}

#[derive(Debug, Serialize)]
struct FrameRow {
    flow_id: u32,
    frame_index: usize,
    frame_type: &'static str,
    outcome: &'static str,
    y_psnr_db: Option<f64>,
}

/// A plot the outputs support: which file holds it and which columns to draw.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PlotSpec {
    pub experiment: ExperimentKind,
    pub plot: &'static str,
    /// File name, `*` standing for a sweep token or replication.
    pub file: &'static str,
    pub x: &'static str,
    pub y: &'static str,
}

const fn plot(experiment: ExperimentKind, plot: &'static str, file: &'static str, x: &'static str, y: &'static str) -> PlotSpec {
    PlotSpec { experiment, plot, file, x, y }
}

pub const PLOTS: [PlotSpec; 10] = [
    plot(ExperimentKind::Error, "frame_loss_map", "framemap_*_*.csv", "frame_index", "outcome"),
    plot(ExperimentKind::Error, "psnr_vs_error", "summary.csv", "value", "mean_y_psnr_db"),
    plot(ExperimentKind::Error, "bitrate_vs_error", "summary.csv", "value", "bitrate_bps"),
    plot(ExperimentKind::Nodes, "throughput_vs_nodes", "summary.csv", "value", "throughput_bps"),
    plot(ExperimentKind::Nodes, "delay_vs_nodes", "summary.csv", "value", "mean_delay_ms"),
    plot(ExperimentKind::Nodes, "jitter_vs_nodes", "summary.csv", "value", "jitter_ms"),
    plot(ExperimentKind::Speed, "delay_vs_speed", "summary.csv", "value", "mean_delay_ms"),
    plot(ExperimentKind::Speed, "jitter_vs_speed", "summary.csv", "value", "jitter_ms"),
    plot(ExperimentKind::Speed, "drops_per_node", "flows_*_*.csv", "flow_id", "corrupt"),
    plot(ExperimentKind::Speed, "drops_vs_speed", "summary.csv", "value", "speed_drops"),
];

/// Paths written by [`emit_report`].
#[derive(Debug, Clone, Default)]
pub struct ReportFiles {
    pub summary_csv: PathBuf,
    pub summary_txt: PathBuf,
    pub plots_csv: PathBuf,
    pub flow_csvs: Vec<PathBuf>,
    pub framemap_csvs: Vec<PathBuf>,
}

fn write_csv<T: Serialize>(path: &Path, header: &[&str], rows: impl IntoIterator<Item = T>) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_path(path)?;
    w.write_record(header)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes the summary, per-flow and per-frame CSVs, the plot index and a
/// plain-text verdict into `out_dir`.
pub fn emit_report(results: &[PointResult], out_dir: &Path) -> Result<ReportFiles> {
    let first = results
        .first()
        .ok_or_else(|| Error::Other("no results to report".into()))?;
    let kind = first.point.kind;
    fs::create_dir_all(out_dir)?;
    let mut files = ReportFiles {
        summary_csv: out_dir.join("summary.csv"),
        summary_txt: out_dir.join("summary.txt"),
        plots_csv: out_dir.join("plots.csv"),
        ..Default::default()
    };
    write_csv(
        &files.summary_csv,
        &super::sweep::SUMMARY_COLUMNS,
        results.iter().map(|r| &r.row),
    )?;
    for r in results {
        let name = format!("{}_{}.csv", r.point.token(), r.point.rep);
        let flow_path = out_dir.join(format!("flows_{name}"));
        write_csv(
            &flow_path,
            &FLOW_COLUMNS,
            r.flows.iter().map(|f| FlowRow {
                flow_id: f.stats.flow_id,
                sent: f.stats.sent_pkts,
                received: f.stats.recv_pkts,
                corrupt: f.stats.corrupt_pkts,
                queue_drops: f.stats.queue_drops,
                deadline_drops: f.stats.deadline_drops,
                mean_delay_ms: f.stats.mean_delay_ms(),
                max_delay_ms: f.stats.delay_max.as_millis_f64(),
                jitter_ms: f.stats.jitter_ms(),
                throughput_bps: f.stats.throughput_bps(),
                frames_lost: f.stats.frames_lost(),
                mean_y_psnr_db: f.mean_psnr_db,
                bitrate_bps: f.bitrate_bps,
            }),
        )?;
        files.flow_csvs.push(flow_path);

        let gop = r.point.cfg.video.gop();
        let map_path = out_dir.join(format!("framemap_{name}"));
        let rows = r.flows.iter().flat_map(|f| {
            f.stats.frame_outcomes.iter().enumerate().map(move |(k, o)| FrameRow {
                flow_id: f.stats.flow_id,
                frame_index: k,
                frame_type: gop.frame_type(k as u32).label(),
                outcome: o.map_or("delivered", |c| c.label()),
                y_psnr_db: f.frame_psnr.as_ref().map(|p| p[k]),
            })
        });
        write_csv(&map_path, &FRAMEMAP_COLUMNS, rows)?;
        files.framemap_csvs.push(map_path);
    }
    write_csv(
        &files.plots_csv,
        &["plot", "file", "x", "y"],
        PLOTS
            .iter()
            .filter(|p| p.experiment == kind)
            .map(|p| (p.plot, p.file, p.x, p.y)),
    )?;
    fs::write(&files.summary_txt, summary_text(results))?;
    Ok(files)
}

/// A pass/fail line of the plain-text summary.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

fn check(name: impl Into<String>, passed: bool, detail: String) -> Check {
    Check {
        name: name.into(),
        passed,
        detail,
    }
}

fn lookup(means: &[(&'static str, f64, f64)], model: &str, value: f64) -> Option<f64> {
    means
        .iter()
        .find(|(m, v, _)| *m == model && (*v - value).abs() <= 1e-12 * value.abs().max(1.0))
        .map(|e| e.2)
}

fn nonincreasing(ys: &[f64]) -> bool {
    ys.windows(2).all(|w| w[1] <= w[0] + 1e-9)
}

fn nondecreasing(ys: &[f64]) -> bool {
    ys.windows(2).all(|w| w[1] + 1e-9 >= w[0])
}

/// Threshold checks for whichever experiment `results` came from.
pub fn assess(results: &[PointResult]) -> Vec<Check> {
    let Some(first) = results.first() else {
        return Vec::new();
    };
    let mut out = Vec::new();
    let conserved = results.iter().all(|r| r.row.conserved);
    out.push(check("conservation", conserved, "sent == received + corrupt + queue_drops per flow".into()));
    match first.point.kind {
        ExperimentKind::Error => {
            let psnr = mean_by_value(results, |r| r.mean_y_psnr_db.unwrap_or(f64::NAN));
            let clean = first.row.codec_psnr_db.unwrap_or(f64::NAN);
            let rate = ErrorModelKind::Rate.label();
            if let Some(p) = lookup(&psnr, rate, 0.001) {
                out.push(check(
                    "psnr at 0.001 within 1 dB of lossless",
                    clean - p <= 1.0,
                    format!("{p:.3} dB vs {clean:.3} dB"),
                ));
            }
            if let Some(p) = lookup(&psnr, rate, 0.01) {
                out.push(check(
                    "psnr at 0.01 degraded by more than 3 dB",
                    clean - p > 3.0,
                    format!("{p:.3} dB vs {clean:.3} dB"),
                ));
            }
            let ys: Vec<f64> = psnr.iter().filter(|e| e.0 == rate).map(|e| e.2).collect();
            if !ys.is_empty() {
                out.push(check("psnr nonincreasing across the rate sweep", nonincreasing(&ys), format!("{ys:.3?}")));
            }
        }
        ExperimentKind::Nodes => {
            let delay = mean_by_value(results, |r| r.mean_delay_ms);
            let jitter = mean_by_value(results, |r| r.jitter_ms);
            let d: Vec<f64> = delay.iter().map(|e| e.2).collect();
            let j: Vec<f64> = jitter.iter().map(|e| e.2).collect();
            out.push(check("delay nondecreasing in n", nondecreasing(&d), format!("{d:.3?}")));
            out.push(check("jitter nondecreasing in n", nondecreasing(&j), format!("{j:.3?}")));
            let knee = delay
                .iter()
                .zip(&jitter)
                .find(|(d, j)| !(d.2 < QOS_DELAY_MS && j.2 < QOS_JITTER_MS))
                .map(|(d, _)| d.1);
            out.push(check(
                "first n violating the QoS rule in 12..=18",
                knee.is_some_and(|n| (12.0..=18.0).contains(&n)),
                format!("{knee:?}"),
            ));
        }
        ExperimentKind::Speed => {
            let drops = mean_by_value(results, |r| r.speed_drops as f64);
            let slow: f64 = drops.iter().filter(|e| e.1 <= 80.0).map(|e| e.2).sum();
            out.push(check("no speed-induced drops through 80 m/s", slow == 0.0, format!("{slow}")));
            if let Some(fast) = lookup(&drops, "none", 100.0) {
                out.push(check("speed-induced drops at 100 m/s", fast > 0.0, format!("{fast:.2} per run")));
            }
        }
    }
    out
}

fn summary_text(results: &[PointResult]) -> String {
    let first = &results[0];
    let mut s = String::new();
    let _ = writeln!(s, "experiment: {}", first.point.kind.label());
    let _ = writeln!(s, "runs: {}", results.len());
    let ok = results.iter().filter(|r| r.row.qos_ok).count();
    let _ = writeln!(
        s,
        "streaming rule (delay < {QOS_DELAY_MS} ms and jitter < {QOS_JITTER_MS} ms): {ok} of {} runs pass",
        results.len()
    );
    for c in assess(results) {
        let verdict = if c.passed { "PASS" } else { "FAIL" };
        let _ = writeln!(s, "{verdict} {}: {}", c.name, c.detail);
    }
    s
}
