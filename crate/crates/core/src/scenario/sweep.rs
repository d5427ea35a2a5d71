//! The three experiment drivers.

use std::collections::BTreeMap;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use super::assets::VideoAssets;
use super::config::{table, ErrorModelKind, ExperimentKind, ExperimentsConfig, ScenarioConfig};
use super::world::{run_scenario, FlowResult};
use crate::error::{ConfigError, Error, Result};
use crate::sim::derive_seed;

/// Streaming QoS rule: mean delay and jitter strictly below these bounds.
pub const QOS_DELAY_MS: f64 = 12.0;
pub const QOS_JITTER_MS: f64 = 5.0;

/// One scenario instance of a sweep.
#[derive(Debug, Clone)]
pub struct SweepPoint {
    pub kind: ExperimentKind,
    pub model: ErrorModelKind,
    pub value: f64,
    pub rep: u32,
    pub cfg: ScenarioConfig,
}

impl SweepPoint {
    /// File-name token, e.g. `rate-0.001`, `15`, `90`.
    pub fn token(&self) -> String {
        let v = if self.value.fract() == 0.0 && self.kind != ExperimentKind::Error {
            format!("{:.0}", self.value)
        } else {
            format!("{}", self.value)
        };
        match self.kind {
            ExperimentKind::Error => format!("{}-{v}", self.model.label()),
            _ => v,
        }
    }
}

/// One line of `summary.csv`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub experiment: &'static str,
    pub model: &'static str,
    pub value: f64,
    pub rep: u32,
    pub seed: u64,
    pub nodes: usize,
    pub sent: u64,
    pub received: u64,
    pub corrupt: u64,
    pub speed_drops: u64,
    pub queue_drops: u64,
    pub deadline_drops: u64,
    pub frames_lost: u64,
    pub mean_delay_ms: f64,
    pub max_delay_ms: f64,
    pub jitter_ms: f64,
    pub throughput_bps: f64,
    pub mean_y_psnr_db: Option<f64>,
    pub codec_psnr_db: Option<f64>,
    pub bitrate_bps: f64,
    pub qos_ok: bool,
    pub conserved: bool,
}

pub const SUMMARY_COLUMNS: [&str; 22] = [
    "experiment",
    "model",
    "value",
    "rep",
    "seed",
    "nodes",
    "sent",
    "received",
    "corrupt",
    "speed_drops",
    "queue_drops",
    "deadline_drops",
    "frames_lost",
    "mean_delay_ms",
    "max_delay_ms",
    "jitter_ms",
    "throughput_bps",
    "mean_y_psnr_db",
    "codec_psnr_db",
    "bitrate_bps",
    "qos_ok",
    "conserved",
];

#[derive(Debug, Clone)]
pub struct PointResult {
    pub point: SweepPoint,
    pub row: ReportRow,
    pub flows: Vec<FlowResult>,
}

fn merge(base: &mut toml::Table, over: &toml::Table) {
    for (k, v) in over {
        match (base.get_mut(k), v) {
            (Some(toml::Value::Table(b)), toml::Value::Table(o)) => merge(b, o),
            _ => {
                base.insert(k.clone(), v.clone());
            }
        }
    }
}

fn set_path(table: &mut toml::Table, path: &[&str], value: toml::Value) {
    let (head, rest) = path.split_first().expect("nonempty path");
    if rest.is_empty() {
        table.insert(head.to_string(), value);
        return;
    }
    let entry = table
        .entry(head.to_string())
        .or_insert_with(|| toml::Value::Table(toml::Table::new()));
    if let toml::Value::Table(t) = entry {
        set_path(t, rest, value);
    }
}

/// Per-experiment settings applied before the sweep's own `set` table: the
/// playout deadline is off for the error sweep and on for the delay-driven
/// sweeps, and the speed sweep runs 20 nodes.
pub fn implicit_overrides(kind: ExperimentKind) -> toml::Table {
    let deadline = kind != ExperimentKind::Error;
    let mut t = toml::Table::new();
    t.insert("transport".into(), table([("deadline_enabled", deadline.into())]));
    if kind == ExperimentKind::Speed {
        t.insert("nodes".into(), table([("count", 20.into())]));
    }
    t
}

/// Base config with the sweep's overrides and swept key applied.
pub fn point_config(
    base: &ScenarioConfig,
    kind: ExperimentKind,
    model: ErrorModelKind,
    value: f64,
    rep: u32,
) -> Result<ScenarioConfig> {
    let spec = base.experiments.get(kind);
    let mut stripped = base.clone();
    stripped.experiments = ExperimentsConfig::default();
    let mut table = toml::Table::try_from(&stripped).map_err(|e| Error::Other(e.to_string()))?;
    table.remove("experiments");
    merge(&mut table, &implicit_overrides(kind));
    merge(&mut table, &spec.set);
    match kind {
        ExperimentKind::Error => {
            set_path(&mut table, &["error", "model"], model.label().into());
            set_path(&mut table, &["error", "rate"], value.into());
        }
        ExperimentKind::Nodes => {
            if value.fract() != 0.0 || value < 1.0 {
                return Err(ConfigError::Validation(format!("node count {value} is not a positive integer")).into());
            }
            set_path(&mut table, &["nodes", "count"], (value as i64).into());
        }
        ExperimentKind::Speed => {
            set_path(&mut table, &["mobility", "model"], "constant_velocity".into());
            set_path(&mut table, &["mobility", "speed"], value.into());
        }
    }
    let mut cfg: ScenarioConfig = table
        .try_into()
        .map_err(|e: toml::de::Error| ConfigError::Parse {
            message: format!("experiments.{}.set: {}", kind.label(), e.message()),
            location: None,
        })?;
    cfg.seed = derive_seed(base.seed, rep);
    cfg.experiments = base.experiments.clone();
    cfg.validate()?;
    Ok(cfg)
}

/// Every point of a sweep, ordered by value, then model, then replication.
pub fn plan_sweep(base: &ScenarioConfig, kind: ExperimentKind) -> Result<Vec<SweepPoint>> {
    let spec = base.experiments.get(kind);
    let models = match kind {
        ExperimentKind::Error if spec.models.is_empty() => vec![ErrorModelKind::Rate],
        ExperimentKind::Error => spec.models.clone(),
        _ => vec![ErrorModelKind::None],
    };
    let mut points = Vec::new();
    for v in &spec.values {
        for &model in &models {
            for rep in 0..spec.replications {
                let cfg = point_config(base, kind, model, v.0, rep)?;
                points.push(SweepPoint {
                    kind,
                    model,
                    value: v.0,
                    rep,
                    cfg,
                });
            }
        }
    }
    Ok(points)
}

fn summarize(point: &SweepPoint, flows: &[FlowResult], codec_psnr_db: Option<f64>) -> ReportRow {
    let sum = |f: fn(&FlowResult) -> u64| flows.iter().map(f).sum::<u64>();
    let n = flows.len().max(1) as f64;
    let received = sum(|f| f.stats.recv_pkts);
    let delay_ns: u64 = flows.iter().map(|f| f.stats.delay_sum.as_nanos()).sum();
    let mean_delay_ms = if received == 0 {
        0.0
    } else {
        delay_ns as f64 / received as f64 / 1e6
    };
    let jitter_ms = flows.iter().map(|f| f.stats.jitter_ms()).sum::<f64>() / n;
    let psnr: Option<f64> = flows
        .iter()
        .map(|f| f.mean_psnr_db)
        .sum::<Option<f64>>()
        .map(|s| s / n);
    ReportRow {
        experiment: point.kind.label(),
        model: point.model.label(),
        value: point.value,
        rep: point.rep,
        seed: point.cfg.seed,
        nodes: flows.len(),
        sent: sum(|f| f.stats.sent_pkts),
        received,
        corrupt: sum(|f| f.stats.corrupt_pkts),
        speed_drops: sum(|f| f.stats.speed_drops),
        queue_drops: sum(|f| f.stats.queue_drops),
        deadline_drops: sum(|f| f.stats.deadline_drops),
        frames_lost: sum(|f| f.stats.frames_lost() as u64),
        mean_delay_ms,
        max_delay_ms: flows
            .iter()
            .map(|f| f.stats.delay_max.as_millis_f64())
            .fold(0.0, f64::max),
        jitter_ms,
        throughput_bps: flows.iter().map(|f| f.stats.throughput_bps()).sum::<f64>() / n,
        mean_y_psnr_db: psnr,
        codec_psnr_db,
        bitrate_bps: flows.iter().map(|f| f.bitrate_bps).sum::<f64>() / n,
        qos_ok: mean_delay_ms < QOS_DELAY_MS && jitter_ms < QOS_JITTER_MS,
        conserved: flows.iter().all(|f| f.stats.is_conserved()),
    }
}

/// Runs a whole sweep. `jobs` bounds the worker threads (`None` = all cores).
/// Results come back in plan order whatever the completion order.
pub fn run_sweep(base: &ScenarioConfig, kind: ExperimentKind, jobs: Option<usize>) -> Result<Vec<PointResult>> {
    let points = plan_sweep(base, kind)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.unwrap_or(0))
        .build()
        .map_err(|e| Error::Other(e.to_string()))?;
    pool.install(|| {
        let mut assets: BTreeMap<String, Arc<VideoAssets>> = BTreeMap::new();
        for p in &points {
            let key = toml::to_string(&p.cfg.video).map_err(|e| Error::Other(e.to_string()))?;
            if let std::collections::btree_map::Entry::Vacant(slot) = assets.entry(key) {
                slot.insert(Arc::new(VideoAssets::prepare(&p.cfg.video)?));
            }
        }
        let lossless: BTreeMap<&String, Option<f64>> = assets
            .iter()
            .map(|(k, a)| {
                let p = a.frame_psnr(&Default::default())?;
                Ok((k, p.map(|v| v.iter().sum::<f64>() / v.len() as f64)))
            })
            .collect::<Result<_>>()?;
        points
            .into_par_iter()
            .map(|point| {
                let key = toml::to_string(&point.cfg.video).map_err(|e| Error::Other(e.to_string()))?;
                let run = run_scenario(&point.cfg, &assets[&key])?;
                let row = summarize(&point, &run.flows, lossless[&key]);
                Ok(PointResult {
                    point,
                    row,
                    flows: run.flows,
                })
            })
            .collect()
    })
}

pub fn run_error_sweep(cfg: &ScenarioConfig, jobs: Option<usize>) -> Result<Vec<PointResult>> {
    run_sweep(cfg, ExperimentKind::Error, jobs)
}

pub fn run_node_sweep(cfg: &ScenarioConfig, jobs: Option<usize>) -> Result<Vec<PointResult>> {
    run_sweep(cfg, ExperimentKind::Nodes, jobs)
}

pub fn run_speed_sweep(cfg: &ScenarioConfig, jobs: Option<usize>) -> Result<Vec<PointResult>> {
    run_sweep(cfg, ExperimentKind::Speed, jobs)
}

/// Mean of a column over replications, keyed by (model, value) in plan order.
pub fn mean_by_value(results: &[PointResult], f: impl Fn(&ReportRow) -> f64) -> Vec<(&'static str, f64, f64)> {
    let mut out: Vec<(&'static str, f64, f64, usize)> = Vec::new();
    for r in results {
        let x = f(&r.row);
        match out.iter_mut().find(|e| e.0 == r.row.model && e.1 == r.row.value) {
            Some(e) => {
                e.2 += x;
                e.3 += 1;
            }
            None => out.push((r.row.model, r.row.value, x, 1)),
        }
    }
    out.into_iter().map(|(m, v, s, c)| (m, v, s / c as f64)).collect()
}
