//! Strict TOML scenario configuration.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};

use crate::codec::GopConfig;
use crate::error::ConfigError;
use crate::error_model::{BurstErrorConfig, BurstSizeDist, ErrorUnit, RateErrorConfig};
use crate::mobility::{BoundingBox, MobilityModel, SpeedDegradationConfig};
use crate::sim::SimTime;
use crate::topology::{LinkConfig, Tier};
use crate::transport::PlayoutConfig;

pub const SCHEMA_VERSION: u32 = 1;
pub const MAX_NODES: usize = 30;

/// A probability written either as a plain fraction (`0.001`) or with a
/// percent suffix (`"0.1%"`).
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct Fraction(pub f64);

impl Fraction {
    pub fn parse(text: &str) -> Result<Self, String> {
        let t = text.trim();
        let (num, scale) = match t.strip_suffix('%') {
            Some(n) => (n.trim(), 0.01),
            None => (t, 1.0),
        };
        num.parse::<f64>()
            .map(|v| Fraction(v * scale))
            .map_err(|_| format!("invalid fraction {text:?}"))
    }
}

impl Serialize for Fraction {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(self.0)
    }
}

impl<'de> Deserialize<'de> for Fraction {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = Fraction;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a number or a string like \"0.1%\"")
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Fraction, E> {
                Ok(Fraction(v))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Fraction, E> {
                Ok(Fraction(v as f64))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Fraction, E> {
                Ok(Fraction(v as f64))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<Fraction, E> {
                Fraction::parse(v).map_err(E::custom)
            }
        }
        d.deserialize_any(V)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LinkSpec {
    pub rate_bps: f64,
    pub prop_delay_ms: f64,
    pub mtu_bytes: usize,
}

impl LinkSpec {
    fn new(rate_bps: f64, prop_delay_ms: f64) -> Self {
        Self {
            rate_bps,
            prop_delay_ms,
            mtu_bytes: 1400,
        }
    }

    pub fn to_link_config(&self, queue_capacity_pkts: usize) -> Result<LinkConfig, ConfigError> {
        let cfg = LinkConfig {
            rate_bps: self.rate_bps,
            prop_delay: SimTime::from_millis_f64(self.prop_delay_ms).map_err(validation)?,
            mtu_bytes: self.mtu_bytes,
            queue_capacity_pkts,
        };
        cfg.validate().map_err(validation)?;
        Ok(cfg)
    }
}

impl Default for LinkSpec {
    fn default() -> Self {
        Self::new(5e6, 2.0)
    }
}

/// How members of a shared cell reach the base station.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AccessScheduling {
    /// One FIFO uplink at `aggregate · η(n)` shared by every member.
    #[default]
    Shared,
    /// A dedicated uplink per member at `aggregate / n · η(n)`.
    Dedicated,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TopologyConfig {
    pub contention: f64,
    pub queue_capacity_pkts: usize,
    pub access: AccessScheduling,
    /// Relief-centre LAN nodes to the server.
    pub lan: LinkSpec,
    /// BTS to server.
    pub backhaul: LinkSpec,
    /// Wi-Fi AP to server.
    pub ap_uplink: LinkSpec,
    /// `rate_bps` is the aggregate cell rate.
    pub wifi: LinkSpec,
    pub wimax: LinkSpec,
}

impl Default for TopologyConfig {
    fn default() -> Self {
        Self {
            contention: 0.01,
            queue_capacity_pkts: 100,
            access: AccessScheduling::Shared,
            lan: LinkSpec::new(5e6, 2.0),
            backhaul: LinkSpec::new(100e6, 2.0),
            ap_uplink: LinkSpec::new(100e6, 2.0),
            wifi: LinkSpec::new(65e6, 0.1),
            wimax: LinkSpec::new(15e6, 1.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NodesConfig {
    pub count: usize,
    pub tier: Tier,
}

impl Default for NodesConfig {
    fn default() -> Self {
        Self {
            count: 20,
            tier: Tier::WimaxSs,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorModelKind {
    #[default]
    None,
    Rate,
    Burst,
}

impl ErrorModelKind {
    pub fn label(self) -> &'static str {
        match self {
            ErrorModelKind::None => "none",
            ErrorModelKind::Rate => "rate",
            ErrorModelKind::Burst => "burst",
        }
    }
}

/// How a burst model reads `error.rate`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BurstReading {
    /// `rate` is the long-run fraction of corrupted packets.
    #[default]
    CorruptFraction,
    /// `rate` is the per-packet burst start probability.
    StartProbability,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ErrorConfig {
    pub model: ErrorModelKind,
    pub rate: Fraction,
    pub unit: ErrorUnit,
    pub burst_reading: BurstReading,
    pub burst_size_min: u32,
    pub burst_size_max: u32,
}

impl Default for ErrorConfig {
    fn default() -> Self {
        Self {
            model: ErrorModelKind::None,
            rate: Fraction(0.0),
            unit: ErrorUnit::Byte,
            burst_reading: BurstReading::CorruptFraction,
            burst_size_min: 1,
            burst_size_max: 4,
        }
    }
}

impl ErrorConfig {
    pub fn rate_config(&self) -> RateErrorConfig {
        RateErrorConfig {
            rate: self.rate.0,
            unit: self.unit,
        }
    }

    pub fn burst_config(&self) -> BurstErrorConfig {
        let size_dist = BurstSizeDist::Uniform {
            min: self.burst_size_min,
            max: self.burst_size_max,
        };
        let burst_rate = match self.burst_reading {
            BurstReading::StartProbability => self.rate.0,
            BurstReading::CorruptFraction => BurstErrorConfig::burst_rate_for_fraction(self.rate.0, &size_dist),
        };
        BurstErrorConfig { burst_rate, size_dist }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MobilityConfig {
    pub model: MobilityModel,
    /// Constant-velocity speed in m/s.
    pub speed: f64,
    pub heading_deg: f64,
    pub walk_epoch_s: f64,
    pub walk_speed_min: f64,
    pub walk_speed_max: f64,
    pub v_crit: f64,
    pub slope: f64,
    pub per_cap: f64,
    pub box_x_min: f64,
    pub box_x_max: f64,
    pub box_y_min: f64,
    pub box_y_max: f64,
}

impl Default for MobilityConfig {
    fn default() -> Self {
        let sd = SpeedDegradationConfig::default();
        let bb = BoundingBox::default();
        Self {
            model: MobilityModel::Static,
            speed: 0.0,
            heading_deg: 0.0,
            walk_epoch_s: 1.0,
            walk_speed_min: 0.5,
            walk_speed_max: 2.0,
            v_crit: sd.v_crit,
            slope: sd.slope,
            per_cap: sd.per_cap,
            box_x_min: bb.x_min,
            box_x_max: bb.x_max,
            box_y_min: bb.y_min,
            box_y_max: bb.y_max,
        }
    }
}

impl MobilityConfig {
    pub fn bounding_box(&self) -> BoundingBox {
        BoundingBox {
            x_min: self.box_x_min,
            x_max: self.box_x_max,
            y_min: self.box_y_min,
            y_max: self.box_y_max,
        }
    }

    pub fn speed_degradation(&self) -> SpeedDegradationConfig {
        SpeedDegradationConfig {
            v_crit: self.v_crit,
            slope: self.slope,
            per_cap: self.per_cap,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VideoSource {
    #[default]
    Synthetic,
    /// Raw planar 4:2:0 file at `video.path`, encoded with the toy codec.
    Yuv,
    /// Pre-encoded frames at `video.path` with a CSV index at `video.sidecar`.
    Passthrough,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VideoConfig {
    pub width: usize,
    pub height: usize,
    pub frames: usize,
    pub gop_size: u32,
    pub b_frames: u32,
    pub frame_rate: f64,
    pub qp: u8,
    pub source: VideoSource,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sidecar: Option<PathBuf>,
    pub motion: f64,
    pub texture: f64,
}

impl Default for VideoConfig {
    fn default() -> Self {
        let gop = GopConfig::default();
        Self {
            width: 832,
            height: 480,
            frames: 10,
            gop_size: gop.gop_size,
            b_frames: gop.b_frames,
            frame_rate: gop.frame_rate,
            qp: gop.qp,
            source: VideoSource::Synthetic,
            path: None,
            sidecar: None,
            motion: 4.0,
            texture: 0.0,
        }
    }
}

impl VideoConfig {
    pub fn gop(&self) -> GopConfig {
        GopConfig {
            gop_size: self.gop_size,
            b_frames: self.b_frames,
            frame_rate: self.frame_rate,
            qp: self.qp,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pacing {
    /// All fragments of frame k injected at k / frame_rate.
    #[default]
    Frame,
    /// Fragments of frame k spaced evenly across its frame interval.
    Spread,
    /// The whole bitstream injected at t = 0.
    BackToBack,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TransportConfig {
    pub pacing: Pacing,
    pub header_bytes: usize,
    pub deadline_ms: f64,
    pub deadline_enabled: bool,
    /// Each flow starts at a uniform random offset in `[0, start_spread_ms)`.
    pub start_spread_ms: f64,
}

impl Default for TransportConfig {
    fn default() -> Self {
        Self {
            pacing: Pacing::Frame,
            header_bytes: 40,
            deadline_ms: 12.0,
            deadline_enabled: false,
            start_spread_ms: 0.0,
        }
    }
}

impl TransportConfig {
    pub fn playout(&self) -> Result<PlayoutConfig, ConfigError> {
        let cfg = PlayoutConfig {
            frame_deadline: SimTime::from_millis_f64(self.deadline_ms).map_err(validation)?,
            enabled: self.deadline_enabled,
        };
        cfg.validate().map_err(validation)?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Error,
    Nodes,
    Speed,
}

impl ExperimentKind {
    pub fn label(self) -> &'static str {
        match self {
            ExperimentKind::Error => "error",
            ExperimentKind::Nodes => "nodes",
            ExperimentKind::Speed => "speed",
        }
    }
}

impl std::str::FromStr for ExperimentKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "error" => Ok(ExperimentKind::Error),
            "nodes" => Ok(ExperimentKind::Nodes),
            "speed" => Ok(ExperimentKind::Speed),
            other => Err(format!("unknown experiment {other:?} (expected error, nodes or speed)")),
        }
    }
}

/// One sweep: the varied values plus overrides applied to the base config.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub values: Vec<Fraction>,
    #[serde(default = "default_replications")]
    pub replications: u32,
    /// Error sweep only: which models to run at every value.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub models: Vec<ErrorModelKind>,
    /// Partial config merged over the base before the swept key is set.
    #[serde(default, skip_serializing_if = "toml::Table::is_empty")]
    pub set: toml::Table,
}

fn default_replications() -> u32 {
    3
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentsConfig {
    pub error: SweepSpec,
    pub nodes: SweepSpec,
    pub speed: SweepSpec,
}

impl Default for ExperimentsConfig {
    fn default() -> Self {
        let six = [0.0001, 0.0005, 0.001, 0.005, 0.01, 0.05];
        let spec = |values: Vec<f64>, models: Vec<ErrorModelKind>| SweepSpec {
            values: values.into_iter().map(Fraction).collect(),
            replications: default_replications(),
            models,
            set: toml::Table::new(),
        };
        Self {
            error: spec(six.to_vec(), vec![ErrorModelKind::Rate, ErrorModelKind::Burst]),
            nodes: spec((1..=30).map(f64::from).collect(), Vec::new()),
            speed: spec((2..=10).map(|s| f64::from(s) * 10.0).collect(), Vec::new()),
        }
    }
}

pub(crate) fn table<const N: usize>(entries: [(&str, toml::Value); N]) -> toml::Value {
    toml::Value::Table(entries.into_iter().map(|(k, v)| (k.to_string(), v)).collect())
}

impl ExperimentsConfig {
    pub fn get(&self, kind: ExperimentKind) -> &SweepSpec {
        match kind {
            ExperimentKind::Error => &self.error,
            ExperimentKind::Nodes => &self.nodes,
            ExperimentKind::Speed => &self.speed,
        }
    }

    pub fn get_mut(&mut self, kind: ExperimentKind) -> &mut SweepSpec {
        match kind {
            ExperimentKind::Error => &mut self.error,
            ExperimentKind::Nodes => &mut self.nodes,
            ExperimentKind::Speed => &mut self.speed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScenarioConfig {
    pub schema_version: u32,
    pub seed: u64,
    /// Hard stop for a single run, in seconds of simulated time.
    pub duration_s: f64,
    pub topology: TopologyConfig,
    pub nodes: NodesConfig,
    pub error: ErrorConfig,
    pub mobility: MobilityConfig,
    pub video: VideoConfig,
    pub transport: TransportConfig,
    pub experiments: ExperimentsConfig,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            seed: 1,
            duration_s: 30.0,
            topology: TopologyConfig::default(),
            nodes: NodesConfig::default(),
            error: ErrorConfig::default(),
            mobility: MobilityConfig::default(),
            video: VideoConfig::default(),
            transport: TransportConfig::default(),
            experiments: ExperimentsConfig::default(),
        }
    }
}

fn validation(e: impl fmt::Display) -> ConfigError {
    ConfigError::Validation(e.to_string())
}

fn parse_error(e: toml::de::Error, source: &str) -> ConfigError {
    let location = e.span().map(|span| {
        let line = source[..span.start.min(source.len())].matches('\n').count() + 1;
        format!("line {line}")
    });
    ConfigError::Parse {
        message: e.message().to_string(),
        location,
    }
}

impl ScenarioConfig {
    /// Parses and validates.
    pub fn from_toml_str(source: &str) -> Result<Self, ConfigError> {
        let cfg: ScenarioConfig = toml::from_str(source).map_err(|e| parse_error(e, source))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let mut cfg = Self::from_toml_str(&text)?;
        cfg.resolve_paths(path.parent().unwrap_or(Path::new(".")));
        Ok(cfg)
    }

    /// Makes relative video paths relative to the config file's directory.
    fn resolve_paths(&mut self, base: &Path) {
        for p in [&mut self.video.path, &mut self.video.sidecar].into_iter().flatten() {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(validation(format!(
                "schema_version {} is not supported (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        if !(self.duration_s > 0.0) {
            return Err(validation("duration_s must be positive"));
        }
        let n = self.nodes.count;
        if n == 0 || n > MAX_NODES {
            return Err(validation(format!("nodes.count must be in 1..={MAX_NODES}, got {n}")));
        }
        if !matches!(self.nodes.tier, Tier::ReliefCenterLan | Tier::WifiClient | Tier::WimaxSs) {
            return Err(validation(format!("nodes.tier {:?} cannot source video", self.nodes.tier)));
        }
        let t = &self.topology;
        if !(t.contention >= 0.0) {
            return Err(validation("topology.contention must be nonnegative"));
        }
        for spec in [&t.lan, &t.backhaul, &t.ap_uplink, &t.wifi, &t.wimax] {
            spec.to_link_config(t.queue_capacity_pkts)?;
            if spec.mtu_bytes <= self.transport.header_bytes {
                return Err(validation(format!(
                    "mtu {} does not fit the {}-byte header",
                    spec.mtu_bytes, self.transport.header_bytes
                )));
            }
        }
        match self.error.model {
            ErrorModelKind::None => {}
            ErrorModelKind::Rate => self.error.rate_config().validate().map_err(validation)?,
            ErrorModelKind::Burst => {
                if !(0.0..1.0).contains(&self.error.rate.0) {
                    return Err(validation("burst error rate must be in [0, 1)"));
                }
                self.error.burst_config().validate().map_err(validation)?
            }
        }
        let m = &self.mobility;
        m.bounding_box().validate().map_err(validation)?;
        m.speed_degradation().validate().map_err(validation)?;
        if !(m.speed >= 0.0) || !(m.walk_epoch_s > 0.0) || !(0.0..=m.walk_speed_max).contains(&m.walk_speed_min) {
            return Err(validation("mobility speeds must be nonnegative and the walk epoch positive"));
        }
        let v = &self.video;
        self.video.gop().validate().map_err(validation)?;
        if v.frames == 0 {
            return Err(validation("video.frames must be positive"));
        }
        if v.width == 0 || v.height == 0 || v.width % 2 == 1 || v.height % 2 == 1 {
            return Err(validation(format!("video resolution {}x{} must be even and nonzero", v.width, v.height)));
        }
        match v.source {
            VideoSource::Synthetic => {}
            VideoSource::Yuv if v.path.is_none() => return Err(validation("video.source = yuv needs video.path")),
            VideoSource::Passthrough if v.path.is_none() || v.sidecar.is_none() => {
                return Err(validation("video.source = passthrough needs video.path and video.sidecar"))
            }
            _ => {}
        }
        self.transport.playout()?;
        if !(self.transport.start_spread_ms >= 0.0) {
            return Err(validation("transport.start_spread_ms must be nonnegative"));
        }
        for kind in [ExperimentKind::Error, ExperimentKind::Nodes, ExperimentKind::Speed] {
            let spec = self.experiments.get(kind);
            if spec.values.is_empty() {
                return Err(validation(format!("experiments.{}.values is empty", kind.label())));
            }
            if spec.replications == 0 {
                return Err(validation(format!("experiments.{}.replications must be at least 1", kind.label())));
            }
        }
        Ok(())
    }
}
