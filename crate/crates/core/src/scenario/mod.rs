//! Scenario configuration, the experiment sweeps and report output.

mod assets;
mod config;
mod report;
mod sweep;
mod world;

pub use assets::VideoAssets;
pub use config::{
    AccessScheduling, BurstReading, ErrorConfig, ErrorModelKind, ExperimentKind, ExperimentsConfig, Fraction,
    LinkSpec, MobilityConfig, NodesConfig, Pacing, ScenarioConfig, SweepSpec, TopologyConfig, TransportConfig,
    VideoConfig, VideoSource, MAX_NODES, SCHEMA_VERSION,
};
pub use report::{assess, emit_report, Check, PlotSpec, ReportFiles, FLOW_COLUMNS, FRAMEMAP_COLUMNS, PLOTS};
pub use sweep::{
    mean_by_value, plan_sweep, point_config, run_error_sweep, run_node_sweep, run_speed_sweep, run_sweep,
    PointResult, ReportRow, SweepPoint, QOS_DELAY_MS, QOS_JITTER_MS, SUMMARY_COLUMNS,
};
pub use world::{run_scenario, FlowResult, Packet, RunResult};
