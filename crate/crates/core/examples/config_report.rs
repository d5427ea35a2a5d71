//! Build a scenario from TOML, validate it, run one small sweep and write the
//! CSV reports with the plain-text verdict.
//!
//! cargo run --example config_report [out_dir]

use vnsim::scenario::{assess, emit_report, plan_sweep, run_sweep, ExperimentKind, ScenarioConfig};

const SCENARIO: &str = r#"
seed = 11
[nodes]
count = 4
tier = "wimax_ss"
[error]
model = "burst"
rate = "0.5%"
unit = "packet"
[video]
width = 176
height = 144
[experiments.nodes]
values = [2, 4, 8]
replications = 2
"#;

fn main() -> vnsim::Result<()> {
    let out = std::env::args().nth(1).unwrap_or_else(|| "target/config_report".into());
    let cfg = ScenarioConfig::from_toml_str(SCENARIO)?;
    cfg.validate()?;
    for kind in [ExperimentKind::Error, ExperimentKind::Nodes, ExperimentKind::Speed] {
        println!("{}: {} runs planned", kind.label(), plan_sweep(&cfg, kind)?.len());
    }

    match ScenarioConfig::from_toml_str("[nodes]\ncount = 0\n").and_then(|c| c.validate().map(|_| c)) {
        Err(e) => println!("rejected: {e}"),
        Ok(_) => unreachable!(),
    }

    let results = run_sweep(&cfg, ExperimentKind::Nodes, None)?;
    let files = emit_report(&results, out.as_ref())?;
    for c in assess(&results) {
        println!("[{}] {}: {}", if c.passed { "ok" } else { "--" }, c.name, c.detail);
    }
    println!("wrote {} and {} flow tables", files.summary_csv.display(), files.flow_csvs.len());
    Ok(())
}
