use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use vnsim::codec::{psnr_y_sequence, read_yuv420_all, write_yuv420, SyntheticSequence};
use vnsim::scenario::{emit_report, run_sweep, ExperimentKind, ScenarioConfig};

#[derive(Parser)]
#[command(name = "vnsim", version, about = "Video-over-network scenario simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment sweep and write its reports.
    Run {
        config: PathBuf,
        #[arg(long)]
        experiment: ExperimentKind,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        reps: Option<u32>,
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Parse and validate a config, including every sweep point.
    Validate { config: PathBuf },
    /// Write a synthetic raw 4:2:0 sequence.
    Synth {
        #[arg(long, value_parser = parse_resolution)]
        resolution: (usize, usize),
        #[arg(long)]
        frames: usize,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 4.0)]
        motion: f64,
        #[arg(long, default_value_t = 0.0)]
        texture: f64,
    },
    /// Per-frame and mean Y-PSNR between two raw 4:2:0 files.
    Score {
        #[arg(long = "ref")]
        reference: PathBuf,
        #[arg(long)]
        rec: PathBuf,
        #[arg(long, value_parser = parse_resolution, default_value = "832x480")]
        resolution: (usize, usize),
    },
}

fn parse_resolution(s: &str) -> Result<(usize, usize), String> {
    let (w, h) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("expected WxH, got {s:?}"))?;
    let w = w.trim().parse().map_err(|_| format!("bad width in {s:?}"))?;
    let h = h.trim().parse().map_err(|_| format!("bad height in {s:?}"))?;
    Ok((w, h))
}

fn main() -> ExitCode {
    match run(Cli::parse().command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn run(cmd: Command) -> vnsim::Result<()> {
    match cmd {
        Command::Run {
            config,
            experiment,
            out,
            seed,
            reps,
            jobs,
        } => {
            let mut cfg = ScenarioConfig::load(&config)?;
            if let Some(s) = seed {
                cfg.seed = s;
            }
            if let Some(k) = reps {
                cfg.experiments.get_mut(experiment).replications = k;
            }
            cfg.validate()?;
            let results = run_sweep(&cfg, experiment, jobs)?;
            let files = emit_report(&results, &out)?;
            print!("{}", std::fs::read_to_string(&files.summary_txt)?);
            println!("reports written to {}", out.display());
        }
        Command::Validate { config } => {
            let cfg = ScenarioConfig::load(&config)?;
            for kind in [ExperimentKind::Error, ExperimentKind::Nodes, ExperimentKind::Speed] {
                let points = vnsim::scenario::plan_sweep(&cfg, kind)?;
                println!("{}: {} runs", kind.label(), points.len());
            }
            println!("{}: ok", config.display());
        }
        Command::Synth {
            resolution: (w, h),
            frames,
            out,
            motion,
            texture,
        } => {
            let seq = SyntheticSequence::new(w, h).with_motion(motion).with_texture(texture);
            write_yuv420(&out, &seq.frames(frames))?;
            println!("wrote {frames} frames of {w}x{h} to {}", out.display());
        }
        Command::Score {
            reference,
            rec,
            resolution: (w, h),
        } => {
            let a = read_yuv420_all(&reference, w, h)?;
            let b = read_yuv420_all(&rec, w, h)?;
            let psnr = psnr_y_sequence(&a, &b)?;
            for (k, p) in psnr.iter().enumerate() {
                println!("frame {k}: {p:.3} dB");
            }
            println!("mean: {:.3} dB", psnr.iter().sum::<f64>() / psnr.len().max(1) as f64);
        }
    }
    Ok(())
}
