//! `covlab`: scheduling-policy experiments for cooperative perception.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use harness_cli::{
    default_grid, read_summary_json, run_experiment, run_sweep, write_slot_csv,
    write_summary_json, write_sweep_csv, EnvKind, ExperimentConfig, ParamPoint, RunSummaryFile,
    SeedAggregate,
};

#[derive(Parser)]
#[command(
    name = "covlab",
    about = "Cooperative-perception scheduling experiments",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CommonOpts {
    /// Config file in the flat `key = value` format.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Single seed to run.
    #[arg(long)]
    seed: Option<u64>,
    /// Half-open seed range `a..b`.
    #[arg(long)]
    seeds: Option<String>,
    /// Policy name: mass | closest | etc | sw-ucb | earliest-activated | oracle.
    #[arg(long)]
    policy: Option<String>,
    /// Confidence-bound scale.
    #[arg(long)]
    beta: Option<f64>,
    /// Periodic ETC epoch length.
    #[arg(long)]
    epoch_len: Option<u64>,
    /// SW-UCB window length.
    #[arg(long)]
    window_len: Option<u64>,
    /// Number of slots to simulate.
    #[arg(long)]
    slots: Option<u64>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Extra `key=value` overrides, applied after the config file.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Synthetic restless-bandit environment.
    Synth(CommonOpts),
    /// Generated bird's-eye-view traffic world.
    World(CommonOpts),
    /// Ingested trace file.
    Trace {
        /// Trace CSV path.
        file: PathBuf,
        /// Buildings CSV path (defaults to `<trace stem>_buildings.csv`).
        #[arg(long)]
        buildings: Option<PathBuf>,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Parameter sweep across policies.
    Sweep {
        /// Environment to sweep on.
        #[arg(long, default_value = "synth")]
        env: String,
        /// Comma-separated policy list.
        #[arg(
            long,
            default_value = "mass,closest,etc,sw-ucb,earliest-activated"
        )]
        policies: String,
        /// Points per continuous parameter grid.
        #[arg(long, default_value_t = 5)]
        grid_points: usize,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Re-render outputs from a previously written summary JSON.
    Report {
        /// Summary JSON produced by a run.
        #[arg(long)]
        from: PathBuf,
        /// Output directory.
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
}

fn parse_seeds(common: &CommonOpts) -> Result<Vec<u64>> {
    if let Some(range) = &common.seeds {
        let (a, b) = range
            .split_once("..")
            .context("seed range must look like a..b")?;
        let a: u64 = a.trim().parse().context("bad range start")?;
        let b: u64 = b.trim().parse().context("bad range end")?;
        if b <= a {
            bail!("empty seed range {range:?}");
        }
        return Ok((a..b).collect());
    }
    Ok(vec![common.seed.unwrap_or(0)])
}

fn build_config(env: EnvKind, common: &CommonOpts) -> Result<ExperimentConfig> {
    let mut cfg = match &common.config {
        Some(path) => ExperimentConfig::load(path)
            .with_context(|| format!("loading config {}", path.display()))?,
        None => ExperimentConfig::default(),
    };
    cfg.env = env;
    for (i, kv) in common.set.iter().enumerate() {
        let (k, v) = kv
            .split_once('=')
            .with_context(|| format!("--set {kv:?} must be key=value"))?;
        cfg.apply(k.trim(), v, i + 1)?;
    }
    if let Some(p) = &common.policy {
        cfg.policy = p.clone();
    }
    if let Some(b) = common.beta {
        cfg.beta = b;
    }
    if let Some(e) = common.epoch_len {
        cfg.epoch_len = e;
    }
    if let Some(w) = common.window_len {
        cfg.window_len = w;
    }
    if let Some(t) = common.slots {
        cfg.slots = t;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run_and_report(cfg: &ExperimentConfig, seeds: &[u64], out: &Path) -> Result<()> {
    std::fs::create_dir_all(out)?;
    let mut per_seed = Vec::new();
    for &seed in seeds {
        let res = run_experiment(cfg, seed).with_context(|| format!("seed {seed}"))?;
        let slot_path = out.join(format!("slots_{}_seed{}.csv", cfg.policy, seed));
        write_slot_csv(&slot_path, &res.metrics)?;
        println!(
            "seed {seed}: avg regret {:.6}, mean gain {:.6}{}",
            res.average_regret,
            res.mean_gain,
            match res.mean_recall {
                Some(r) => format!(", mean recall {:.4}", r),
                None => String::new(),
            }
        );
        per_seed.push(SeedAggregate {
            seed,
            average_regret: res.average_regret,
            mean_gain: res.mean_gain,
            mean_recall: res.mean_recall,
        });
    }
    let summary = RunSummaryFile::new(cfg.clone(), per_seed)?;
    let summary_path = out.join(format!("summary_{}.json", cfg.policy));
    write_summary_json(&summary_path, &summary)?;
    println!(
        "wrote {} (mean avg regret {:.6})",
        summary_path.display(),
        summary.average_regret_mean
    );
    Ok(())
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::Synth(common) => {
            let cfg = build_config(EnvKind::Synth, &common)?;
            let seeds = parse_seeds(&common)?;
            run_and_report(&cfg, &seeds, &common.out)
        }
        Command::World(common) => {
            let cfg = build_config(EnvKind::World, &common)?;
            let seeds = parse_seeds(&common)?;
            run_and_report(&cfg, &seeds, &common.out)
        }
        Command::Trace {
            file,
            buildings,
            common,
        } => {
            let mut cfg = build_config(EnvKind::Trace, &common)?;
            cfg.trace_path = Some(file.display().to_string());
            if let Some(b) = buildings {
                cfg.buildings_path = Some(b.display().to_string());
            }
            cfg.validate()?;
            let seeds = parse_seeds(&common)?;
            run_and_report(&cfg, &seeds, &common.out)
        }
        Command::Sweep {
            env,
            policies,
            grid_points,
            common,
        } => {
            let env: EnvKind = env.parse().map_err(anyhow::Error::msg)?;
            let cfg = build_config(env, &common)?;
            let seeds = parse_seeds(&common)?;
            let mut points: Vec<ParamPoint> = Vec::new();
            for policy in policies.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                points.extend(default_grid(policy, grid_points));
            }
            if points.is_empty() {
                bail!("no policies selected");
            }
            let sweep = run_sweep(&cfg, &points, &seeds)?;
            std::fs::create_dir_all(&common.out)?;
            let path = common.out.join("sweep.csv");
            write_sweep_csv(&path, &sweep)?;
            for policy in policies.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                if let Some(best) = sweep.best_for(policy) {
                    println!(
                        "{policy}: best mean regret {:.6} at beta={:?} epoch={:?} window={:?}",
                        best.mean_regret,
                        best.point.beta,
                        best.point.epoch_len,
                        best.point.window_len
                    );
                }
            }
            println!("wrote {}", path.display());
            Ok(())
        }
        Command::Report { from, out } => {
            let summary = read_summary_json(&from)?;
            std::fs::create_dir_all(&out)?;
            let path = out.join(format!("summary_{}.json", summary.config.policy));
            write_summary_json(&path, &summary)?;
            println!("re-rendered {}", path.display());
            Ok(())
        }
    }
}
