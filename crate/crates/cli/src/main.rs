use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use epinet::analytics::EpidemicParameters;
use epinet::harness::{run_experiment, write_outputs, ExperimentConfig, ExperimentKind};
use epinet::EpiError;

/// Epidemics on configuration-model graphs: analytic constants, simulation and
/// seeded Monte Carlo experiments.
#[derive(Parser, Debug)]
#[command(name = "epinet", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Analytic summary of one parameter set (an experiment config or bare parameters).
    Analyze(RunArgs),
    /// One epidemic, with optional event log and infection tree.
    Simulate(RunArgs),
    /// Replicated epidemics, optionally conditioned on major outbreaks.
    Montecarlo(RunArgs),
    /// Extinction time against ln n across system sizes.
    Scaling(RunArgs),
    /// Analytic summaries across vaccination levels.
    VaccinateSweep(RunArgs),
    /// Hitting or extinction times of a branching process.
    Branching(RunArgs),
    /// Recompute the worked vaccination examples.
    Examples(ExamplesArgs),
}

#[derive(Args, Debug)]
struct RunArgs {
    /// Experiment configuration (JSON).
    #[arg(long)]
    config: PathBuf,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args, Debug)]
struct ExamplesArgs {
    /// Optional configuration (JSON); the examples are fixed.
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args, Debug)]
struct CommonArgs {
    /// Output directory; overrides `output_dir` of the config.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Base seed; overrides `base_seed` of the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    jobs: Option<usize>,
}

fn load_config(kind: ExperimentKind, path: Option<&PathBuf>) -> anyhow::Result<ExperimentConfig> {
    let Some(path) = path else {
        return Ok(ExperimentConfig::new(kind));
    };
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut value: serde_json::Value =
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    let expected = serde_json::to_value(kind)?;
    match value.get("kind") {
        Some(k) if *k != expected => bail!("config kind {k} does not match subcommand {expected}"),
        Some(_) => {}
        None if kind == ExperimentKind::Analyze && value.get("parameters").is_none() => {
            let parameters: EpidemicParameters =
                serde_json::from_value(value).with_context(|| {
                    format!("{} is neither a config nor parameters", path.display())
                })?;
            let mut config = ExperimentConfig::new(kind);
            config.parameters = Some(parameters);
            return Ok(config);
        }
        None => {
            if let Some(map) = value.as_object_mut() {
                map.insert("kind".into(), expected);
            }
        }
    }
    Ok(ExperimentConfig::from_json(&value.to_string())?)
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let (kind, config_path, common) = match &cli.command {
        Command::Analyze(a) => (ExperimentKind::Analyze, Some(&a.config), &a.common),
        Command::Simulate(a) => (ExperimentKind::Simulate, Some(&a.config), &a.common),
        Command::Montecarlo(a) => (ExperimentKind::Montecarlo, Some(&a.config), &a.common),
        Command::Scaling(a) => (ExperimentKind::Scaling, Some(&a.config), &a.common),
        Command::VaccinateSweep(a) => (ExperimentKind::VaccinateSweep, Some(&a.config), &a.common),
        Command::Branching(a) => (ExperimentKind::Branching, Some(&a.config), &a.common),
        Command::Examples(a) => (ExperimentKind::Examples, a.config.as_ref(), &a.common),
    };
    let mut config = load_config(kind, config_path)?;
    if let Some(seed) = common.seed {
        config.base_seed = seed;
    }
    if let Some(out) = &common.out {
        config.output_dir = Some(out.clone());
    }
    let out = config
        .output_dir
        .clone()
        .context("no output directory: pass --out or set output_dir")?;

    let start = Instant::now();
    let output = run_experiment(&config, common.jobs)?;
    let manifest = write_outputs(
        &out,
        &config,
        &output,
        common.jobs,
        start.elapsed().as_secs_f64(),
    )?;
    if let Some((_, outcome)) = output
        .documents
        .iter()
        .find(|(name, _)| name == "outcome.json")
    {
        println!("{outcome}");
    }
    println!(
        "{}",
        serde_json::json!({
            "config_hash": manifest.config_hash,
            "output_dir": out,
            "partial": manifest.partial,
            "summary": manifest.summary,
        })
    );
    if manifest.partial {
        eprintln!("warning: attempt cap reached before the quota; table flagged partial");
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            match err.downcast_ref::<EpiError>() {
                Some(EpiError::Refused(_)) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}
