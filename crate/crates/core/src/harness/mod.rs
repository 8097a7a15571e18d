//! Seeded experiments: JSON configuration in, CSV tables and a JSON manifest out.
//!
//! Replicate `i` always runs on seed `base_seed + i`, and rows are assembled in
//! replicate order, so tables are byte-identical whatever the worker count.

mod branching_exp;
mod examples;
mod montecarlo;
mod sweeps;
pub mod table;

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::analytics::EpidemicParameters;
use crate::branching::ReproductionLaw;
use crate::error::{EpiError, Result};
use crate::sim::SimulationOptions;

pub use branching_exp::{branching_experiment, BranchingRow};
pub use examples::{
    example1_grid, example1_parameters, example3_parameters, example_suite, EXAMPLE1_LAMBDA,
    EXAMPLE3_CUTOFF,
};
pub use montecarlo::{
    check_scaling_claim, montecarlo, scaling_study, MonteCarloResult, RunRow, ScalingPoint,
    ScalingResult, SizeBlock,
};
pub use sweeps::{analyze, simulate, vaccinate_sweep};
pub use table::ResultTable;

/// Default quota of major outbreaks per system size.
pub const DEFAULT_MAJOR_QUOTA: u64 = 50;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Analyze,
    Simulate,
    Montecarlo,
    Scaling,
    VaccinateSweep,
    Branching,
    Examples,
}

/// Which extinction time a scaling study measures.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExtinctionTarget {
    /// `T†`, no infectious-susceptible pairs left.
    #[default]
    Weak,
    /// `T*`, no infectious vertices left.
    Strong,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BranchingMode {
    /// Time for one ancestor to reach `k` alive particles, conditioned on getting there.
    #[default]
    Hitting,
    /// Time for `k` ancestors to die out.
    Extinction,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BranchingPhase {
    /// Forward process of the early epidemic.
    #[default]
    Early,
    /// Subcritical process of the final phase.
    Final,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BranchingSpec {
    pub mode: BranchingMode,
    /// Explicit law; otherwise derived from the epidemic parameters and `phase`.
    #[serde(default)]
    pub law: Option<ReproductionLaw>,
    #[serde(default)]
    pub phase: BranchingPhase,
    pub k: Vec<u64>,
    #[serde(default = "default_branching_attempts")]
    pub max_attempts: u32,
}

fn default_branching_attempts() -> u32 {
    1000
}

fn default_n() -> Vec<usize> {
    vec![1000]
}

fn default_replicates() -> u64 {
    1
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    #[serde(default)]
    pub parameters: Option<EpidemicParameters>,
    #[serde(default = "default_n")]
    pub n: Vec<usize>,
    /// Replicates (montecarlo without quota, branching).
    #[serde(default = "default_replicates")]
    pub replicates: u64,
    /// Major outbreaks to collect per `n` (montecarlo, scaling).
    #[serde(default)]
    pub major_outbreaks: Option<u64>,
    /// Attempts per `n` before giving up on the quota; defaults to `20 ×` quota.
    #[serde(default)]
    pub max_attempts: Option<u64>,
    #[serde(default)]
    pub base_seed: u64,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub simulation: SimulationOptions,
    /// Extinction time measured by a scaling study.
    #[serde(default)]
    pub target: ExtinctionTarget,
    /// Vaccination levels `c` for a sweep.
    #[serde(default)]
    pub coverages: Vec<f64>,
    #[serde(default)]
    pub branching: Option<BranchingSpec>,
}

impl ExperimentConfig {
    pub fn new(kind: ExperimentKind) -> Self {
        ExperimentConfig {
            kind,
            parameters: None,
            n: default_n(),
            replicates: default_replicates(),
            major_outbreaks: None,
            max_attempts: None,
            base_seed: 0,
            output_dir: None,
            simulation: SimulationOptions::default(),
            target: ExtinctionTarget::Weak,
            coverages: Vec::new(),
            branching: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let config: ExperimentConfig = serde_json::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        let needs_parameters = !matches!(self.kind, ExperimentKind::Examples)
            && !(self.kind == ExperimentKind::Branching
                && self.branching.as_ref().is_some_and(|b| b.law.is_some()));
        if needs_parameters && self.parameters.is_none() {
            return Err(EpiError::Config(format!(
                "{:?} needs `parameters`",
                self.kind
            )));
        }
        if matches!(
            self.kind,
            ExperimentKind::Simulate | ExperimentKind::Montecarlo | ExperimentKind::Scaling
        ) {
            if self.n.is_empty() {
                return Err(EpiError::Config("`n` must list at least one size".into()));
            }
            if let Some(&bad) = self.n.iter().find(|&&n| n < 2) {
                return Err(EpiError::Config(format!("n must be at least 2, got {bad}")));
            }
        }
        if self.replicates == 0 {
            return Err(EpiError::Config("replicates must be at least 1".into()));
        }
        if self.major_outbreaks == Some(0) {
            return Err(EpiError::Config(
                "major_outbreaks must be at least 1".into(),
            ));
        }
        if self.kind == ExperimentKind::Scaling && self.n.len() < 2 {
            return Err(EpiError::Config(
                "a scaling study needs at least two sizes".into(),
            ));
        }
        if self.kind == ExperimentKind::VaccinateSweep && self.coverages.is_empty() {
            return Err(EpiError::Config(
                "a vaccination sweep needs `coverages`".into(),
            ));
        }
        if self.kind == ExperimentKind::Branching {
            let spec = self
                .branching
                .as_ref()
                .ok_or_else(|| EpiError::Config("branching needs a `branching` block".into()))?;
            if spec.k.is_empty() || spec.k.contains(&0) {
                return Err(EpiError::Config(
                    "branching `k` must be non-empty and positive".into(),
                ));
            }
        }
        Ok(())
    }

    pub fn parameters(&self) -> Result<&EpidemicParameters> {
        self.parameters
            .as_ref()
            .ok_or_else(|| EpiError::Config("missing `parameters`".into()))
    }

    /// Seed of replicate `index`.
    pub fn seed(&self, index: u64) -> u64 {
        self.base_seed.wrapping_add(index)
    }

    pub fn quota(&self) -> u64 {
        self.major_outbreaks.unwrap_or(DEFAULT_MAJOR_QUOTA)
    }

    /// First 16 hex digits of the SHA-256 of the canonical JSON encoding.
    /// The output directory is not part of the experiment and is left out.
    pub fn hash(&self) -> String {
        let mut canonical = self.clone();
        canonical.output_dir = None;
        let bytes = serde_json::to_vec(&canonical).expect("config serializes");
        hex::encode(&Sha256::digest(&bytes)[..8])
    }
}

/// What an experiment produced, before it is written to disk.
#[derive(Clone, Debug)]
pub struct ExperimentOutput {
    pub tables: Vec<ResultTable>,
    /// Extra JSON documents (file name, content), written on one line each.
    pub documents: Vec<(String, serde_json::Value)>,
    /// Experiment-level statistics echoed into the manifest.
    pub summary: serde_json::Value,
    /// The attempt cap was hit before the quota was met.
    pub partial: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub config_hash: String,
    pub config: ExperimentConfig,
    pub outputs: Vec<String>,
    pub partial: bool,
    pub summary: serde_json::Value,
    pub jobs: Option<usize>,
    pub wall_time_seconds: f64,
}

/// Runs the experiment on `jobs` worker threads (all cores when `None`).
pub fn run_experiment(config: &ExperimentConfig, jobs: Option<usize>) -> Result<ExperimentOutput> {
    config.validate()?;
    let run = || match config.kind {
        ExperimentKind::Analyze => analyze(config),
        ExperimentKind::Simulate => simulate(config),
        ExperimentKind::Montecarlo => montecarlo(config).map(|r| r.into_output(config)),
        ExperimentKind::Scaling => scaling_study(config).map(|r| r.into_output(config)),
        ExperimentKind::VaccinateSweep => vaccinate_sweep(config),
        ExperimentKind::Branching => branching_experiment(config).map(|(out, _)| out),
        ExperimentKind::Examples => example_suite(config),
    };
    match jobs {
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k.max(1))
            .build()
            .map_err(|e| EpiError::Config(format!("thread pool: {e}")))?
            .install(run),
        None => run(),
    }
}

/// Writes every table and document plus `manifest.json` into `dir`.
pub fn write_outputs(
    dir: &Path,
    config: &ExperimentConfig,
    output: &ExperimentOutput,
    jobs: Option<usize>,
    wall_time_seconds: f64,
) -> Result<Manifest> {
    std::fs::create_dir_all(dir)?;
    let mut outputs = Vec::new();
    for table in &output.tables {
        table.write(dir)?;
        outputs.push(table.name.clone());
    }
    for (name, doc) in &output.documents {
        std::fs::write(dir.join(name), serde_json::to_string(doc)? + "\n")?;
        outputs.push(name.clone());
    }
    let manifest = Manifest {
        tool: "epinet".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        config_hash: config.hash(),
        config: config.clone(),
        outputs,
        partial: output.partial,
        summary: output.summary.clone(),
        jobs,
        wall_time_seconds,
    };
    std::fs::write(
        dir.join("manifest.json"),
        serde_json::to_string_pretty(&manifest)? + "\n",
    )?;
    Ok(manifest)
}
