//! Replicated epidemics conditioned on a major outbreak, and scaling studies.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::table::{fmt_bool, fmt_f64, fmt_opt, mean, ols_slope, quantile};
use super::{ExperimentConfig, ExperimentOutput, ExtinctionTarget, ResultTable};
use crate::analytics::{forward_extinction, summarize, EpidemicSummary, Regime};
use crate::error::{EpiError, Result};
use crate::sim::{
    neighbor_susceptibility_stats, run_epidemic, sample_degree_sequence, NeighborStats,
    SimulationOutcome,
};

/// Attempts dispatched together. Results past the quota-th major outbreak are
/// discarded, so the output does not depend on this value.
const BATCH: u64 = 32;

/// One simulated replicate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRow {
    pub replicate: u64,
    pub outcome: SimulationOutcome,
    /// Present for major outbreaks when the graph was completed.
    pub neighbors: Option<NeighborStats>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SizeBlock {
    pub n: usize,
    pub attempts: u64,
    pub majors: u64,
    /// Quota not met within the attempt cap.
    pub partial: bool,
    pub runs: Vec<RunRow>,
}

impl SizeBlock {
    pub fn major_runs(&self) -> impl Iterator<Item = &RunRow> {
        self.runs.iter().filter(|r| r.outcome.major)
    }

    pub fn major_frequency(&self) -> f64 {
        self.majors as f64 / self.attempts as f64
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloResult {
    pub config_hash: String,
    pub summary: EpidemicSummary,
    /// `1 -` extinction probability of the forward process from one initial infective.
    pub predicted_major_probability: f64,
    pub blocks: Vec<SizeBlock>,
}

impl MonteCarloResult {
    pub fn partial(&self) -> bool {
        self.blocks.iter().any(|b| b.partial)
    }

    pub fn into_output(self, config: &ExperimentConfig) -> ExperimentOutput {
        let runs = runs_table("results.csv", &self.config_hash, &self.blocks, config);
        let blocks: Vec<_> = self
            .blocks
            .iter()
            .map(|b| {
                let sf: Vec<f64> = b
                    .major_runs()
                    .map(|r| r.outcome.final_susceptible_fraction)
                    .collect();
                json!({
                    "n": b.n,
                    "attempts": b.attempts,
                    "majors": b.majors,
                    "rejected": b.attempts - b.majors,
                    "major_frequency": b.major_frequency(),
                    "mean_final_susceptible_fraction": (!sf.is_empty()).then(|| mean(&sf)),
                    "partial": b.partial,
                })
            })
            .collect();
        ExperimentOutput {
            partial: self.partial(),
            tables: vec![runs],
            documents: Vec::new(),
            summary: json!({
                "qstar": self.summary.qstar,
                "predicted_major_probability": self.predicted_major_probability,
                "sizes": blocks,
            }),
        }
    }
}

fn simulate_replicate(config: &ExperimentConfig, n: usize, replicate: u64) -> Result<RunRow> {
    let p = config.parameters()?;
    let seed = config.seed(replicate);
    let seq = sample_degree_sequence(&p.degree, n, seed)?;
    let run = run_epidemic(&seq, p.beta, &p.infectious_period, seed, &config.simulation)?;
    let neighbors = if run.outcome.major && run.graph.is_some() {
        neighbor_susceptibility_stats(&run).ok()
    } else {
        None
    };
    Ok(RunRow {
        replicate,
        outcome: run.outcome,
        neighbors,
    })
}

/// Replicates at one size. With a quota, attempts continue until that many
/// major outbreaks were seen or the cap is hit; otherwise `replicates` runs.
fn run_size(config: &ExperimentConfig, n: usize, quota: Option<u64>) -> Result<SizeBlock> {
    let cap = match quota {
        Some(q) => config.max_attempts.unwrap_or(20 * q),
        None => config.replicates,
    };
    let mut block = SizeBlock {
        n,
        attempts: 0,
        majors: 0,
        partial: false,
        runs: Vec::new(),
    };
    let mut next = 0;
    'batches: while next < cap {
        let end = (next + BATCH).min(cap);
        let batch = (next..end)
            .into_par_iter()
            .map(|i| simulate_replicate(config, n, i))
            .collect::<Result<Vec<_>>>()?;
        next = end;
        for row in batch {
            block.attempts += 1;
            block.majors += row.outcome.major as u64;
            block.runs.push(row);
            if quota.is_some_and(|q| block.majors >= q) {
                break 'batches;
            }
        }
    }
    block.partial = quota.is_some_and(|q| block.majors < q);
    Ok(block)
}

fn runs_table(
    name: &str,
    hash: &str,
    blocks: &[SizeBlock],
    config: &ExperimentConfig,
) -> ResultTable {
    let mut header = vec![
        "config_hash",
        "seed",
        "replicate",
        "n",
        "major",
        "infections",
        "final_susceptible_fraction",
        "t_strong",
        "t_weak",
        "t_weak_graph",
        "contacts",
        "wasted_contacts",
        "events",
        "p_ss",
    ];
    let gamma_names: Vec<String> = config
        .simulation
        .gamma_levels
        .iter()
        .map(|g| format!("t_gamma_{g}"))
        .collect();
    header.extend(gamma_names.iter().map(String::as_str));
    let mut table = ResultTable::new(name, &header);
    for block in blocks {
        for row in &block.runs {
            let o = &row.outcome;
            let mut cells = vec![
                hash.to_string(),
                o.seed.to_string(),
                row.replicate.to_string(),
                o.n.to_string(),
                fmt_bool(o.major),
                o.infections.to_string(),
                fmt_f64(o.final_susceptible_fraction),
                fmt_f64(o.t_strong),
                fmt_f64(o.t_weak),
                fmt_opt(o.t_weak_graph),
                o.contacts.to_string(),
                o.wasted_contacts.to_string(),
                o.events.to_string(),
                fmt_opt(row.neighbors.as_ref().map(|s| s.p_ss)),
            ];
            cells.extend(o.gamma_hitting_times.iter().map(|t| fmt_opt(*t)));
            table.push(cells);
        }
    }
    table
}

/// Replicated epidemics at every `n` of the config. Conditioning on a major
/// outbreak happens when `major_outbreaks` is set.
pub fn montecarlo(config: &ExperimentConfig) -> Result<MonteCarloResult> {
    let p = config.parameters()?;
    let summary = summarize(p)?;
    let predicted = if config.simulation.initial_infectives == 1 {
        forward_extinction(p)?.major_outbreak_probability()
    } else {
        f64::NAN
    };
    let blocks = config
        .n
        .iter()
        .map(|&n| run_size(config, n, config.major_outbreaks))
        .collect::<Result<Vec<_>>>()?;
    Ok(MonteCarloResult {
        config_hash: config.hash(),
        summary,
        predicted_major_probability: predicted,
        blocks,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingPoint {
    pub n: usize,
    pub runs: usize,
    pub attempts: u64,
    /// Mean of `T / ln n` over the major outbreaks.
    pub mean_ratio: f64,
    pub q10: f64,
    pub q90: f64,
    pub mean_time: f64,
    pub partial: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingResult {
    pub config_hash: String,
    pub target: ExtinctionTarget,
    /// `1/α′ + 1/|α*|`.
    pub analytic_target: f64,
    pub points: Vec<ScalingPoint>,
    /// OLS slope of the mean time against `ln n`.
    pub slope: f64,
    /// Distance of the per-n means to the target never increases with `n`.
    pub monotone: bool,
    /// Per-n mean of `(T* - T†) / ln n`.
    pub mean_gap_ratio: Vec<f64>,
    pub blocks: Vec<SizeBlock>,
}

impl ScalingResult {
    pub fn into_output(self, config: &ExperimentConfig) -> ExperimentOutput {
        let mut table = ResultTable::new(
            "results.csv",
            &[
                "config_hash",
                "seed",
                "target",
                "n",
                "ln_n",
                "runs",
                "attempts",
                "mean_ratio",
                "q10_ratio",
                "q90_ratio",
                "mean_time",
                "mean_gap_ratio",
                "analytic_target",
                "partial",
            ],
        );
        let target = match self.target {
            ExtinctionTarget::Weak => "weak",
            ExtinctionTarget::Strong => "strong",
        };
        for (pt, gap) in self.points.iter().zip(&self.mean_gap_ratio) {
            table.push(vec![
                self.config_hash.clone(),
                config.base_seed.to_string(),
                target.into(),
                pt.n.to_string(),
                fmt_f64((pt.n as f64).ln()),
                pt.runs.to_string(),
                pt.attempts.to_string(),
                fmt_f64(pt.mean_ratio),
                fmt_f64(pt.q10),
                fmt_f64(pt.q90),
                fmt_f64(pt.mean_time),
                fmt_f64(*gap),
                fmt_f64(self.analytic_target),
                fmt_bool(pt.partial),
            ]);
        }
        let runs = runs_table("runs.csv", &self.config_hash, &self.blocks, config);
        ExperimentOutput {
            partial: self.points.iter().any(|p| p.partial),
            tables: vec![table, runs],
            documents: Vec::new(),
            summary: json!({
                "target": target,
                "analytic_target": self.analytic_target,
                "slope": self.slope,
                "slope_relative_error": (self.slope - self.analytic_target).abs() / self.analytic_target,
                "monotone": self.monotone,
            }),
        }
    }
}

/// Checks that a scaling claim is supported by the model: `R0 > 1`, and for the
/// strong extinction time also `|α*| <= r(L)`, without which `T*/ln n` does not
/// converge to `1/α′ + 1/|α*|`.
pub fn check_scaling_claim(summary: &EpidemicSummary, target: ExtinctionTarget) -> Result<()> {
    if summary.regime != Regime::Supercritical {
        return Err(EpiError::Refused(format!(
            "scaling needs a supercritical model, R0 = {}",
            summary.r0
        )));
    }
    if target == ExtinctionTarget::Strong && summary.tail_condition != Some(true) {
        return Err(EpiError::Refused(format!(
            "T*/ln n converges to 1/α′ + 1/|α*| if and only if |α*| <= r(L); here |α*| = {} and r(L) = {}. \
             Ask for the weak extinction time instead",
            summary.alpha_star.map_or(f64::NAN, f64::abs),
            summary.tail_rate
        )));
    }
    Ok(())
}

/// Collects the quota of major outbreaks at every `n` and compares the growth
/// of the extinction time with `ln n` to the analytic constant.
pub fn scaling_study(config: &ExperimentConfig) -> Result<ScalingResult> {
    let p = config.parameters()?;
    let summary = summarize(p)?;
    check_scaling_claim(&summary, config.target)?;
    let analytic_target = summary
        .duration_constant
        .ok_or_else(|| EpiError::UnsupportedRegime("no duration constant".into()))?;
    let quota = config.quota();
    let mut blocks = Vec::new();
    let mut points = Vec::new();
    let mut gaps = Vec::new();
    for &n in &config.n {
        let block = run_size(config, n, Some(quota))?;
        let ln_n = (n as f64).ln();
        let time = |o: &SimulationOutcome| match config.target {
            ExtinctionTarget::Weak => o.t_weak,
            ExtinctionTarget::Strong => o.t_strong,
        };
        let times: Vec<f64> = block.major_runs().map(|r| time(&r.outcome)).collect();
        let ratios: Vec<f64> = times.iter().map(|t| t / ln_n).collect();
        let gap: Vec<f64> = block
            .major_runs()
            .map(|r| (r.outcome.t_strong - r.outcome.t_weak) / ln_n)
            .collect();
        if times.is_empty() {
            return Err(EpiError::NoConvergence(format!(
                "no major outbreak in {} attempts at n = {n}",
                block.attempts
            )));
        }
        points.push(ScalingPoint {
            n,
            runs: times.len(),
            attempts: block.attempts,
            mean_ratio: mean(&ratios),
            q10: quantile(&ratios, 0.1),
            q90: quantile(&ratios, 0.9),
            mean_time: mean(&times),
            partial: block.partial,
        });
        gaps.push(mean(&gap));
        blocks.push(block);
    }
    let ln_ns: Vec<f64> = points.iter().map(|p| (p.n as f64).ln()).collect();
    let means: Vec<f64> = points.iter().map(|p| p.mean_time).collect();
    let slope = ols_slope(&ln_ns, &means);
    let mut sorted: Vec<&ScalingPoint> = points.iter().collect();
    sorted.sort_by_key(|p| p.n);
    let monotone = sorted.windows(2).all(|w| {
        (w[1].mean_ratio - analytic_target).abs() <= (w[0].mean_ratio - analytic_target).abs()
    });
    Ok(ScalingResult {
        config_hash: config.hash(),
        target: config.target,
        analytic_target,
        points,
        slope,
        monotone,
        mean_gap_ratio: gaps,
        blocks,
    })
}
