//! Replicated hitting and extinction times of the branching approximations.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::table::{fmt_bool, fmt_opt, mean};
use super::{BranchingMode, BranchingPhase, ExperimentConfig, ExperimentOutput, ResultTable};
use crate::branching::{hitting_time_supercritical, simulate_cmj, CmjOptions, ReproductionLaw};
use crate::error::{EpiError, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BranchingRow {
    pub replicate: u64,
    pub seed: u64,
    pub k: u64,
    /// Hitting time of `k` alive particles, or extinction time from `k` ancestors.
    pub time: Option<f64>,
    /// Some particle was still alive at the end of the accepted run.
    pub survived: bool,
    pub truncated: bool,
    /// Attempts used (hitting mode: rejected extinct starts included).
    pub attempts: u32,
}

fn law_for(config: &ExperimentConfig) -> Result<ReproductionLaw> {
    let spec = config
        .branching
        .as_ref()
        .ok_or_else(|| EpiError::Config("missing `branching` block".into()))?;
    if let Some(law) = &spec.law {
        return Ok(law.clone());
    }
    let p = config.parameters()?;
    match spec.phase {
        BranchingPhase::Early => Ok(ReproductionLaw::early_phase(p)),
        BranchingPhase::Final => ReproductionLaw::final_phase(p),
    }
}

fn replicate(
    law: &ReproductionLaw,
    mode: BranchingMode,
    k: u64,
    replicate: u64,
    seed: u64,
    max_attempts: u32,
) -> Result<BranchingRow> {
    match mode {
        BranchingMode::Hitting => {
            let h = hitting_time_supercritical(law, k, seed, max_attempts)?;
            Ok(BranchingRow {
                replicate,
                seed,
                k,
                time: h.time,
                survived: h.time.is_some(),
                truncated: h.truncated_attempts > 0,
                attempts: h.attempts,
            })
        }
        BranchingMode::Extinction => {
            let ancestors = usize::try_from(k)
                .map_err(|_| EpiError::Config(format!("too many ancestors: {k}")))?;
            let trace = simulate_cmj(
                law,
                seed,
                &CmjOptions {
                    ancestors,
                    ..CmjOptions::default()
                },
            )?;
            Ok(BranchingRow {
                replicate,
                seed,
                k,
                time: trace.extinction_time,
                survived: !trace.extinct,
                truncated: trace.truncated,
                attempts: 1,
            })
        }
    }
}

/// `replicates` runs for every `k`; replicate `i` uses seed `base_seed + i`.
pub fn branching_experiment(
    config: &ExperimentConfig,
) -> Result<(ExperimentOutput, Vec<BranchingRow>)> {
    let spec = config
        .branching
        .as_ref()
        .ok_or_else(|| EpiError::Config("missing `branching` block".into()))?;
    let law = law_for(config)?;
    let rate = match spec.mode {
        BranchingMode::Hitting => law.growth_rate()?.value,
        BranchingMode::Extinction => law.decay_rate()?.value.abs(),
    };
    let mut rows = Vec::new();
    for &k in &spec.k {
        let batch = (0..config.replicates)
            .into_par_iter()
            .map(|i| replicate(&law, spec.mode, k, i, config.seed(i), spec.max_attempts))
            .collect::<Result<Vec<_>>>()?;
        rows.extend(batch);
    }

    let hash = config.hash();
    let mut table = ResultTable::new(
        "results.csv",
        &[
            "config_hash",
            "seed",
            "replicate",
            "k",
            "time",
            "survived",
            "truncated",
            "attempts",
        ],
    );
    for r in &rows {
        table.push(vec![
            hash.clone(),
            r.seed.to_string(),
            r.replicate.to_string(),
            r.k.to_string(),
            fmt_opt(r.time),
            fmt_bool(r.survived),
            fmt_bool(r.truncated),
            r.attempts.to_string(),
        ]);
    }
    let target = 1.0 / rate;
    let per_k: Vec<_> = spec
        .k
        .iter()
        .map(|&k| {
            let ratios: Vec<f64> = rows
                .iter()
                .filter(|r| r.k == k)
                .filter_map(|r| r.time)
                .map(|t| t / (k as f64).ln())
                .collect();
            let m = (!ratios.is_empty()).then(|| mean(&ratios));
            json!({
                "k": k,
                "completed": ratios.len(),
                "mean_ratio": m,
                "relative_error": m.map(|m| (m - target).abs() / target),
            })
        })
        .collect();
    let incomplete = rows.iter().any(|r| r.time.is_none());
    let output = ExperimentOutput {
        tables: vec![table],
        documents: Vec::new(),
        summary: json!({
            "mean_offspring": law.mean_offspring(),
            "rate": rate,
            "target_ratio": target,
            "per_k": per_k,
        }),
        partial: incomplete,
    };
    Ok((output, rows))
}
