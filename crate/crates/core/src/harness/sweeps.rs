//! Single analyses, single simulations and vaccination sweeps.

use serde_json::json;

use super::table::{fmt_bool, fmt_f64, fmt_opt};
use super::{ExperimentConfig, ExperimentOutput, ResultTable};
use crate::analytics::{summarize, vaccinated_summary, EpidemicSummary, Regime};
use crate::error::{EpiError, Result};
use crate::sim::{run_epidemic, sample_degree_sequence, EventKind};

const SUMMARY_COLUMNS: [&str; 12] = [
    "regime",
    "psi",
    "r0",
    "qtilde_star",
    "q",
    "qstar",
    "r0_star",
    "alpha_prime",
    "alpha_star",
    "alpha_star_is_malthusian",
    "duration_constant",
    "tail_condition",
];

fn regime_name(r: Regime) -> &'static str {
    match r {
        Regime::Subcritical => "subcritical",
        Regime::Critical => "critical",
        Regime::Supercritical => "supercritical",
    }
}

fn summary_cells(s: &EpidemicSummary) -> Vec<String> {
    vec![
        regime_name(s.regime).into(),
        fmt_f64(s.psi),
        fmt_f64(s.r0),
        fmt_f64(s.qtilde_star),
        fmt_f64(s.q),
        fmt_f64(s.qstar),
        fmt_f64(s.r0_star),
        fmt_opt(s.alpha_prime),
        fmt_opt(s.alpha_star),
        s.alpha_star_is_malthusian.map(fmt_bool).unwrap_or_default(),
        fmt_opt(s.duration_constant),
        s.tail_condition.map(fmt_bool).unwrap_or_default(),
    ]
}

fn summary_table(
    rows: &[(Option<f64>, &EpidemicSummary)],
    config: &ExperimentConfig,
) -> ResultTable {
    let mut header = vec!["config_hash", "seed", "coverage"];
    header.extend(SUMMARY_COLUMNS);
    let mut table = ResultTable::new("results.csv", &header);
    let hash = config.hash();
    for (c, s) in rows {
        let mut cells = vec![hash.clone(), config.base_seed.to_string(), fmt_opt(*c)];
        cells.extend(summary_cells(s));
        table.push(cells);
    }
    table
}

/// Analytic summary of the configured parameters.
pub fn analyze(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    let summary = summarize(config.parameters()?)?;
    let value = serde_json::to_value(&summary)?;
    Ok(ExperimentOutput {
        tables: vec![summary_table(&[(None, &summary)], config)],
        documents: vec![("summary.json".into(), value.clone())],
        summary: value,
        partial: false,
    })
}

/// Summary at every vaccination level of the config. Levels that make the
/// epidemic subcritical give a labelled row rather than an error.
pub fn vaccinate_sweep(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    let p = config.parameters()?;
    let summaries = config
        .coverages
        .iter()
        .map(|&c| vaccinated_summary(p, c))
        .collect::<Result<Vec<_>>>()?;
    let rows: Vec<_> = config
        .coverages
        .iter()
        .map(|&c| Some(c))
        .zip(&summaries)
        .collect();
    let critical = config
        .coverages
        .iter()
        .zip(&summaries)
        .filter(|(_, s)| s.regime == Regime::Supercritical)
        .map(|(&c, _)| c)
        .reduce(f64::min);
    Ok(ExperimentOutput {
        tables: vec![summary_table(&rows, config)],
        documents: Vec::new(),
        summary: json!({ "smallest_supercritical_coverage": critical }),
        partial: false,
    })
}

fn event_name(kind: EventKind) -> &'static str {
    match kind {
        EventKind::Infection => "infection",
        EventKind::Recovery => "recovery",
        EventKind::WastedContact => "wasted_contact",
    }
}

/// One epidemic at `n[0]` on seed `base_seed`, with optional event log and
/// infection tree.
pub fn simulate(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    if config.n.len() != 1 || config.replicates != 1 {
        return Err(EpiError::Config(
            "simulate runs a single epidemic: give one n and one replicate (use montecarlo for more)".into(),
        ));
    }
    let p = config.parameters()?;
    let n = config.n[0];
    let seed = config.seed(0);
    let hash = config.hash();
    let seq = sample_degree_sequence(&p.degree, n, seed)?;
    let run = run_epidemic(&seq, p.beta, &p.infectious_period, seed, &config.simulation)?;
    let o = &run.outcome;

    let mut results = ResultTable::new(
        "results.csv",
        &[
            "config_hash",
            "seed",
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
        ],
    );
    results.push(vec![
        hash.clone(),
        seed.to_string(),
        n.to_string(),
        fmt_bool(o.major),
        o.infections.to_string(),
        fmt_f64(o.final_susceptible_fraction),
        fmt_f64(o.t_strong),
        fmt_f64(o.t_weak),
        fmt_opt(o.t_weak_graph),
        o.contacts.to_string(),
        o.wasted_contacts.to_string(),
        o.events.to_string(),
    ]);
    let mut tables = vec![results];

    if let Some(events) = &run.events {
        let mut t = ResultTable::new(
            "events.csv",
            &[
                "config_hash",
                "seed",
                "t",
                "event_type",
                "vertex",
                "half_edge",
                "partner",
                "susceptible",
                "infectious",
                "recovered",
                "x",
            ],
        );
        for e in events {
            t.push(vec![
                hash.clone(),
                seed.to_string(),
                fmt_f64(e.t),
                event_name(e.event_type).into(),
                e.vertex.to_string(),
                e.half_edge.map(|h| h.to_string()).unwrap_or_default(),
                e.partner.map(|h| h.to_string()).unwrap_or_default(),
                e.susceptible.to_string(),
                e.infectious.to_string(),
                e.recovered.to_string(),
                e.x.to_string(),
            ]);
        }
        tables.push(t);
    }
    if let Some(vertices) = &run.vertices {
        let mut t = ResultTable::new(
            "tree.csv",
            &[
                "config_hash",
                "seed",
                "vertex",
                "infector",
                "sigma",
                "period",
                "retirement",
                "degree",
            ],
        );
        for v in vertices {
            t.push(vec![
                hash.clone(),
                seed.to_string(),
                v.vertex.to_string(),
                v.infector.map(|i| i.to_string()).unwrap_or_default(),
                fmt_f64(v.sigma),
                fmt_f64(v.period),
                fmt_f64(v.retirement),
                v.degree.to_string(),
            ]);
        }
        tables.push(t);
    }
    let outcome = json!({ "config_hash": hash, "config": config, "outcome": o });
    Ok(ExperimentOutput {
        tables,
        documents: vec![("outcome.json".into(), outcome)],
        summary: json!({ "major": o.major, "infections": o.infections }),
        partial: false,
    })
}
