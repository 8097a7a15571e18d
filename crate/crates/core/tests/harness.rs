mod common;

use epinet::analytics::{compute_r0, forward_extinction, summarize, EpidemicParameters, Regime};
use epinet::distributions::{DegreeModel, InfectiousPeriodModel};
use epinet::harness::*;
use epinet::EpiError;
use proptest::prelude::*;

fn config(kind: ExperimentKind, p: EpidemicParameters) -> ExperimentConfig {
    let mut c = ExperimentConfig::new(kind);
    c.parameters = Some(p);
    c
}

fn read_dir(dir: &std::path::Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "csv"))
        .map(|p| {
            (
                p.file_name().unwrap().to_string_lossy().into_owned(),
                std::fs::read(&p).unwrap(),
            )
        })
        .collect();
    files.sort();
    files
}

#[test]
fn tables_do_not_depend_on_thread_count() {
    let mut c = config(ExperimentKind::Montecarlo, common::regular4_markov());
    c.n = vec![500, 1500];
    c.major_outbreaks = Some(40);
    c.base_seed = 77;
    c.simulation.gamma_levels = vec![0.5];
    let serial = tempfile::tempdir().unwrap();
    let parallel = tempfile::tempdir().unwrap();
    let a = run_experiment(&c, Some(1)).unwrap();
    write_outputs(serial.path(), &c, &a, Some(1), 0.0).unwrap();
    let b = run_experiment(&c, Some(3)).unwrap();
    write_outputs(parallel.path(), &c, &b, Some(3), 0.0).unwrap();
    assert_eq!(read_dir(serial.path()), read_dir(parallel.path()));
    assert!(!a.partial);
}

#[test]
fn quota_stops_at_the_quota() {
    let mut c = config(ExperimentKind::Montecarlo, common::regular4_markov());
    c.n = vec![800];
    c.major_outbreaks = Some(25);
    let result = montecarlo(&c).unwrap();
    let block = &result.blocks[0];
    assert_eq!(block.majors, 25);
    assert!(block.runs.last().unwrap().outcome.major);
    assert_eq!(block.runs.len() as u64, block.attempts);
    let seeds: Vec<u64> = block.runs.iter().map(|r| r.outcome.seed).collect();
    assert_eq!(seeds, (0..block.attempts).collect::<Vec<_>>());
}

#[test]
fn attempt_cap_flags_partial() {
    let mut c = config(ExperimentKind::Montecarlo, common::regular4_markov());
    c.n = vec![300];
    c.major_outbreaks = Some(1000);
    c.max_attempts = Some(50);
    let result = montecarlo(&c).unwrap();
    assert!(result.partial());
    assert_eq!(result.blocks[0].attempts, 50);
    let out = run_experiment(&c, None).unwrap();
    assert!(out.partial);
}

fn subcritical(mu: f64) -> EpidemicParameters {
    EpidemicParameters::new(
        DegreeModel::regular(4).unwrap(),
        InfectiousPeriodModel::exponential(mu).unwrap(),
        1.0,
    )
    .unwrap()
}

#[test]
fn subcritical_models_have_no_major_outbreaks() {
    // R0 = 3 · 1/30. Closer to criticality the ln n flag also catches minor
    // outbreaks: about 1 in 1000 runs at R0 = 0.3.
    let p = subcritical(29.0);
    assert_eq!(summarize(&p).unwrap().regime, Regime::Subcritical);
    let mut c = config(ExperimentKind::Montecarlo, p);
    c.n = vec![100_000];
    c.replicates = 10_000;
    let result = montecarlo(&c).unwrap();
    assert_eq!(result.blocks[0].attempts, 10_000);
    assert_eq!(result.blocks[0].majors, 0);
    assert_eq!(result.predicted_major_probability, 0.0);
}

#[test]
fn near_critical_outbreaks_stay_small() {
    // R0 = 3/4: the ln n flag catches some minor outbreaks, none of them
    // anywhere near linear size.
    let mut c = config(ExperimentKind::Montecarlo, subcritical(3.0));
    c.n = vec![100_000];
    c.replicates = 2000;
    let result = montecarlo(&c).unwrap();
    let largest = result.blocks[0]
        .runs
        .iter()
        .map(|r| r.outcome.infections)
        .max()
        .unwrap();
    assert!(largest < 1000, "{largest}");
}

#[test]
fn major_frequency_matches_forward_extinction() {
    // Exp(1) periods and β = 1: a vertex with j onward edges infects
    // (1 - s^(j+1)) / ((j+1)(1 - s)) in pgf, i.e. uniformly 0..=j.
    let uniform_pgf = |j: i32, s: f64| (0..=j).map(|i| s.powi(i)).sum::<f64>() / (j + 1) as f64;
    let mut xi = 0.0;
    for _ in 0..10_000 {
        xi = uniform_pgf(3, xi);
    }
    let oracle = 1.0 - uniform_pgf(4, xi);
    let p = common::regular4_markov();
    let computed = forward_extinction(&p).unwrap().major_outbreak_probability();
    assert!((computed - oracle).abs() < 1e-10, "{computed} vs {oracle}");

    let mut c = config(ExperimentKind::Montecarlo, p);
    c.n = vec![20_000];
    c.replicates = 1500;
    c.base_seed = 1;
    let result = montecarlo(&c).unwrap();
    let freq = result.blocks[0].major_frequency();
    assert!((freq - oracle).abs() <= 0.03, "{freq} vs {oracle}");
}

#[test]
fn strong_scaling_on_violating_model_is_refused() {
    // β = 3 with Exp(1): |α*| exceeds r(L) = 1.
    let p = EpidemicParameters::new(
        DegreeModel::regular(4).unwrap(),
        InfectiousPeriodModel::exponential(1.0).unwrap(),
        3.0,
    )
    .unwrap();
    let mut c = config(ExperimentKind::Scaling, p);
    c.n = vec![1000, 2000];
    c.target = ExtinctionTarget::Strong;
    match run_experiment(&c, None) {
        Err(EpiError::Refused(msg)) => assert!(msg.contains("weak")),
        other => panic!("expected refusal, got {other:?}"),
    }
    c.target = ExtinctionTarget::Weak;
    c.major_outbreaks = Some(3);
    assert!(run_experiment(&c, None).is_ok());
}

#[test]
fn tables_round_trip_through_csv() {
    let mut c = config(ExperimentKind::Montecarlo, common::regular4_markov());
    c.n = vec![400];
    c.replicates = 20;
    let out = run_experiment(&c, None).unwrap();
    let dir = tempfile::tempdir().unwrap();
    write_outputs(dir.path(), &c, &out, None, 0.0).unwrap();
    let table = &out.tables[0];
    let back = ResultTable::read(&dir.path().join(&table.name)).unwrap();
    assert_eq!(&back, table);
    assert_eq!(
        back.header[..5],
        ["config_hash", "seed", "replicate", "n", "major"]
    );
    assert!(back.rows.iter().all(|r| r[0] == c.hash()));
    let manifest: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["config_hash"], c.hash());
    assert_eq!(manifest["config"]["n"][0], 400);
}

#[test]
fn hash_tracks_the_experiment_not_the_destination() {
    let mut a = config(ExperimentKind::Montecarlo, common::regular4_markov());
    let mut b = a.clone();
    b.output_dir = Some("/tmp/elsewhere".into());
    assert_eq!(a.hash(), b.hash());
    a.base_seed = 1;
    assert_ne!(a.hash(), b.hash());
    assert_eq!(a.hash().len(), 16);
}

#[test]
fn vaccination_sweep_lists_every_coverage() {
    let mut c = config(ExperimentKind::VaccinateSweep, common::regular4_markov());
    c.coverages = vec![0.3, 0.6, 0.9, 1.0];
    let out = run_experiment(&c, None).unwrap();
    assert_eq!(out.tables[0].rows.len(), 4);
    let regime = out.tables[0].column("regime").unwrap();
    // Regular(4) at coverage c has R0 = 3c/2.
    assert_eq!(out.tables[0].rows[0][regime], "subcritical");
    assert_eq!(out.tables[0].rows[3][regime], "supercritical");
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 300, max_global_rejects: 100_000, ..ProptestConfig::default() })]

    #[test]
    fn refusal_is_exactly_condition_violation(p in common::parameters_strategy()) {
        prop_assume!(compute_r0(&p) > 1.01 && compute_r0(&p).is_finite());
        let s = summarize(&p).unwrap();
        let refused = matches!(
            check_scaling_claim(&s, ExtinctionTarget::Strong),
            Err(EpiError::Refused(_))
        );
        prop_assert_eq!(refused, s.tail_condition == Some(false));
        prop_assert!(check_scaling_claim(&s, ExtinctionTarget::Weak).is_ok());
    }
}
