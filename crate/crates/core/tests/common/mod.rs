//! Shared generators and closed forms for the integration tests.
#![allow(dead_code)]

use epinet::analytics::EpidemicParameters;
use epinet::distributions::{DegreeModel, InfectiousPeriodModel};
use proptest::prelude::*;

pub fn degree_strategy() -> impl Strategy<Value = DegreeModel> {
    prop_oneof![
        (3u32..9).prop_map(|d| DegreeModel::regular(d).unwrap()),
        (1.5f64..8.0).prop_map(|l| DegreeModel::poisson(l).unwrap()),
        prop::collection::btree_map(1u32..13, 0.05f64..1.0, 2..5)
            .prop_map(|pairs| table_law(&pairs)),
        (3.2f64..5.0, 1u32..4, 20u32..200).prop_map(|(e, lo, hi)| DegreeModel::power_law(
            e,
            lo,
            Some(hi)
        )
        .unwrap()),
        (3.5f64..5.0, 2u32..4).prop_map(|(e, lo)| DegreeModel::power_law(e, lo, None).unwrap()),
    ]
}

pub fn period_strategy() -> impl Strategy<Value = InfectiousPeriodModel> {
    prop_oneof![
        (0.5f64..2.0).prop_map(|r| InfectiousPeriodModel::exponential(r).unwrap()),
        (0.3f64..3.0).prop_map(|d| InfectiousPeriodModel::constant(d).unwrap()),
        (0.5f64..2.0, 0.3f64..5.0)
            .prop_map(|(r, t0)| InfectiousPeriodModel::exponential_cutoff(r, t0).unwrap()),
        (0.5f64..4.0, 0.5f64..3.0).prop_map(|(k, r)| InfectiousPeriodModel::gamma(k, r).unwrap()),
        (2.5f64..6.0, 0.5f64..3.0).prop_map(|(a, s)| InfectiousPeriodModel::lomax(a, s).unwrap()),
    ]
}

pub fn parameters_strategy() -> impl Strategy<Value = EpidemicParameters> {
    (degree_strategy(), period_strategy(), 0.2f64..5.0)
        .prop_map(|(d, l, b)| EpidemicParameters::new(d, l, b).unwrap())
}

/// Markov family: exponential periods with rate `mu`.
pub fn markov_strategy() -> impl Strategy<Value = (EpidemicParameters, f64)> {
    let degree = prop_oneof![
        (3u32..9).prop_map(|d| DegreeModel::regular(d).unwrap()),
        (1.5f64..8.0).prop_map(|l| DegreeModel::poisson(l).unwrap()),
        prop::collection::btree_map(1u32..13, 0.05f64..1.0, 2..5)
            .prop_map(|pairs| table_law(&pairs)),
    ];
    (degree, 0.3f64..3.0, 0.2f64..5.0).prop_map(|(d, mu, beta)| {
        let l = InfectiousPeriodModel::exponential(mu).unwrap();
        (EpidemicParameters::new(d, l, beta).unwrap(), mu)
    })
}

pub fn table_law(weights: &std::collections::BTreeMap<u32, f64>) -> DegreeModel {
    let total: f64 = weights.values().sum();
    DegreeModel::table(weights.iter().map(|(&k, &w)| (k, w / total))).unwrap()
}

/// `E[(D~-1) x^(D~-2)]` summed term by term from the size-biased pmf.
pub fn weighted_excess_by_sum(d: &DegreeModel, x: f64) -> f64 {
    let kmax = d.max_degree().unwrap_or(400);
    (2..=kmax)
        .map(|k| d.size_biased_pmf(k) * (k - 1) as f64 * x.powi(k as i32 - 2))
        .sum()
}

/// `E[D~ - 1]` summed term by term.
pub fn excess_mean_by_sum(d: &DegreeModel) -> f64 {
    let kmax = d.max_degree().unwrap_or(400);
    (1..=kmax)
        .map(|k| d.size_biased_pmf(k) * (k - 1) as f64)
        .sum()
}

/// Smallest root of `E[(1 - ψ + ψ s)^(D~-1)] = s` by plain bisection on
/// `[0, 1 - 1e-9]`, where the map minus the identity changes sign exactly once.
pub fn qtilde_by_bisection(p: &EpidemicParameters) -> f64 {
    let psi = epinet::analytics::compute_psi(p);
    let h = |s: f64| epinet::analytics::qtilde_map(p, psi, s) - s;
    let (mut lo, mut hi) = (0.0, 1.0 - 1e-9);
    assert!(h(lo) > 0.0 && h(hi) < 0.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if h(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

pub fn regular4_markov() -> EpidemicParameters {
    EpidemicParameters::new(
        DegreeModel::regular(4).unwrap(),
        InfectiousPeriodModel::exponential(1.0).unwrap(),
        1.0,
    )
    .unwrap()
}
