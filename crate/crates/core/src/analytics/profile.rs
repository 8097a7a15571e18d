//! Degree structure of the vertices that are never infected.

use serde::{Deserialize, Serialize};

use super::{compute_q, final_phase_weight, EpidemicParameters};
use crate::error::Result;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SusceptibleProfile {
    /// `p*_k = p_k Q^k / E[Q^D]`, indexed by degree.
    pub pmf: Vec<f64>,
    /// `p~*_k = k p*_k / E[D*]`.
    pub size_biased_pmf: Vec<f64>,
    /// Fraction of the neighbours of never-infected vertices that are never infected, `q~* / Q`.
    pub p_ss: f64,
    /// `E[D~* - 1] = Q G''(Q) / G'(Q)`.
    pub excess_mean: f64,
    /// `E[(D~-1) Q^(D~-2)]`; equals `excess_mean · p_ss`.
    pub final_phase_weight: f64,
}

/// Degree law of the never-infected vertices given the extinction probability `q~*`.
pub fn susceptible_degree_profile(
    p: &EpidemicParameters,
    qtilde: f64,
) -> Result<SusceptibleProfile> {
    let q = compute_q(p, qtilde);
    let pmf = p.degree.tilted_pmf(q)?;
    let mean: f64 = pmf.iter().enumerate().map(|(k, w)| k as f64 * w).sum();
    let size_biased_pmf = pmf
        .iter()
        .enumerate()
        .map(|(k, w)| if mean > 0.0 { k as f64 * w / mean } else { 0.0 })
        .collect();
    let g1 = p.degree.pgf_derivative(1, q)?;
    let g2 = p.degree.pgf_derivative(2, q)?;
    let excess_mean = if g1 > 0.0 { q * g2 / g1 } else { 0.0 };
    let p_ss = if q > 0.0 { qtilde / q } else { 0.0 };
    Ok(SusceptibleProfile {
        pmf,
        size_biased_pmf,
        p_ss,
        excess_mean,
        final_phase_weight: final_phase_weight(p, qtilde),
    })
}
