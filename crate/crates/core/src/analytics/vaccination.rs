//! All-or-nothing vaccination and its uniform-mixing limit.

use serde::{Deserialize, Serialize};

use super::{
    lambert_w0, solve_decay, solve_growth, summarize, DecayRate, EpidemicParameters,
    EpidemicSummary, MalthusianKernel, RootSolution,
};
use crate::distributions::InfectiousPeriodModel;
use crate::error::{EpiError, Result};

/// Summary for the degree law seen by the epidemic when each vertex stays
/// susceptible with probability `c`.
pub fn vaccinated_summary(p: &EpidemicParameters, c: f64) -> Result<EpidemicSummary> {
    summarize(&p.with_degree(p.degree.vaccinate(c)?))
}

/// `d(c q~*_c)/dc = q~*_c (cλψ - 1) / (cλψ q~*_c - 1)` for Poisson(λ) degrees.
pub fn poisson_vaccination_derivative(lambda: f64, psi: f64, c: f64, qtilde_c: f64) -> f64 {
    let m = c * lambda * psi;
    qtilde_c * (m - 1.0) / (m * qtilde_c - 1.0)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UniformMixingLimit {
    /// `x = c β′ E[L]`.
    pub x: f64,
    pub qtilde_star: f64,
    pub alpha_prime: RootSolution,
    pub alpha_star: DecayRate,
}

/// Limit of the vaccinated Poisson(λ) model with `β = β′/λ` as `λ → inf`:
/// `q~* = -W0(-x e^(-x)) / x`, and the two rates solve
/// `1 = c β′ ∫ e^(-α t) P(L > t) dt` and `1 = c β′ q~* ∫ e^(-α t) P(L > t) dt`.
pub fn uniform_mixing_limit(
    beta_prime: f64,
    period: &InfectiousPeriodModel,
    c: f64,
) -> Result<UniformMixingLimit> {
    if !(c > 0.0 && c <= 1.0) {
        return Err(EpiError::Domain(format!(
            "vaccination level must lie in (0, 1], got {c}"
        )));
    }
    if !(beta_prime > 0.0 && beta_prime.is_finite()) {
        return Err(EpiError::InvalidModel(format!(
            "contact rate must be positive, got {beta_prime}"
        )));
    }
    let x = c * beta_prime * period.mean();
    if !(x > 1.0) {
        return Err(EpiError::UnsupportedRegime(format!(
            "uniform-mixing limit needs c β′ E[L] > 1, got {x}"
        )));
    }
    let qtilde_star = if x.is_infinite() {
        0.0
    } else {
        -lambert_w0(-x * (-x).exp())? / x
    };
    let alpha_prime = solve_growth(MalthusianKernel {
        weight: c * beta_prime,
        shift: 0.0,
        period,
    })?;
    let alpha_star = solve_decay(MalthusianKernel {
        weight: c * beta_prime * qtilde_star,
        shift: 0.0,
        period,
    })?;
    Ok(UniformMixingLimit {
        x,
        qtilde_star,
        alpha_prime,
        alpha_star,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytics::{compute_psi, Regime};
    use crate::distributions::DegreeModel;

    #[test]
    fn full_coverage_is_the_identity() {
        let p = EpidemicParameters::new(
            DegreeModel::poisson(4.0).unwrap(),
            InfectiousPeriodModel::gamma(2.0, 2.0).unwrap(),
            0.7,
        )
        .unwrap();
        assert_eq!(vaccinated_summary(&p, 1.0).unwrap(), summarize(&p).unwrap());
        assert!(vaccinated_summary(&p, 0.0).is_err());
    }

    #[test]
    fn low_coverage_is_subcritical() {
        let p = EpidemicParameters::new(
            DegreeModel::poisson(4.0).unwrap(),
            InfectiousPeriodModel::exponential(1.0).unwrap(),
            1.0,
        )
        .unwrap();
        // c λ ψ = 0.4 · 4 · 0.5 < 1
        assert_eq!(
            vaccinated_summary(&p, 0.4).unwrap().regime,
            Regime::Subcritical
        );
    }

    #[test]
    fn markov_uniform_mixing_closed_forms() {
        let period = InfectiousPeriodModel::exponential(1.0).unwrap();
        let lim = uniform_mixing_limit(2.0, &period, 1.0).unwrap();
        assert_eq!(lim.x, 2.0);
        // q = exp(-2 (1 - q))
        let q = lim.qtilde_star;
        assert!((q - (-2.0 * (1.0 - q)).exp()).abs() < 1e-13);
        assert!((lim.alpha_prime.value - 1.0).abs() < 1e-11);
        assert!((lim.alpha_star.value - (2.0 * q - 1.0)).abs() < 1e-11);
        assert!(uniform_mixing_limit(0.9, &period, 1.0).is_err());
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let period = InfectiousPeriodModel::exponential(1.0).unwrap();
        let base =
            EpidemicParameters::new(DegreeModel::poisson(5.0).unwrap(), period, 1.0).unwrap();
        let psi = compute_psi(&base);
        let cq = |c: f64| c * vaccinated_summary(&base, c).unwrap().qtilde_star;
        let c = 0.8;
        let h = 1e-5;
        let fd = (cq(c + h) - cq(c - h)) / (2.0 * h);
        let q = vaccinated_summary(&base, c).unwrap().qtilde_star;
        assert!((fd - poisson_vaccination_derivative(5.0, psi, c, q)).abs() < 1e-6);
    }
}
