//! Analytic quantities of the epidemic: transmission probability, reproduction
//! numbers, extinction probabilities, Malthusian parameters of the growth and
//! decay phases, and the duration constant `1/α′ + 1/|α*|`.

pub mod ext_real;
mod fixed_point;
mod lambert;
mod outbreak;
mod profile;
mod roots;
mod vaccination;

use serde::{Deserialize, Serialize};

use crate::distributions::{DegreeModel, InfectiousPeriodModel};
use crate::error::{EpiError, Result};

pub use fixed_point::{smallest_fixed_point, FixedPoint, FixedPointMethod};
pub use lambert::lambert_w0;
pub use outbreak::{forward_extinction, ForwardExtinction};
pub use profile::{susceptible_degree_profile, SusceptibleProfile};
pub use roots::{
    bisect_decreasing, solve_decay, solve_growth, DecayRate, MalthusianKernel, RootSolution,
    ROOT_TOL,
};
pub use vaccination::{
    poisson_vaccination_derivative, uniform_mixing_limit, vaccinated_summary, UniformMixingLimit,
};

/// `|R0 - 1|` below this is treated as critical.
pub const CRITICAL_BAND: f64 = 1e-8;

/// Degree law, infectious period and per-edge contact rate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParameters")]
pub struct EpidemicParameters {
    pub degree: DegreeModel,
    pub infectious_period: InfectiousPeriodModel,
    pub beta: f64,
}

#[derive(Deserialize)]
struct RawParameters {
    degree: DegreeModel,
    infectious_period: InfectiousPeriodModel,
    beta: f64,
}

impl TryFrom<RawParameters> for EpidemicParameters {
    type Error = EpiError;

    fn try_from(raw: RawParameters) -> Result<Self> {
        EpidemicParameters::new(raw.degree, raw.infectious_period, raw.beta)
    }
}

impl EpidemicParameters {
    pub fn new(
        degree: DegreeModel,
        infectious_period: InfectiousPeriodModel,
        beta: f64,
    ) -> Result<Self> {
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(EpiError::InvalidModel(format!(
                "contact rate must be positive and finite, got {beta}"
            )));
        }
        Ok(EpidemicParameters {
            degree,
            infectious_period,
            beta,
        })
    }

    pub fn with_degree(&self, degree: DegreeModel) -> Self {
        EpidemicParameters {
            degree,
            ..self.clone()
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Subcritical,
    Critical,
    Supercritical,
}

/// Solver bookkeeping reported alongside the summary.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverDiagnostics {
    pub qtilde: Option<FixedPoint>,
    pub alpha_prime: Option<RootSolution>,
    pub alpha_star: Option<DecayRate>,
    /// `g′(α′) - 1`.
    pub alpha_prime_certificate: Option<f64>,
    /// `g*(α*) - 1`, or the boundary limit minus one when no root exists.
    pub alpha_star_certificate: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpidemicSummary {
    pub regime: Regime,
    pub psi: f64,
    #[serde(with = "ext_real")]
    pub r0: f64,
    pub qtilde_star: f64,
    /// `Q = 1 - ψ + ψ q~*`.
    pub q: f64,
    pub qstar: f64,
    pub r0_star: f64,
    /// Tail rate of the infectious period.
    #[serde(with = "ext_real")]
    pub tail_rate: f64,
    #[serde(with = "ext_real::option")]
    pub alpha_prime: Option<f64>,
    #[serde(with = "ext_real")]
    pub alpha_dagger: f64,
    pub alpha_star: Option<f64>,
    pub alpha_star_is_malthusian: Option<bool>,
    #[serde(with = "ext_real::option")]
    pub duration_constant: Option<f64>,
    /// `|α*| <= r(L)`: needed for the strong extinction time to follow the duration constant.
    pub tail_condition: Option<bool>,
    pub diagnostics: SolverDiagnostics,
}

/// `ψ = Φ(0) = 1 - E[e^(-βL)]`.
pub fn compute_psi(p: &EpidemicParameters) -> f64 {
    p.infectious_period
        .contact_transform(p.beta, 0.0)
        .clamp(0.0, 1.0)
}

/// `R0 = ψ E[D~ - 1]`, `+inf` for infinite second moment.
pub fn compute_r0(p: &EpidemicParameters) -> f64 {
    let psi = compute_psi(p);
    if psi == 0.0 {
        0.0
    } else {
        psi * p.degree.excess_mean()
    }
}

/// `f(s) = E[(1 - ψ + ψ s)^(D~-1)]`.
pub fn qtilde_map(p: &EpidemicParameters, psi: f64, s: f64) -> f64 {
    p.degree
        .pgf_derivative_unchecked(1, (1.0 - psi + psi * s).clamp(0.0, 1.0))
        / p.degree.mean()
}

/// Smallest fixed point of `s = E[(1 - ψ + ψ s)^(D~-1)]`; one when `R0 <= 1`.
pub fn solve_qtilde_star(p: &EpidemicParameters) -> Result<FixedPoint> {
    if compute_r0(p) <= 1.0 {
        return Ok(FixedPoint {
            value: 1.0,
            iterations: 0,
            method: FixedPointMethod::Iteration,
        });
    }
    let psi = compute_psi(p);
    smallest_fixed_point(|s| qtilde_map(p, psi, s))
}

/// `Q = 1 - ψ + ψ q~*`.
pub fn compute_q(p: &EpidemicParameters, qtilde: f64) -> f64 {
    let psi = compute_psi(p);
    (1.0 - psi + psi * qtilde).clamp(0.0, 1.0)
}

/// `q* = E[Q^D]`, the limiting fraction never infected.
pub fn compute_qstar(p: &EpidemicParameters, qtilde: f64) -> f64 {
    p.degree.pgf_derivative_unchecked(0, compute_q(p, qtilde))
}

/// `E[(D~-1) Q^(D~-2)]`, the mean excess degree weighting of the final phase.
pub fn final_phase_weight(p: &EpidemicParameters, qtilde: f64) -> f64 {
    p.degree.pgf_derivative_unchecked(2, compute_q(p, qtilde)) / p.degree.mean()
}

/// `R0* = ψ E[(D~-1) Q^(D~-2)]`.
pub fn compute_r0_star(p: &EpidemicParameters, qtilde: f64) -> f64 {
    let psi = compute_psi(p);
    if psi == 0.0 {
        return 0.0;
    }
    psi * final_phase_weight(p, qtilde)
}

fn growth_kernel(p: &EpidemicParameters) -> MalthusianKernel<'_> {
    MalthusianKernel {
        weight: p.degree.excess_mean() * p.beta,
        shift: p.beta,
        period: &p.infectious_period,
    }
}

fn decay_kernel(p: &EpidemicParameters, qtilde: f64) -> MalthusianKernel<'_> {
    MalthusianKernel {
        weight: final_phase_weight(p, qtilde) * p.beta,
        shift: p.beta,
        period: &p.infectious_period,
    }
}

/// `g′(x) = E[D~-1] Φ(x)`.
pub fn g_prime(p: &EpidemicParameters, x: f64) -> f64 {
    growth_kernel(p).eval(x)
}

/// `g*(x) = E[(D~-1) Q^(D~-2)] Φ(x)`.
pub fn g_star(p: &EpidemicParameters, qtilde: f64, x: f64) -> f64 {
    decay_kernel(p, qtilde).eval(x)
}

/// `α† = -(β + r(L))`, the divergence abscissa of `g*`.
pub fn alpha_dagger(p: &EpidemicParameters) -> f64 {
    -(p.beta + p.infectious_period.tail_rate())
}

/// Growth rate: root of `g′(x) = 1`, `+inf` when `E[D~-1]` is infinite.
pub fn solve_alpha_prime(p: &EpidemicParameters) -> Result<RootSolution> {
    if compute_r0(p) <= 1.0 {
        return Err(EpiError::UnsupportedRegime(format!(
            "growth rate needs R0 > 1, got {}",
            compute_r0(p)
        )));
    }
    solve_growth(growth_kernel(p))
}

/// Decay rate `α* = inf{x : g*(x) < 1}` and whether `g*(α*) = 1`.
pub fn solve_alpha_star(p: &EpidemicParameters, qtilde: f64) -> Result<DecayRate> {
    if compute_r0(p) <= 1.0 {
        return Err(EpiError::UnsupportedRegime(format!(
            "decay rate needs R0 > 1, got {}",
            compute_r0(p)
        )));
    }
    solve_decay(decay_kernel(p, qtilde))
}

/// `∫ e^((|α*| - η) t) L(dt) < inf` for every `η ∈ (0, |α*|)`, i.e. `|α*| <= r(L)`.
pub fn check_tail_condition(p: &EpidemicParameters, alpha_star: f64) -> bool {
    alpha_star.abs() <= p.infectious_period.tail_rate()
}

/// `1/α′ + 1/|α*|`; `+inf` inside the critical band.
pub fn duration_constant(p: &EpidemicParameters) -> Result<f64> {
    let summary = summarize(p)?;
    summary.duration_constant.ok_or_else(|| {
        EpiError::UnsupportedRegime(format!(
            "duration constant needs R0 > 1, got {}",
            summary.r0
        ))
    })
}

fn combine_rates(alpha_prime: f64, alpha_star: f64) -> f64 {
    let growth = if alpha_prime.is_infinite() {
        0.0
    } else {
        1.0 / alpha_prime
    };
    growth + 1.0 / alpha_star.abs()
}

/// Every analytic quantity in one pass. Subcritical inputs give a labelled
/// summary with `q~* = 1` and no rates.
pub fn summarize(p: &EpidemicParameters) -> Result<EpidemicSummary> {
    let psi = compute_psi(p);
    let r0 = compute_r0(p);
    let regime = if (r0 - 1.0).abs() < CRITICAL_BAND {
        Regime::Critical
    } else if r0 < 1.0 {
        Regime::Subcritical
    } else {
        Regime::Supercritical
    };
    let mut summary = EpidemicSummary {
        regime,
        psi,
        r0,
        qtilde_star: 1.0,
        q: 1.0,
        qstar: 1.0,
        r0_star: r0,
        tail_rate: p.infectious_period.tail_rate(),
        alpha_prime: None,
        alpha_dagger: alpha_dagger(p),
        alpha_star: None,
        alpha_star_is_malthusian: None,
        duration_constant: (regime == Regime::Critical).then_some(f64::INFINITY),
        tail_condition: None,
        diagnostics: SolverDiagnostics {
            qtilde: None,
            alpha_prime: None,
            alpha_star: None,
            alpha_prime_certificate: None,
            alpha_star_certificate: None,
        },
    };
    if r0 <= 1.0 {
        return Ok(summary);
    }

    let fp = solve_qtilde_star(p)?;
    let qtilde = fp.value;
    summary.qtilde_star = qtilde;
    summary.q = compute_q(p, qtilde);
    summary.qstar = compute_qstar(p, qtilde);
    summary.r0_star = compute_r0_star(p, qtilde);
    summary.diagnostics.qtilde = Some(fp);

    let growth = solve_alpha_prime(p)?;
    let decay = solve_alpha_star(p, qtilde)?;
    summary.alpha_prime = Some(growth.value);
    summary.alpha_star = Some(decay.value);
    summary.alpha_star_is_malthusian = Some(decay.malthusian);
    summary.tail_condition = Some(check_tail_condition(p, decay.value));
    if regime == Regime::Supercritical {
        summary.duration_constant = Some(combine_rates(growth.value, decay.value));
    }
    summary.diagnostics.alpha_prime_certificate = Some(growth.residual);
    summary.diagnostics.alpha_star_certificate = Some(decay.residual);
    summary.diagnostics.alpha_prime = Some(growth);
    summary.diagnostics.alpha_star = Some(decay);
    Ok(summary)
}
