//! Extinction probability of the forward (infection-tree) branching process.
//!
//! Transmissions from one vertex share its infectious period, so the forward
//! process has offspring `Bin(D~-1, 1 - e^(-βL))` mixed over `L`. Its extinction
//! probability differs from `q~*` unless `L` is constant.

use serde::{Deserialize, Serialize};

use super::{compute_r0, smallest_fixed_point, EpidemicParameters};
use crate::distributions::special::integrate_partition;
use crate::distributions::PeriodFamily;
use crate::error::Result;

const QUAD_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ForwardExtinction {
    /// Extinction probability of the line started by a vertex infected along an edge.
    pub offspring_extinction: f64,
    /// Extinction probability from a uniformly chosen initial infective.
    pub start_extinction: f64,
}

impl ForwardExtinction {
    pub fn major_outbreak_probability(&self) -> f64 {
        1.0 - self.start_extinction
    }
}

/// `E[h(U)]` for `U = e^(-βL)` via `h(1) - ∫_0^1 h'(u) P(U < u) du`.
fn expect_over_escape<F: Fn(f64) -> f64>(p: &EpidemicParameters, h1: f64, dh: F) -> f64 {
    let beta = p.beta;
    let period = &p.infectious_period;
    let mut points = vec![0.0];
    match period.family() {
        PeriodFamily::Constant { duration } => points.push((-beta * duration).exp()),
        PeriodFamily::ExponentialCutoff { cutoff, .. } => points.push((-beta * cutoff).exp()),
        _ => {}
    }
    points.push(1.0);
    points.dedup();
    let integral = integrate_partition(
        |u: f64| dh(u) * period.survival(-u.ln() / beta),
        &points,
        QUAD_TOL,
    );
    h1 - integral
}

pub fn forward_extinction(p: &EpidemicParameters) -> Result<ForwardExtinction> {
    if compute_r0(p) <= 1.0 {
        return Ok(ForwardExtinction {
            offspring_extinction: 1.0,
            start_extinction: 1.0,
        });
    }
    let d = &p.degree;
    let mean = d.mean();
    let step = |s: f64| {
        expect_over_escape(p, 1.0, |u| {
            (1.0 - s) * d.pgf_derivative_unchecked(2, s + u * (1.0 - s)) / mean
        })
    };
    let s = smallest_fixed_point(step)?.value;
    let start = expect_over_escape(p, 1.0, |u| {
        (1.0 - s) * d.pgf_derivative_unchecked(1, s + u * (1.0 - s))
    });
    Ok(ForwardExtinction {
        offspring_extinction: s,
        start_extinction: start.clamp(0.0, 1.0),
    })
}
