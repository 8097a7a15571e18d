//! Smallest fixed point of an increasing convex map of `[0, 1]` into itself.

use serde::{Deserialize, Serialize};

use crate::error::{EpiError, Result};

const STEP_TOL: f64 = 1e-13;
const MAX_ITERATIONS: u32 = 1_000_000;
/// Iterations after which a slowly contracting run is finished by bisection.
const SWITCH_AFTER: u32 = 20_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FixedPointMethod {
    Iteration,
    /// Iteration supplied a certified lower bound, bisection finished the job.
    IterationThenBisection,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FixedPoint {
    pub value: f64,
    pub iterations: u32,
    pub method: FixedPointMethod,
}

/// Iterates `s_(k+1) = f(s_k)` from zero. The iterates increase to the smallest
/// root, so every iterate is a lower bound; the stopping rule also requires the
/// geometric extrapolation of the remaining distance to be below tolerance.
///
/// Near criticality the contraction ratio tends to one. After `SWITCH_AFTER`
/// steps the root is bracketed between the current iterate and a point where
/// `f(s) < s`; by convexity the only root in that bracket is the smallest one.
pub fn smallest_fixed_point<F: Fn(f64) -> f64>(f: F) -> Result<FixedPoint> {
    let mut s = 0.0;
    let mut last_step = f64::NAN;
    for k in 1..=MAX_ITERATIONS {
        let next = f(s).min(1.0);
        let step = next - s;
        s = next.max(s);
        if step <= 0.0 {
            return Ok(done(s, k));
        }
        if step < STEP_TOL {
            let ratio = step / last_step;
            if ratio < 1.0 && step * ratio / (1.0 - ratio) < STEP_TOL {
                return Ok(done(s, k));
            }
        }
        last_step = step;
        if k == SWITCH_AFTER {
            if let Some(value) = bracket_and_bisect(&f, s) {
                return Ok(FixedPoint {
                    value,
                    iterations: k,
                    method: FixedPointMethod::IterationThenBisection,
                });
            }
        }
    }
    Err(EpiError::NoConvergence(format!(
        "fixed-point iteration did not settle after {MAX_ITERATIONS} steps (last iterate {s})"
    )))
}

fn done(value: f64, iterations: u32) -> FixedPoint {
    FixedPoint {
        value,
        iterations,
        method: FixedPointMethod::Iteration,
    }
}

fn bracket_and_bisect<F: Fn(f64) -> f64>(f: &F, lower: f64) -> Option<f64> {
    let gap = 1.0 - lower;
    let mut hi = None;
    for j in 1..=52 {
        let b = lower + gap * (1.0 - 0.5f64.powi(j));
        if b >= 1.0 {
            break;
        }
        if f(b) < b {
            hi = Some(b);
            break;
        }
    }
    let mut hi = hi?;
    let mut lo = lower;
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return Some(lo);
        }
        if f(mid) > mid {
            lo = mid;
        } else {
            hi = mid;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_smallest_root() {
        // roots 1/3 and 1
        let fp = smallest_fixed_point(|s| 0.25 + 0.75 * s * s).unwrap();
        assert!((fp.value - 1.0 / 3.0).abs() < 1e-12);
        assert_eq!(fp.method, FixedPointMethod::Iteration);
    }

    #[test]
    fn zero_is_a_root() {
        let fp = smallest_fixed_point(|s| s * s).unwrap();
        assert_eq!(fp.value, 0.0);
        assert_eq!(fp.iterations, 1);
    }

    #[test]
    fn near_critical_switches_to_bisection() {
        // Poisson offspring with mean 1 + 1e-6
        let m = 1.0 + 1e-6;
        let f = |s: f64| (-m * (1.0 - s)).exp();
        let fp = smallest_fixed_point(f).unwrap();
        assert_eq!(fp.method, FixedPointMethod::IterationThenBisection);
        assert!((f(fp.value) - fp.value).abs() < 1e-15);
        assert!(fp.value < 1.0 - 1e-7);
    }
}
