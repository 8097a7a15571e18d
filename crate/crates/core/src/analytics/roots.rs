//! Root finding for Malthusian equations `weight · ∫ e^(-(x + shift) t) P(L > t) dt = 1`.
//!
//! Both the growth rate (early phase) and the decay rate (final phase) of the
//! epidemic solve an equation of this form; the left side is strictly
//! decreasing in `x` wherever it is finite, so bisection always converges.

use serde::{Deserialize, Serialize};

use crate::distributions::InfectiousPeriodModel;
use crate::error::{EpiError, Result};

/// Absolute tolerance on the root.
pub const ROOT_TOL: f64 = 1e-12;
/// Boundary probing stops once successive values differ by less than this.
const BOUNDARY_TOL: f64 = 1e-9;

/// A root together with how it was found.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RootSolution {
    #[serde(with = "crate::analytics::ext_real")]
    pub value: f64,
    pub iterations: u32,
    /// Final bisection bracket (`[value, value]` when no bisection was needed).
    pub bracket: (f64, f64),
    /// `g(value) - 1`.
    pub residual: f64,
}

/// Decay rate of a subcritical process, with the divergence abscissa of its transform.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayRate {
    pub value: f64,
    /// Infimum of the region where the transform is finite.
    #[serde(with = "crate::analytics::ext_real")]
    pub boundary: f64,
    /// Whether the transform actually attains one at `value`.
    pub malthusian: bool,
    pub iterations: u32,
    pub bracket: (f64, f64),
    pub residual: f64,
}

/// The transform `x ↦ weight · S(x + shift)`, `S(s) = ∫ e^(-s t) P(L > t) dt`.
#[derive(Clone, Copy, Debug)]
pub struct MalthusianKernel<'a> {
    pub weight: f64,
    pub shift: f64,
    pub period: &'a InfectiousPeriodModel,
}

impl MalthusianKernel<'_> {
    pub fn eval(&self, x: f64) -> f64 {
        if self.weight == 0.0 {
            return 0.0;
        }
        self.weight * self.period.survival_laplace(x + self.shift)
    }

    /// Infimum of `{x : eval(x) < inf}`.
    pub fn boundary(&self) -> f64 {
        -(self.shift + self.period.tail_rate())
    }
}

/// Bisection for a decreasing `g` with `g(lo) > 1 >= g(hi)`.
pub fn bisect_decreasing<F: Fn(f64) -> f64>(
    g: F,
    mut lo: f64,
    mut hi: f64,
) -> (f64, u32, (f64, f64)) {
    let mut iterations = 0;
    while hi - lo > ROOT_TOL {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        iterations += 1;
        if g(mid) > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (0.5 * (lo + hi), iterations, (lo, hi))
}

/// Positive root of `g(x) = 1` when `g(0) > 1`; `+inf` when the weight is infinite.
pub fn solve_growth(kernel: MalthusianKernel<'_>) -> Result<RootSolution> {
    if kernel.weight.is_infinite() {
        return Ok(RootSolution {
            value: f64::INFINITY,
            iterations: 0,
            bracket: (0.0, 0.0),
            residual: 0.0,
        });
    }
    let at_zero = kernel.eval(0.0);
    if !(at_zero > 1.0) {
        return Err(EpiError::UnsupportedRegime(format!(
            "growth rate requires a supercritical kernel, g(0) = {at_zero}"
        )));
    }
    let mut hi = 1.0;
    while kernel.eval(hi) >= 1.0 {
        hi *= 2.0;
        if hi > 1e15 {
            return Err(EpiError::NoConvergence(
                "could not bracket the growth rate".into(),
            ));
        }
    }
    let (value, iterations, bracket) = bisect_decreasing(|x| kernel.eval(x), 0.0, hi);
    Ok(RootSolution {
        value,
        iterations,
        bracket,
        residual: kernel.eval(value) - 1.0,
    })
}

/// `inf{x : g(x) < 1}` for a kernel with `g(0) < 1`.
///
/// The root of `g = 1` is searched on `(boundary, 0)`. When `g` stays below one
/// up to its divergence abscissa the infimum is the abscissa itself and no
/// Malthusian parameter exists; the value of `g` there is taken as the monotone
/// limit along `boundary + δ 2^-j`.
pub fn solve_decay(kernel: MalthusianKernel<'_>) -> Result<DecayRate> {
    let at_zero = kernel.eval(0.0);
    if !(at_zero < 1.0) {
        return Err(EpiError::UnsupportedRegime(format!(
            "decay rate requires a subcritical kernel, g(0) = {at_zero}"
        )));
    }
    let boundary = kernel.boundary();
    let bisect_from = |lo: f64| {
        let (value, iterations, bracket) = bisect_decreasing(|x| kernel.eval(x), lo, 0.0);
        DecayRate {
            value,
            boundary,
            malthusian: true,
            iterations,
            bracket,
            residual: kernel.eval(value) - 1.0,
        }
    };

    if boundary == f64::NEG_INFINITY {
        let mut lo = -1.0;
        while kernel.eval(lo) <= 1.0 {
            lo *= 2.0;
            if lo < -1e15 {
                return Err(EpiError::NoConvergence(
                    "could not bracket the decay rate".into(),
                ));
            }
        }
        return Ok(bisect_from(lo));
    }
    if boundary >= 0.0 {
        return Ok(DecayRate {
            value: 0.0,
            boundary,
            malthusian: false,
            iterations: 0,
            bracket: (0.0, 0.0),
            residual: at_zero - 1.0,
        });
    }

    let delta = -boundary / 2.0;
    let mut previous = f64::NAN;
    let mut limit = f64::NAN;
    for j in 0..=64 {
        let x = boundary + delta * 0.5f64.powi(j);
        let value = kernel.eval(x);
        if value > 1.0 {
            return Ok(bisect_from(x));
        }
        if (value - previous).abs() < BOUNDARY_TOL {
            limit = value;
            break;
        }
        previous = value;
        limit = value;
    }
    Ok(DecayRate {
        value: boundary,
        boundary,
        malthusian: (limit - 1.0).abs() <= BOUNDARY_TOL,
        iterations: 0,
        bracket: (boundary, boundary),
        residual: limit - 1.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn markov_roots_in_closed_form() {
        let period = InfectiousPeriodModel::exponential(1.0).unwrap();
        // g(x) = w / (x + 1 + 1): root at w - 2
        let growth = solve_growth(MalthusianKernel {
            weight: 4.0,
            shift: 1.0,
            period: &period,
        })
        .unwrap();
        assert!((growth.value - 2.0).abs() < 1e-12);
        let decay = solve_decay(MalthusianKernel {
            weight: 1.2,
            shift: 1.0,
            period: &period,
        })
        .unwrap();
        assert!(decay.malthusian);
        assert!((decay.value + 0.8).abs() < 1e-12);
        assert_eq!(decay.boundary, -2.0);
    }

    #[test]
    fn decay_without_malthusian_root_sits_on_boundary() {
        // Lomax with shape 3: S(0) = scale / 2 is finite at the abscissa
        let period = InfectiousPeriodModel::lomax(3.0, 1.0).unwrap();
        let kernel = MalthusianKernel {
            weight: 0.2,
            shift: 1.0,
            period: &period,
        };
        // g at the boundary = 0.2 * 0.5 = 0.1 < 1
        let decay = solve_decay(kernel).unwrap();
        assert!(!decay.malthusian);
        assert_eq!(decay.value, -1.0);
        assert!((decay.residual + 0.9).abs() < 1e-6);
    }

    #[test]
    fn bounded_support_always_has_a_root() {
        let period = InfectiousPeriodModel::constant(1.0).unwrap();
        let decay = solve_decay(MalthusianKernel {
            weight: 0.3,
            shift: 0.5,
            period: &period,
        })
        .unwrap();
        assert!(decay.malthusian);
        assert!(decay.boundary.is_infinite());
        assert!(decay.residual.abs() < 1e-9);
    }

    #[test]
    fn regime_errors() {
        let period = InfectiousPeriodModel::exponential(1.0).unwrap();
        let sub = MalthusianKernel {
            weight: 1.0,
            shift: 1.0,
            period: &period,
        };
        assert!(matches!(
            solve_growth(sub),
            Err(EpiError::UnsupportedRegime(_))
        ));
        let sup = MalthusianKernel { weight: 5.0, ..sub };
        assert!(matches!(
            solve_decay(sup),
            Err(EpiError::UnsupportedRegime(_))
        ));
    }
}
