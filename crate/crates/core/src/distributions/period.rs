//! Infectious-period laws.

use rand::Rng;
use rand_distr::{Distribution, Exp, Gamma};
use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma_ur;

use super::special::integrate_geometric;
use crate::error::{EpiError, Result};

/// Relative accuracy requested from the quadrature fallback.
const QUAD_TOL: f64 = 1e-12;
/// `e^-36 < 1e-15`: truncation point for integrands decaying like `e^-u`.
const QUAD_UPPER: f64 = 36.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum PeriodFamily {
    Exponential {
        rate: f64,
    },
    /// `L ≡ duration`; a duration of zero gives `L ≡ 0`.
    Constant {
        duration: f64,
    },
    /// `min(Exp(rate), cutoff)`.
    ExponentialCutoff {
        rate: f64,
        cutoff: f64,
    },
    Gamma {
        shape: f64,
        rate: f64,
    },
    /// `P(L > t) = (1 + t/scale)^-shape`: polynomial tail.
    Lomax {
        shape: f64,
        scale: f64,
    },
    /// `L ≡ +inf` (SI dynamics).
    Infinite,
}

/// A validated infectious-period law `L`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PeriodFamily", into = "PeriodFamily")]
pub struct InfectiousPeriodModel {
    family: PeriodFamily,
}

impl TryFrom<PeriodFamily> for InfectiousPeriodModel {
    type Error = EpiError;

    fn try_from(family: PeriodFamily) -> Result<Self> {
        let positive = |v: f64, what: &str| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(EpiError::InvalidModel(format!(
                    "{what} must be positive and finite, got {v}"
                )))
            }
        };
        match &family {
            PeriodFamily::Exponential { rate } => positive(*rate, "rate")?,
            PeriodFamily::Constant { duration } => {
                if !(*duration >= 0.0 && duration.is_finite()) {
                    return Err(EpiError::InvalidModel(format!(
                        "duration must be finite and non-negative, got {duration}"
                    )));
                }
            }
            PeriodFamily::ExponentialCutoff { rate, cutoff } => {
                positive(*rate, "rate")?;
                positive(*cutoff, "cutoff")?;
            }
            PeriodFamily::Gamma { shape, rate } => {
                positive(*shape, "shape")?;
                positive(*rate, "rate")?;
            }
            PeriodFamily::Lomax { shape, scale } => {
                positive(*shape, "shape")?;
                positive(*scale, "scale")?;
            }
            PeriodFamily::Infinite => {}
        }
        Ok(InfectiousPeriodModel { family })
    }
}

impl From<InfectiousPeriodModel> for PeriodFamily {
    fn from(model: InfectiousPeriodModel) -> Self {
        model.family
    }
}

impl InfectiousPeriodModel {
    pub fn new(family: PeriodFamily) -> Result<Self> {
        Self::try_from(family)
    }

    pub fn exponential(rate: f64) -> Result<Self> {
        Self::new(PeriodFamily::Exponential { rate })
    }

    pub fn constant(duration: f64) -> Result<Self> {
        Self::new(PeriodFamily::Constant { duration })
    }

    pub fn exponential_cutoff(rate: f64, cutoff: f64) -> Result<Self> {
        Self::new(PeriodFamily::ExponentialCutoff { rate, cutoff })
    }

    pub fn gamma(shape: f64, rate: f64) -> Result<Self> {
        Self::new(PeriodFamily::Gamma { shape, rate })
    }

    pub fn lomax(shape: f64, scale: f64) -> Result<Self> {
        Self::new(PeriodFamily::Lomax { shape, scale })
    }

    pub fn infinite() -> Self {
        InfectiousPeriodModel {
            family: PeriodFamily::Infinite,
        }
    }

    pub fn family(&self) -> &PeriodFamily {
        &self.family
    }

    /// `P(L > t)`; equals one for `t < 0`.
    pub fn survival(&self, t: f64) -> f64 {
        if t < 0.0 {
            return 1.0;
        }
        match self.family {
            PeriodFamily::Exponential { rate } => (-rate * t).exp(),
            PeriodFamily::Constant { duration } => {
                if t < duration {
                    1.0
                } else {
                    0.0
                }
            }
            PeriodFamily::ExponentialCutoff { rate, cutoff } => {
                if t < cutoff {
                    (-rate * t).exp()
                } else {
                    0.0
                }
            }
            PeriodFamily::Gamma { shape, rate } => {
                if t == 0.0 {
                    1.0
                } else {
                    gamma_ur(shape, rate * t)
                }
            }
            PeriodFamily::Lomax { shape, scale } => (1.0 + t / scale).powf(-shape),
            PeriodFamily::Infinite => 1.0,
        }
    }

    /// `E[L]`, possibly `+inf`.
    pub fn mean(&self) -> f64 {
        self.survival_laplace(0.0)
    }

    /// `sup{x >= 0 : ∫ e^(xt) P(L > t) dt < inf}`: `+inf` for bounded support,
    /// the exponential rate for exponential tails, zero for heavier tails.
    pub fn tail_rate(&self) -> f64 {
        match self.family {
            PeriodFamily::Exponential { rate } | PeriodFamily::Gamma { rate, .. } => rate,
            PeriodFamily::Constant { .. } | PeriodFamily::ExponentialCutoff { .. } => f64::INFINITY,
            PeriodFamily::Lomax { .. } | PeriodFamily::Infinite => 0.0,
        }
    }

    /// `∫_0^inf e^(-s t) P(L > t) dt`, `+inf` where the integral diverges.
    pub fn survival_laplace(&self, s: f64) -> f64 {
        match self.family {
            PeriodFamily::Exponential { rate } => {
                if s + rate > 0.0 {
                    1.0 / (s + rate)
                } else {
                    f64::INFINITY
                }
            }
            PeriodFamily::Constant { duration } => {
                if s == 0.0 || duration == 0.0 {
                    duration
                } else {
                    -(-s * duration).exp_m1() / s
                }
            }
            PeriodFamily::ExponentialCutoff { rate, cutoff } => {
                let a = rate + s;
                if a == 0.0 {
                    cutoff
                } else {
                    -(-a * cutoff).exp_m1() / a
                }
            }
            PeriodFamily::Gamma { shape, rate } => {
                if s + rate <= 0.0 {
                    f64::INFINITY
                } else if s == 0.0 {
                    shape / rate
                } else {
                    -(-shape * (s / rate).ln_1p()).exp_m1() / s
                }
            }
            PeriodFamily::Lomax { shape, scale } => {
                if s < 0.0 {
                    f64::INFINITY
                } else if s == 0.0 {
                    if shape > 1.0 {
                        scale / (shape - 1.0)
                    } else {
                        f64::INFINITY
                    }
                } else {
                    integrate_geometric(
                        |t: f64| (-s * t).exp() * (1.0 + t / scale).powf(-shape),
                        scale.min(1.0 / s),
                        QUAD_UPPER / s,
                        QUAD_TOL,
                    )
                }
            }
            PeriodFamily::Infinite => {
                if s > 0.0 {
                    1.0 / s
                } else {
                    f64::INFINITY
                }
            }
        }
    }

    /// Contact transform `Φ(x) = ∫_0^inf e^(-x t) β e^(-β t) P(L > t) dt`.
    /// `Φ(0)` is the transmission probability to a given neighbor.
    pub fn contact_transform(&self, beta: f64, x: f64) -> f64 {
        beta * self.survival_laplace(x + beta)
    }

    /// Laplace transform of the law itself, `E[e^(-s L)]` for `s >= 0`.
    pub fn laplace(&self, s: f64) -> f64 {
        match self.family {
            PeriodFamily::Exponential { rate } => rate / (rate + s),
            PeriodFamily::Constant { duration } => (-s * duration).exp(),
            PeriodFamily::ExponentialCutoff { rate, cutoff } => {
                let a = rate + s;
                rate * -(-a * cutoff).exp_m1() / a + (-a * cutoff).exp()
            }
            PeriodFamily::Gamma { shape, rate } => (rate / (rate + s)).powf(shape),
            PeriodFamily::Lomax { shape, scale } => {
                if s == 0.0 {
                    return 1.0;
                }
                // density (shape/scale) (1 + t/scale)^-(shape+1)
                let upper = QUAD_UPPER / s;
                integrate_geometric(
                    |t: f64| shape / scale * (-s * t).exp() * (1.0 + t / scale).powf(-shape - 1.0),
                    scale.min(1.0 / s),
                    upper,
                    QUAD_TOL,
                ) + self.survival(upper) * (-s * upper).exp()
            }
            PeriodFamily::Infinite => {
                if s > 0.0 {
                    0.0
                } else {
                    1.0
                }
            }
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self.family {
            PeriodFamily::Exponential { rate } => Exp::new(rate).expect("validated").sample(rng),
            PeriodFamily::Constant { duration } => duration,
            PeriodFamily::ExponentialCutoff { rate, cutoff } => {
                Exp::new(rate).expect("validated").sample(rng).min(cutoff)
            }
            PeriodFamily::Gamma { shape, rate } => Gamma::new(shape, 1.0 / rate)
                .expect("validated")
                .sample(rng),
            PeriodFamily::Lomax { shape, scale } => {
                let u: f64 = rng.random();
                scale * ((1.0 - u).powf(-1.0 / shape) - 1.0)
            }
            PeriodFamily::Infinite => f64::INFINITY,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn all_families() -> Vec<InfectiousPeriodModel> {
        vec![
            InfectiousPeriodModel::exponential(1.3).unwrap(),
            InfectiousPeriodModel::constant(2.0).unwrap(),
            InfectiousPeriodModel::exponential_cutoff(0.5, 3.0).unwrap(),
            InfectiousPeriodModel::gamma(2.5, 1.5).unwrap(),
            InfectiousPeriodModel::lomax(2.5, 1.0).unwrap(),
        ]
    }

    #[test]
    fn transform_examples() {
        let exp = InfectiousPeriodModel::exponential(1.0).unwrap();
        assert_eq!(exp.contact_transform(1.0, 0.0), 0.5);
        let inf = InfectiousPeriodModel::infinite();
        assert_eq!(inf.contact_transform(0.7, 0.0), 1.0);
        assert!(inf.contact_transform(0.7, -0.7).is_infinite());
        let long = InfectiousPeriodModel::constant(1e6).unwrap();
        assert!((long.contact_transform(1.0, 1.0) - 0.5).abs() < 1e-15);
        // x + beta = 0 limit of the constant family
        let c = InfectiousPeriodModel::constant(2.0).unwrap();
        assert!((c.contact_transform(1.5, -1.5) - 3.0).abs() < 1e-15);
        assert_eq!(
            InfectiousPeriodModel::constant(0.0)
                .unwrap()
                .contact_transform(2.0, 0.0),
            0.0
        );
    }

    #[test]
    fn two_forms_of_transmission_probability_agree() {
        for l in all_families() {
            for beta in [0.3, 1.0, 2.7] {
                let by_survival = l.contact_transform(beta, 0.0);
                let by_law = 1.0 - l.laplace(beta);
                assert!(
                    (by_survival - by_law).abs() < 1e-10,
                    "{:?} beta={beta}: {by_survival} vs {by_law}",
                    l.family()
                );
            }
        }
    }

    #[test]
    fn transform_strictly_decreasing() {
        for l in all_families() {
            let beta = 1.0;
            let lo = -(beta + l.tail_rate().min(5.0)) + 1e-3;
            let mut prev = f64::INFINITY;
            for i in 0..60 {
                let x = lo + i as f64 * 0.2;
                let v = l.contact_transform(beta, x);
                assert!(v < prev, "{:?} not decreasing at {x}", l.family());
                prev = v;
            }
        }
    }

    #[test]
    fn quadrature_fallback() {
        use crate::distributions::special::integrate;
        let s = 0.8;
        let numeric = integrate(|t: f64| (-(s + 1.0) * t).exp(), 0.0, 50.0, 1e-12);
        assert!((numeric - 1.0 / 1.8).abs() < 1e-12);
        let lomax = InfectiousPeriodModel::lomax(3.0, 2.0).unwrap();
        // E[L] = scale/(shape-1) is approached continuously from s > 0
        assert!((lomax.survival_laplace(1e-9) - 1.0).abs() < 1e-6);
    }

    #[test]
    fn survival_properties() {
        for l in all_families() {
            assert_eq!(l.survival(-1.0), 1.0);
            let mut prev = 1.0;
            for i in 0..100 {
                let v = l.survival(i as f64 * 0.1);
                assert!((0.0..=1.0).contains(&v));
                assert!(v <= prev);
                prev = v;
            }
        }
        let c = InfectiousPeriodModel::constant(2.0).unwrap();
        assert_eq!(c.survival(2.0), 0.0);
        let cut = InfectiousPeriodModel::exponential_cutoff(0.1, 5.0).unwrap();
        assert_eq!(cut.survival(5.0), 0.0);
    }

    #[test]
    fn tail_rates() {
        assert_eq!(
            InfectiousPeriodModel::exponential(2.0).unwrap().tail_rate(),
            2.0
        );
        assert!(InfectiousPeriodModel::constant(1.0)
            .unwrap()
            .tail_rate()
            .is_infinite());
        assert_eq!(
            InfectiousPeriodModel::lomax(2.0, 1.0).unwrap().tail_rate(),
            0.0
        );
    }

    #[test]
    fn sampler_kolmogorov_smirnov() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 20_000;
        // 1.63 / sqrt(n) is the 1% critical value
        let critical = 1.63 / (n as f64).sqrt();
        for l in all_families() {
            let mut xs: Vec<f64> = (0..n).map(|_| l.sample(&mut rng)).collect();
            xs.sort_by(f64::total_cmp);
            let mut worst: f64 = 0.0;
            for (i, x) in xs.iter().enumerate() {
                let cdf = 1.0 - l.survival(*x);
                let lo = i as f64 / n as f64;
                let hi = (i + 1) as f64 / n as f64;
                worst = worst.max((cdf - lo).abs()).max((hi - cdf).abs());
            }
            // atoms (constant, cutoff) make the statistic conservative in one direction only
            if !matches!(
                l.family(),
                PeriodFamily::Constant { .. } | PeriodFamily::ExponentialCutoff { .. }
            ) {
                assert!(worst < critical, "{:?}: KS {worst}", l.family());
            }
        }
    }

    #[test]
    fn validation() {
        assert!(InfectiousPeriodModel::exponential(0.0).is_err());
        assert!(InfectiousPeriodModel::constant(-1.0).is_err());
        assert!(InfectiousPeriodModel::gamma(1.0, f64::NAN).is_err());
        let ok: InfectiousPeriodModel =
            serde_json::from_str(r#"{"family":"exponential_cutoff","rate":0.01,"cutoff":1000}"#)
                .unwrap();
        assert_eq!(ok.tail_rate(), f64::INFINITY);
        assert!(serde_json::from_str::<InfectiousPeriodModel>(r#"{"family":"infinite"}"#).is_ok());
    }
}
