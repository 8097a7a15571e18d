//! Degree laws and their generating-function services.
//!
//! Every analytic quantity of the epidemic is a functional of the pgf
//! `G(x) = E[x^D]` and its derivatives. The size-biased law `D~` (degree of a
//! vertex reached along a uniformly chosen edge) never needs its own pmf:
//! `E[x^(D~-1)] = G'(x) / E[D]` and `E[(D~-1) x^(D~-2)] = G''(x) / E[D]`.

use std::collections::BTreeMap;

use rand::Rng;
use rand_distr::{Binomial, Distribution, Poisson};
use serde::{Deserialize, Serialize};
use statrs::function::factorial::{ln_binomial, ln_factorial};

use super::special::{falling, hurwitz_zeta, stirling_first, stirling_second};
use crate::error::{EpiError, Result};

/// Absolute bound on the truncated tail of every infinite degree series.
pub const SERIES_TOL: f64 = 1e-14;
/// How far a user-supplied pmf may sum away from one before it is rejected.
const PMF_SUM_TOL: f64 = 1e-9;
const MAX_SERIES_TERMS: u64 = 200_000_000;
/// Power-law pgf terms summed directly before the tail is integrated.
const DIRECT_TERMS: u64 = 2_000;
/// Degrees sampled from a table below this index; the rest by rejection.
const ZIPF_HEAD: u32 = 256;

/// Serializable description of a degree law.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum DegreeFamily {
    /// Every vertex has degree `d`.
    Regular {
        d: u32,
    },
    Poisson {
        lambda: f64,
    },
    /// Finite support `{k: p_k}`.
    Table {
        #[serde(deserialize_with = "degree_keyed")]
        pmf: BTreeMap<u32, f64>,
    },
    /// `p_k ∝ k^-exponent` on `k_min..=k_max` (unbounded when `k_max` is absent).
    PowerLaw {
        exponent: f64,
        k_min: u32,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        k_max: Option<u32>,
    },
    /// Each half-edge of `base` survives independently with probability `c`.
    Thinned {
        base: Box<DegreeFamily>,
        c: f64,
    },
}

// Tagged enums buffer their content, which loses serde_json's integer-key parsing.
fn degree_keyed<'de, D: serde::Deserializer<'de>>(
    deserializer: D,
) -> std::result::Result<BTreeMap<u32, f64>, D::Error> {
    let raw = BTreeMap::<String, f64>::deserialize(deserializer)?;
    raw.into_iter()
        .map(|(k, p)| {
            k.trim().parse::<u32>().map(|k| (k, p)).map_err(|_| {
                serde::de::Error::custom(format!("degree key {k:?} is not an integer"))
            })
        })
        .collect()
}

/// A validated degree law with cached moments.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "DegreeFamily", into = "DegreeFamily")]
pub struct DegreeModel {
    family: DegreeFamily,
    repr: Repr,
    mean: f64,
    second_moment: f64,
}

#[derive(Clone, Debug)]
enum Repr {
    Regular(u32),
    Poisson(f64),
    Finite(FiniteLaw),
    PowerLaw(PowerLawTail),
}

#[derive(Clone, Debug)]
struct FiniteLaw {
    degrees: Vec<u32>,
    probs: Vec<f64>,
    cdf: Vec<f64>,
    biased_cdf: Vec<f64>,
}

/// Unbounded power law, optionally thinned with survival probability `thinning`.
#[derive(Clone, Debug)]
struct PowerLawTail {
    exponent: f64,
    k_min: u32,
    ln_norm: f64,
    thinning: f64,
    sampler: ZipfSampler,
    biased_sampler: ZipfSampler,
}

impl TryFrom<DegreeFamily> for DegreeModel {
    type Error = EpiError;

    fn try_from(family: DegreeFamily) -> Result<Self> {
        match family {
            DegreeFamily::Regular { d } => DegreeModel::regular(d),
            DegreeFamily::Poisson { lambda } => DegreeModel::poisson(lambda),
            DegreeFamily::Table { pmf } => DegreeModel::table(pmf),
            DegreeFamily::PowerLaw {
                exponent,
                k_min,
                k_max,
            } => DegreeModel::power_law(exponent, k_min, k_max),
            DegreeFamily::Thinned { base, c } => DegreeModel::try_from(*base)?.vaccinate(c),
        }
    }
}

// Everything else is derived from the family.
impl PartialEq for DegreeModel {
    fn eq(&self, other: &Self) -> bool {
        self.family == other.family
    }
}

impl From<DegreeModel> for DegreeFamily {
    fn from(model: DegreeModel) -> Self {
        model.family
    }
}

impl DegreeModel {
    pub fn regular(d: u32) -> Result<Self> {
        if d == 0 {
            return Err(EpiError::InvalidModel(
                "regular degree must be positive".into(),
            ));
        }
        let df = d as f64;
        Ok(DegreeModel {
            family: DegreeFamily::Regular { d },
            repr: Repr::Regular(d),
            mean: df,
            second_moment: df * df,
        })
    }

    pub fn poisson(lambda: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(EpiError::InvalidModel(format!(
                "poisson mean must be positive and finite, got {lambda}"
            )));
        }
        Ok(DegreeModel {
            family: DegreeFamily::Poisson { lambda },
            repr: Repr::Poisson(lambda),
            mean: lambda,
            second_moment: lambda + lambda * lambda,
        })
    }

    /// Finite-support law. Probabilities must sum to one within `1e-9`; they are
    /// renormalized exactly afterwards.
    pub fn table<I: IntoIterator<Item = (u32, f64)>>(pmf: I) -> Result<Self> {
        let mut merged: BTreeMap<u32, f64> = BTreeMap::new();
        for (k, p) in pmf {
            if !(p >= 0.0 && p.is_finite()) {
                return Err(EpiError::InvalidModel(format!(
                    "probability for degree {k} is {p}"
                )));
            }
            *merged.entry(k).or_insert(0.0) += p;
        }
        merged.retain(|_, p| *p > 0.0);
        let total: f64 = merged.values().sum();
        if merged.is_empty() || (total - 1.0).abs() > PMF_SUM_TOL {
            return Err(EpiError::InvalidModel(format!(
                "degree pmf sums to {total}, expected 1"
            )));
        }
        for p in merged.values_mut() {
            *p /= total;
        }
        let law = FiniteLaw::new(&merged)?;
        let mean = law.moment(1);
        let second_moment = law.moment(2);
        Ok(DegreeModel {
            family: DegreeFamily::Table { pmf: merged },
            repr: Repr::Finite(law),
            mean,
            second_moment,
        })
    }

    /// Power law `p_k ∝ k^-exponent`. `exponent > 2` keeps `E[D]` finite;
    /// `E[D^2]` is infinite for `exponent <= 3` when the support is unbounded.
    pub fn power_law(exponent: f64, k_min: u32, k_max: Option<u32>) -> Result<Self> {
        if !(exponent > 2.0 && exponent.is_finite()) {
            return Err(EpiError::InvalidModel(format!(
                "power-law exponent must exceed 2 for a finite mean, got {exponent}"
            )));
        }
        if k_min == 0 {
            return Err(EpiError::InvalidModel(
                "power-law k_min must be >= 1".into(),
            ));
        }
        let family = DegreeFamily::PowerLaw {
            exponent,
            k_min,
            k_max,
        };
        match k_max {
            Some(k_max) => {
                if k_max < k_min || k_max - k_min > 10_000_000 {
                    return Err(EpiError::InvalidModel(format!(
                        "power-law support {k_min}..={k_max} is empty or too large"
                    )));
                }
                let weights: Vec<(u32, f64)> = (k_min..=k_max)
                    .map(|k| (k, (k as f64).powf(-exponent)))
                    .collect();
                let total: f64 = weights.iter().map(|(_, w)| w).sum();
                let pmf: BTreeMap<u32, f64> =
                    weights.into_iter().map(|(k, w)| (k, w / total)).collect();
                let law = FiniteLaw::new(&pmf)?;
                Ok(DegreeModel {
                    family,
                    mean: law.moment(1),
                    second_moment: law.moment(2),
                    repr: Repr::Finite(law),
                })
            }
            None => {
                let tail = PowerLawTail::new(exponent, k_min, 1.0);
                let (mean, second_moment) = tail.moments();
                Ok(DegreeModel {
                    family,
                    repr: Repr::PowerLaw(tail),
                    mean,
                    second_moment,
                })
            }
        }
    }

    pub fn family(&self) -> &DegreeFamily {
        &self.family
    }

    /// `E[D]`.
    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// `E[D^2]`, possibly `+inf`.
    pub fn second_moment(&self) -> f64 {
        self.second_moment
    }

    /// `E[D~ - 1] = E[D(D-1)] / E[D]`, possibly `+inf`.
    pub fn excess_mean(&self) -> f64 {
        if self.second_moment.is_infinite() {
            return f64::INFINITY;
        }
        (self.second_moment - self.mean) / self.mean
    }

    /// Largest degree with positive probability, `None` for unbounded support.
    pub fn max_degree(&self) -> Option<u32> {
        match &self.repr {
            Repr::Regular(d) => Some(*d),
            Repr::Finite(law) => law.degrees.last().copied(),
            Repr::Poisson(_) | Repr::PowerLaw(_) => None,
        }
    }

    pub fn pmf(&self, k: u32) -> f64 {
        match &self.repr {
            Repr::Regular(d) => {
                if k == *d {
                    1.0
                } else {
                    0.0
                }
            }
            Repr::Poisson(lambda) => {
                (k as f64 * lambda.ln() - lambda - ln_factorial(k as u64)).exp()
            }
            Repr::Finite(law) => law
                .degrees
                .binary_search(&k)
                .map(|i| law.probs[i])
                .unwrap_or(0.0),
            Repr::PowerLaw(tail) => tail.pmf(k),
        }
    }

    /// Size-biased pmf `k p_k / E[D]`.
    pub fn size_biased_pmf(&self, k: u32) -> f64 {
        k as f64 * self.pmf(k) / self.mean
    }

    /// `m`-th derivative of the pgf, `G^(m)(x) = E[(D)_m x^(D-m)]`, for `x` in `[0, 1]`.
    pub fn pgf_derivative(&self, m: u32, x: f64) -> Result<f64> {
        check_unit(x)?;
        Ok(self.pgf_derivative_unchecked(m, x))
    }

    pub(crate) fn pgf_derivative_unchecked(&self, m: u32, x: f64) -> f64 {
        match &self.repr {
            Repr::Regular(d) => {
                if m > *d {
                    0.0
                } else {
                    falling(*d as f64, m) * x.powi((*d - m) as i32)
                }
            }
            Repr::Poisson(lambda) => lambda.powi(m as i32) * (-lambda * (1.0 - x)).exp(),
            Repr::Finite(law) => law
                .degrees
                .iter()
                .zip(&law.probs)
                .filter(|(k, _)| **k >= m)
                .map(|(k, p)| falling(*k as f64, m) * p * x.powi((*k - m) as i32))
                .sum(),
            Repr::PowerLaw(tail) => tail.pgf_derivative(m, x),
        }
    }

    /// `E[x^D]`.
    pub fn pgf(&self, x: f64) -> Result<f64> {
        self.pgf_derivative(0, x)
    }

    /// `E[x^(D~-1)]`, the pgf of the excess degree.
    pub fn excess_pgf(&self, x: f64) -> Result<f64> {
        Ok(self.pgf_derivative(1, x)? / self.mean)
    }

    /// `E[(D~-1) x^(D~-2)]`; at `x = 1` this is `E[D~-1]`, possibly `+inf`.
    pub fn excess_derivative_weighted(&self, x: f64) -> Result<f64> {
        Ok(self.pgf_derivative(2, x)? / self.mean)
    }

    /// Moment `E[(D*_x)^j]` of the tilted law `P(D*_x = k) ∝ p_k x^k`.
    pub fn tilted_moment(&self, j: u32, x: f64) -> Result<f64> {
        check_unit(x)?;
        let norm = self.pgf_derivative_unchecked(0, x);
        let raw: f64 = stirling_second(j as usize)
            .iter()
            .enumerate()
            .filter(|(_, s)| **s != 0.0)
            .map(|(i, s)| s * x.powi(i as i32) * self.pgf_derivative_unchecked(i as u32, x))
            .sum();
        Ok(raw / norm)
    }

    /// Normalized tilted pmf `p_k x^k / G(x)` for `k = 0..K`, truncated once the
    /// remaining mass is provably below `1e-14` (or `1e-12` of the total at `x = 1`).
    pub fn tilted_pmf(&self, x: f64) -> Result<Vec<f64>> {
        check_unit(x)?;
        let mut terms = Vec::new();
        if let Some(max) = self.max_degree() {
            for k in 0..=max {
                terms.push(self.pmf(k) * x.powi(k as i32));
            }
        } else {
            let mut sum = 0.0;
            let mut k: u32 = 0;
            loop {
                let term = self.pmf(k) * x.powi(k as i32);
                terms.push(term);
                sum += term;
                let done = if x < 1.0 {
                    // pmf <= 1, so the tail is dominated by a geometric series in x
                    x.powi(k as i32 + 1) / (1.0 - x) < SERIES_TOL * sum
                } else {
                    sum >= 1.0 - 1e-12
                };
                if done || k >= 1_000_000 {
                    break;
                }
                k += 1;
            }
        }
        let total: f64 = terms.iter().sum();
        Ok(terms.into_iter().map(|t| t / total).collect())
    }

    /// All-or-nothing vaccination: every vertex stays susceptible with probability `c`,
    /// so each half-edge leads to a susceptible neighbor independently with probability `c`.
    /// Returns the mixed-binomial law with trials `D` and success probability `c`.
    pub fn vaccinate(&self, c: f64) -> Result<DegreeModel> {
        if !(c > 0.0 && c <= 1.0) {
            return Err(EpiError::Domain(format!(
                "vaccine coverage parameter c must lie in (0, 1], got {c}"
            )));
        }
        if c == 1.0 {
            return Ok(self.clone());
        }
        match &self.repr {
            Repr::Poisson(lambda) => DegreeModel::poisson(c * lambda),
            Repr::Regular(d) => DegreeModel::table(binomial_mixture(&[(*d, 1.0)], c)),
            Repr::Finite(law) => {
                let pairs: Vec<(u32, f64)> = law
                    .degrees
                    .iter()
                    .copied()
                    .zip(law.probs.iter().copied())
                    .collect();
                DegreeModel::table(binomial_mixture(&pairs, c))
            }
            Repr::PowerLaw(tail) => {
                let thinning = tail.thinning * c;
                let tail = PowerLawTail::new(tail.exponent, tail.k_min, thinning);
                let (mean, second_moment) = tail.moments();
                let base = DegreeFamily::PowerLaw {
                    exponent: tail.exponent,
                    k_min: tail.k_min,
                    k_max: None,
                };
                Ok(DegreeModel {
                    family: DegreeFamily::Thinned {
                        base: Box::new(base),
                        c: thinning,
                    },
                    repr: Repr::PowerLaw(tail),
                    mean,
                    second_moment,
                })
            }
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u32 {
        match &self.repr {
            Repr::Regular(d) => *d,
            Repr::Poisson(lambda) => poisson_draw(*lambda, rng),
            Repr::Finite(law) => law.degrees[search_cdf(&law.cdf, rng.random())],
            Repr::PowerLaw(tail) => {
                let k = tail.sampler.sample(rng);
                thin(k, tail.thinning, rng)
            }
        }
    }

    /// Draws from the size-biased law `D~`.
    pub fn sample_size_biased<R: Rng + ?Sized>(&self, rng: &mut R) -> u32 {
        match &self.repr {
            Repr::Regular(d) => *d,
            Repr::Poisson(lambda) => 1 + poisson_draw(*lambda, rng),
            Repr::Finite(law) => law.degrees[search_cdf(&law.biased_cdf, rng.random())],
            Repr::PowerLaw(tail) => {
                // D~_c - 1 is binomial(D~ - 1, c)
                let k = tail.biased_sampler.sample(rng);
                1 + thin(k - 1, tail.thinning, rng)
            }
        }
    }
}

fn check_unit(x: f64) -> Result<()> {
    if (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(EpiError::Domain(format!(
            "generating functions are evaluated on [0, 1], got {x}"
        )))
    }
}

fn binomial_pmf(k: u32, j: u32, c: f64) -> f64 {
    if j > k {
        return 0.0;
    }
    if c >= 1.0 {
        return if j == k { 1.0 } else { 0.0 };
    }
    (ln_binomial(k as u64, j as u64) + j as f64 * c.ln() + (k - j) as f64 * (1.0 - c).ln()).exp()
}

fn binomial_mixture(pairs: &[(u32, f64)], c: f64) -> Vec<(u32, f64)> {
    let max = pairs.iter().map(|(k, _)| *k).max().unwrap_or(0);
    (0..=max)
        .map(|j| {
            let p = pairs.iter().map(|(k, p)| p * binomial_pmf(*k, j, c)).sum();
            (j, p)
        })
        .collect()
}

fn poisson_draw<R: Rng + ?Sized>(lambda: f64, rng: &mut R) -> u32 {
    let dist = Poisson::new(lambda).expect("validated poisson mean");
    dist.sample(rng) as u32
}

fn thin<R: Rng + ?Sized>(k: u32, c: f64, rng: &mut R) -> u32 {
    if c >= 1.0 || k == 0 {
        return k;
    }
    Binomial::new(k as u64, c)
        .expect("thinning probability in (0, 1)")
        .sample(rng) as u32
}

fn search_cdf(cdf: &[f64], u: f64) -> usize {
    cdf.partition_point(|c| *c <= u).min(cdf.len() - 1)
}

impl FiniteLaw {
    fn new(pmf: &BTreeMap<u32, f64>) -> Result<Self> {
        let degrees: Vec<u32> = pmf.keys().copied().collect();
        let probs: Vec<f64> = pmf.values().copied().collect();
        let mean: f64 = degrees.iter().zip(&probs).map(|(k, p)| *k as f64 * p).sum();
        if mean <= 0.0 {
            return Err(EpiError::InvalidModel(
                "degree law must have positive mean".into(),
            ));
        }
        let cdf = cumulative(probs.iter().copied());
        let biased_cdf = cumulative(
            degrees
                .iter()
                .zip(&probs)
                .map(|(k, p)| *k as f64 * p / mean),
        );
        Ok(FiniteLaw {
            degrees,
            probs,
            cdf,
            biased_cdf,
        })
    }

    fn moment(&self, j: i32) -> f64 {
        self.degrees
            .iter()
            .zip(&self.probs)
            .map(|(k, p)| (*k as f64).powi(j) * p)
            .sum()
    }
}

fn cumulative<I: Iterator<Item = f64>>(values: I) -> Vec<f64> {
    let mut acc = 0.0;
    let mut out: Vec<f64> = values
        .map(|v| {
            acc += v;
            acc
        })
        .collect();
    if let Some(last) = out.last_mut() {
        *last = 1.0;
    }
    out
}

impl PowerLawTail {
    fn new(exponent: f64, k_min: u32, thinning: f64) -> Self {
        PowerLawTail {
            exponent,
            k_min,
            ln_norm: hurwitz_zeta(exponent, k_min as f64).ln(),
            thinning,
            sampler: ZipfSampler::new(exponent, k_min),
            biased_sampler: ZipfSampler::new(exponent - 1.0, k_min),
        }
    }

    /// `(E[D_c], E[D_c^2])` from factorial moments of the unthinned law.
    fn moments(&self) -> (f64, f64) {
        let c = self.thinning;
        let first = c * self.base_factorial_moment(1);
        let second_factorial = c * c * self.base_factorial_moment(2);
        (first, second_factorial + first)
    }

    /// `E[(D)_m]` of the unthinned law, via Hurwitz zeta.
    fn base_factorial_moment(&self, m: u32) -> f64 {
        if m == 0 {
            return 1.0;
        }
        if self.exponent - m as f64 <= 1.0 {
            return f64::INFINITY;
        }
        let kmin = self.k_min as f64;
        stirling_first(m as usize)
            .iter()
            .enumerate()
            .filter(|(_, s)| **s != 0.0)
            .map(|(i, s)| s * hurwitz_zeta(self.exponent - i as f64, kmin))
            .sum::<f64>()
            / self.ln_norm.exp()
    }

    fn base_pmf(&self, k: u32) -> f64 {
        if k < self.k_min {
            return 0.0;
        }
        (-self.exponent * (k as f64).ln() - self.ln_norm).exp()
    }

    fn pmf(&self, j: u32) -> f64 {
        let c = self.thinning;
        if c >= 1.0 {
            return self.base_pmf(j);
        }
        // sum_k p_k Bin(k, c)(j); term ratio is bounded by (k+1)/(k+1-j) (1-c)
        let mut sum = 0.0;
        let mut k = j.max(self.k_min);
        let mut steps = 0u64;
        loop {
            let term = self.base_pmf(k) * binomial_pmf(k, j, c);
            sum += term;
            let next = k as f64 + 1.0;
            let ratio = (1.0 - c) * next / (next - j as f64);
            if ratio < 1.0 && term * ratio / (1.0 - ratio) < SERIES_TOL * sum.max(1e-300) {
                break;
            }
            k += 1;
            steps += 1;
            if steps > MAX_SERIES_TERMS {
                break;
            }
        }
        sum
    }

    fn pgf_derivative(&self, m: u32, x: f64) -> f64 {
        let c = self.thinning;
        c.powi(m as i32) * self.base_pgf_derivative(m, 1.0 - c + c * x)
    }

    fn base_pgf_derivative(&self, m: u32, y: f64) -> f64 {
        if y >= 1.0 {
            return self.base_factorial_moment(m);
        }
        if y <= 0.0 {
            return if m >= self.k_min {
                falling(m as f64, m) * self.base_pmf(m)
            } else {
                0.0
            };
        }
        let ln_y = y.ln();
        let s = self.exponent;
        let log_term =
            |t: f64| falling(t, m).ln() - s * t.ln() - self.ln_norm + (t - m as f64) * ln_y;
        let first = self.k_min.max(m) as u64;
        let mut sum = 0.0;
        for k in first..first + DIRECT_TERMS {
            let kf = k as f64;
            let term = log_term(kf).exp();
            sum += term;
            // later term ratios are bounded by y (k+1)/(k+1-m), itself decreasing in k
            let next = kf + 1.0;
            let ratio = y * next / (next - m as f64);
            if ratio < 1.0 && term * ratio / (1.0 - ratio) < SERIES_TOL * sum.max(1.0) {
                return sum;
            }
        }
        sum + self.euler_maclaurin_tail(m, ln_y, (first + DIRECT_TERMS) as f64, log_term)
    }

    /// `sum_{k >= a} f(k)` for `f(t) = (t)_m t^-s y^(t-m) / ζ(s, k_min)` as
    /// `∫_a^inf f + f(a)/2 - f'(a)/12`. The substitution `t = a v^(-1/κ)` with
    /// `κ = s - m - 1` makes the integrand bounded on `(0, 1]`.
    fn euler_maclaurin_tail<F: Fn(f64) -> f64>(
        &self,
        m: u32,
        ln_y: f64,
        a: f64,
        log_term: F,
    ) -> f64 {
        let s = self.exponent;
        let kappa = if s - m as f64 - 1.0 > 0.05 {
            s - m as f64 - 1.0
        } else {
            1.0
        };
        let integrand = |v: f64| {
            if v <= 0.0 {
                return 0.0;
            }
            let t = a * v.powf(-1.0 / kappa);
            (log_term(t) + (a / kappa).ln() - (1.0 / kappa + 1.0) * v.ln()).exp()
        };
        let integral =
            super::special::integrate_partition(integrand, &[0.0, 1e-6, 1e-3, 1.0], 1e-13);
        let fa = log_term(a).exp();
        let dlog = (0..m).map(|i| 1.0 / (a - i as f64)).sum::<f64>() - s / a + ln_y;
        integral + fa / 2.0 - fa * dlog / 12.0
    }
}

/// Exact sampler for `p_k ∝ k^-s`, `k >= k_min`: table lookup for the head and
/// rejection from a continuous Pareto envelope for the tail.
#[derive(Clone, Debug)]
struct ZipfSampler {
    exponent: f64,
    head_cdf: Vec<f64>,
    k_min: u32,
    tail_start: u32,
    envelope: f64,
}

impl ZipfSampler {
    fn new(exponent: f64, k_min: u32) -> Self {
        let k_min = k_min.max(1);
        let norm = hurwitz_zeta(exponent, k_min as f64);
        let tail_start = k_min + ZIPF_HEAD;
        let mut acc = 0.0;
        let head_cdf = (k_min..tail_start)
            .map(|k| {
                acc += (k as f64).powf(-exponent) / norm;
                acc
            })
            .collect();
        let kt = tail_start as f64;
        ZipfSampler {
            exponent,
            head_cdf,
            k_min,
            tail_start,
            envelope: ((kt + 1.0) / kt).powf(exponent),
        }
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u32 {
        let u: f64 = rng.random();
        let head_mass = *self.head_cdf.last().expect("non-empty head");
        if u < head_mass {
            return self.k_min + self.head_cdf.partition_point(|c| *c <= u) as u32;
        }
        let s = self.exponent;
        let kt = self.tail_start as f64;
        loop {
            let v: f64 = rng.random();
            let x = kt * (1.0 - v).powf(-1.0 / (s - 1.0));
            if !(x < u32::MAX as f64) {
                continue;
            }
            let k = x.floor();
            // p(k) over the envelope mass of [k, k+1)
            let cell = k.powf(1.0 - s) * -((1.0 - s) * (1.0 / k).ln_1p()).exp_m1() / (s - 1.0);
            let ratio = k.powf(-s) / cell;
            if rng.random::<f64>() * self.envelope <= ratio {
                return k as u32;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn example3() -> DegreeModel {
        DegreeModel::table([(1, 100.0 / 201.0), (2, 100.0 / 201.0), (100, 1.0 / 201.0)]).unwrap()
    }

    #[test]
    fn excess_means() {
        assert_eq!(DegreeModel::regular(4).unwrap().excess_mean(), 3.0);
        assert!((DegreeModel::poisson(4.0).unwrap().excess_mean() - 4.0).abs() < 1e-12);
        let d = example3();
        assert!((d.size_biased_pmf(1) - 0.25).abs() < 1e-15);
        assert!((d.size_biased_pmf(2) - 0.5).abs() < 1e-15);
        assert!((d.size_biased_pmf(100) - 0.25).abs() < 1e-15);
        assert!((d.excess_mean() - 25.25).abs() < 1e-12);
        let heavy = DegreeModel::power_law(2.5, 1, None).unwrap();
        assert!(heavy.excess_mean().is_infinite());
        assert!(heavy.mean().is_finite());
    }

    #[test]
    fn power_law_pgf_near_one() {
        for (s, k_min) in [(2.5, 1), (3.7, 2), (4.2, 3)] {
            let d = DegreeModel::power_law(s, k_min, None).unwrap();
            let norm: f64 = (k_min..2_000_000u32)
                .map(|k| (k as f64).powf(-s))
                .sum::<f64>()
                + hurwitz_zeta(s, 2_000_000.0);
            for m in 0..3u32 {
                for y in [0.9f64, 0.999, 0.9999] {
                    let brute: f64 = (k_min.max(m)..2_000_000u32)
                        .map(|k| {
                            falling(k as f64, m) * (k as f64).powf(-s) * y.powi((k - m) as i32)
                        })
                        .sum::<f64>()
                        / norm;
                    let got = d.pgf_derivative(m, y).unwrap();
                    assert!(
                        (got - brute).abs() < 1e-9 * brute.max(1.0),
                        "s {s} m {m} y {y}: {got} vs {brute}"
                    );
                }
                if s - m as f64 > 1.0 {
                    let at_one = d.pgf_derivative(m, 1.0).unwrap();
                    let near = d.pgf_derivative(m, 1.0 - 1e-12).unwrap();
                    assert!(
                        (near - at_one).abs() < 1e-4 * at_one,
                        "s {s} m {m}: {near} vs {at_one}"
                    );
                }
            }
        }
    }

    #[test]
    fn pgf_values() {
        let reg = DegreeModel::regular(4).unwrap();
        assert_eq!(reg.pgf(0.5).unwrap(), 0.0625);
        assert_eq!(reg.pgf(1.0).unwrap(), 1.0);
        let poi = DegreeModel::poisson(4.0).unwrap();
        assert!((poi.pgf(0.5).unwrap() - (-2.0f64).exp()).abs() < 1e-15);
        assert!((poi.excess_pgf(0.3).unwrap() - (-4.0f64 * 0.7).exp()).abs() < 1e-15);
        for d in [reg, poi, example3()] {
            assert!((d.pgf(1.0).unwrap() - 1.0).abs() < 1e-12);
            assert!((d.excess_pgf(1.0).unwrap() - 1.0).abs() < 1e-12);
        }
        assert!(matches!(
            DegreeModel::regular(3).unwrap().pgf(1.5),
            Err(EpiError::Domain(_))
        ));
        assert!(DegreeModel::regular(3).unwrap().pgf(-0.1).is_err());
    }

    #[test]
    fn excess_derivative_at_zero_keeps_degree_two() {
        let d = DegreeModel::table([(1, 0.2), (2, 0.3), (5, 0.5)]).unwrap();
        let expected = 2.0 * 0.3 / d.mean();
        assert!((d.excess_derivative_weighted(0.0).unwrap() - expected).abs() < 1e-15);
        assert!((d.excess_derivative_weighted(1.0).unwrap() - d.excess_mean()).abs() < 1e-12);
    }

    #[test]
    fn regular_excess_closed_forms() {
        let d = DegreeModel::regular(4).unwrap();
        let x: f64 = 0.6183;
        assert!((d.excess_pgf(x).unwrap() - x.powi(3)).abs() < 1e-15);
        assert!((d.excess_derivative_weighted(x).unwrap() - 3.0 * x * x).abs() < 1e-15);
    }

    #[test]
    fn table_validation() {
        assert!(DegreeModel::table([(1, 0.5), (2, 0.4)]).is_err());
        assert!(DegreeModel::table([(0, 1.0)]).is_err());
        assert!(DegreeModel::table([(1, -0.1), (2, 1.1)]).is_err());
        assert!(DegreeModel::regular(0).is_err());
        assert!(DegreeModel::poisson(0.0).is_err());
        assert!(DegreeModel::power_law(2.0, 1, None).is_err());
        // degree zero is allowed
        let d = DegreeModel::table([(0, 0.5), (3, 0.5)]).unwrap();
        assert_eq!(d.mean(), 1.5);
    }

    #[test]
    fn vaccinate_families() {
        let poi = DegreeModel::poisson(5.0).unwrap().vaccinate(0.4).unwrap();
        assert!(
            matches!(poi.family(), DegreeFamily::Poisson { lambda } if (lambda - 2.0).abs() < 1e-15)
        );
        let reg = DegreeModel::regular(4).unwrap();
        assert!((reg.vaccinate(0.5).unwrap().excess_mean() - 1.5).abs() < 1e-12);
        assert_eq!(reg.vaccinate(1.0).unwrap().family(), reg.family());
        assert!(reg.vaccinate(0.0).is_err());
        assert!(reg.vaccinate(1.1).is_err());
        let heavy = DegreeModel::power_law(3.5, 1, None).unwrap();
        let thinned = heavy.vaccinate(0.7).unwrap();
        assert!((thinned.excess_mean() - 0.7 * heavy.excess_mean()).abs() < 1e-10);
        let total: f64 = (0..2000).map(|k| thinned.pmf(k)).sum();
        assert!((total - 1.0).abs() < 1e-4, "thinned pmf mass {total}");
    }

    #[test]
    fn thinned_serde_roundtrip() {
        let heavy = DegreeModel::power_law(2.7, 2, None)
            .unwrap()
            .vaccinate(0.5)
            .unwrap();
        let json = serde_json::to_string(&heavy).unwrap();
        let back: DegreeModel = serde_json::from_str(&json).unwrap();
        assert_eq!(back.family(), heavy.family());
        assert!((back.mean() - heavy.mean()).abs() < 1e-14);
    }

    #[test]
    fn json_descriptors() {
        let d: DegreeModel =
            serde_json::from_str(r#"{"family":"table","pmf":{"1":0.25,"3":0.75}}"#).unwrap();
        assert_eq!(d.mean(), 2.5);
        let d: DegreeModel = serde_json::from_str(r#"{"family":"regular","d":4}"#).unwrap();
        assert_eq!(d.mean(), 4.0);
        let bad: std::result::Result<DegreeModel, _> =
            serde_json::from_str(r#"{"family":"poisson","lambda":-1}"#);
        assert!(bad.is_err());
    }

    #[test]
    fn zipf_sampler_matches_pmf() {
        let d = DegreeModel::power_law(2.5, 1, None).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = 400_000;
        let mut counts = [0usize; 4];
        let mut tail = 0usize;
        for _ in 0..n {
            let k = d.sample(&mut rng);
            if k <= 3 {
                counts[k as usize] += 1;
            }
            if k >= 300 {
                tail += 1;
            }
        }
        for k in 1..=3u32 {
            let p = d.pmf(k);
            let sd = (p * (1.0 - p) / n as f64).sqrt();
            let freq = counts[k as usize] as f64 / n as f64;
            assert!((freq - p).abs() < 4.0 * sd, "k={k} freq={freq} p={p}");
        }
        let p_tail = hurwitz_zeta(2.5, 300.0) / hurwitz_zeta(2.5, 1.0);
        let sd = (p_tail / n as f64).sqrt();
        assert!((tail as f64 / n as f64 - p_tail).abs() < 4.0 * sd);
    }

    #[test]
    fn size_biased_sampler_mean() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for d in [
            DegreeModel::poisson(3.0).unwrap(),
            example3(),
            DegreeModel::power_law(4.5, 1, None).unwrap(),
        ] {
            let n = 200_000;
            let mean: f64 = (0..n)
                .map(|_| d.sample_size_biased(&mut rng) as f64)
                .sum::<f64>()
                / n as f64;
            let expected = d.second_moment() / d.mean();
            assert!(
                (mean - expected).abs() < 0.02 * expected,
                "{:?}: {mean} vs {expected}",
                d.family()
            );
        }
    }
}
