//! Crump-Mode-Jagers branching processes of the epidemic's early and final phases.
//!
//! A particle lives for a time `L` and carries a random number of trials; each
//! trial is kept with probability `keep` and then produces a child at age
//! `τ ~ Exp(β)` provided `τ < L`. With trials `D~ - 1` and `keep = 1` this is the
//! forward process of the early epidemic; with trials `D~* - 1` and
//! `keep = q~*/Q` it is the subcritical process of the final phase.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};
use serde::{Deserialize, Serialize};

use crate::analytics::{
    self, solve_decay, solve_growth, susceptible_degree_profile, DecayRate, EpidemicParameters,
    MalthusianKernel, RootSolution,
};
use crate::distributions::{DegreeModel, InfectiousPeriodModel};
use crate::error::{EpiError, Result};
use crate::rng::{derive_seed, vertex_rng};

/// Default cap on particles ever born in one run.
pub const DEFAULT_MAX_BORN: u64 = 10_000_000;

/// Law of the number of trials a particle carries.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TrialsLaw {
    Constant {
        count: u32,
    },
    /// `D~ - 1` for the given degree law.
    ExcessDegree {
        degree: DegreeModel,
    },
    /// `P(trials = k) = pmf[k]`.
    Table {
        pmf: Vec<f64>,
    },
}

impl TrialsLaw {
    pub fn mean(&self) -> f64 {
        match self {
            TrialsLaw::Constant { count } => *count as f64,
            TrialsLaw::ExcessDegree { degree } => degree.excess_mean(),
            TrialsLaw::Table { pmf } => {
                let total: f64 = pmf.iter().sum();
                pmf.iter()
                    .enumerate()
                    .map(|(k, p)| k as f64 * p)
                    .sum::<f64>()
                    / total
            }
        }
    }

    fn sampler(&self) -> TrialsSampler<'_> {
        match self {
            TrialsLaw::Constant { count } => TrialsSampler::Constant(*count),
            TrialsLaw::ExcessDegree { degree } => TrialsSampler::Excess(degree),
            TrialsLaw::Table { pmf } => {
                let total: f64 = pmf.iter().sum();
                let cdf = pmf
                    .iter()
                    .scan(0.0, |acc, p| {
                        *acc += p / total;
                        Some(*acc)
                    })
                    .collect();
                TrialsSampler::Table(cdf)
            }
        }
    }
}

enum TrialsSampler<'a> {
    Constant(u32),
    Excess(&'a DegreeModel),
    Table(Vec<f64>),
}

impl TrialsSampler<'_> {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u32 {
        match self {
            TrialsSampler::Constant(c) => *c,
            TrialsSampler::Excess(d) => d.sample_size_biased(rng) - 1,
            TrialsSampler::Table(cdf) => {
                let u: f64 = rng.random();
                cdf.partition_point(|&c| c <= u).min(cdf.len() - 1) as u32
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReproductionLaw {
    pub trials: TrialsLaw,
    /// Probability that a trial is kept.
    pub keep: f64,
    /// Rate of the age at which a kept trial gives birth.
    pub beta: f64,
    pub lifetime: InfectiousPeriodModel,
}

impl ReproductionLaw {
    pub fn new(
        trials: TrialsLaw,
        keep: f64,
        beta: f64,
        lifetime: InfectiousPeriodModel,
    ) -> Result<Self> {
        if !(0.0..=1.0).contains(&keep) {
            return Err(EpiError::InvalidModel(format!(
                "keep probability {keep} outside [0, 1]"
            )));
        }
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(EpiError::InvalidModel(format!(
                "birth rate must be positive, got {beta}"
            )));
        }
        if let TrialsLaw::Table { pmf } = &trials {
            if pmf.is_empty() || pmf.iter().any(|p| !(*p >= 0.0)) || pmf.iter().sum::<f64>() <= 0.0
            {
                return Err(EpiError::InvalidModel(
                    "trials table must be a non-empty pmf".into(),
                ));
            }
        }
        Ok(ReproductionLaw {
            trials,
            keep,
            beta,
            lifetime,
        })
    }

    /// Forward process of the early epidemic.
    pub fn early_phase(p: &EpidemicParameters) -> Self {
        ReproductionLaw {
            trials: TrialsLaw::ExcessDegree {
                degree: p.degree.clone(),
            },
            keep: 1.0,
            beta: p.beta,
            lifetime: p.infectious_period.clone(),
        }
    }

    /// Subcritical process of the final phase: trials `D~* - 1`, kept with probability `q~*/Q`.
    pub fn final_phase(p: &EpidemicParameters) -> Result<Self> {
        let qtilde = analytics::solve_qtilde_star(p)?.value;
        let profile = susceptible_degree_profile(p, qtilde)?;
        let pmf = profile
            .size_biased_pmf
            .iter()
            .skip(1)
            .copied()
            .collect::<Vec<_>>();
        ReproductionLaw::new(
            TrialsLaw::Table { pmf },
            profile.p_ss,
            p.beta,
            p.infectious_period.clone(),
        )
    }

    fn kernel(&self) -> MalthusianKernel<'_> {
        MalthusianKernel {
            weight: self.trials.mean() * self.keep * self.beta,
            shift: self.beta,
            period: &self.lifetime,
        }
    }

    /// Expected number of children, `E[trials] · keep · P(τ < L)`.
    pub fn mean_offspring(&self) -> f64 {
        self.kernel().eval(0.0)
    }

    /// Malthusian parameter of a supercritical law.
    pub fn growth_rate(&self) -> Result<RootSolution> {
        solve_growth(self.kernel())
    }

    /// Decay rate of a subcritical law.
    pub fn decay_rate(&self) -> Result<DecayRate> {
        solve_decay(self.kernel())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CmjOptions {
    pub ancestors: usize,
    /// Stream index of the first ancestor line; line `i` draws from stream `first_line + i`.
    pub first_line: u64,
    #[serde(with = "crate::analytics::ext_real")]
    pub horizon: f64,
    pub max_born: u64,
    /// Stop as soon as this many particles are alive.
    pub stop_at_alive: Option<u64>,
    /// Record `Z(t)` at these times.
    pub snapshot_times: Vec<f64>,
    pub record: bool,
}

impl Default for CmjOptions {
    fn default() -> Self {
        CmjOptions {
            ancestors: 1,
            first_line: 0,
            horizon: f64::INFINITY,
            max_born: DEFAULT_MAX_BORN,
            stop_at_alive: None,
            snapshot_times: Vec::new(),
            record: false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TraceKind {
    Birth,
    Death,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub t: f64,
    pub kind: TraceKind,
    pub particle: u64,
    pub parent: Option<u64>,
    /// `Z(t)` after the event.
    pub alive: u64,
    /// `Z^tot(t)` after the event.
    pub total: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParticleRecord {
    pub id: u64,
    pub parent: Option<u64>,
    pub line: u64,
    pub birth: f64,
    #[serde(with = "crate::analytics::ext_real")]
    pub lifetime: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PopulationTrace {
    pub seed: u64,
    pub ancestors: usize,
    pub extinct: bool,
    pub extinction_time: Option<f64>,
    /// Stopped by the population cap.
    pub truncated: bool,
    /// First time `Z(t) >= stop_at_alive`.
    pub hitting_time: Option<f64>,
    pub end_time: f64,
    pub total_born: u64,
    pub final_alive: u64,
    pub max_alive: u64,
    /// `Z(t)` at the requested times; `None` past a truncation or hitting stop.
    pub snapshots: Vec<Option<u64>>,
    pub records: Option<Vec<TraceRecord>>,
    pub particles: Option<Vec<ParticleRecord>>,
}

#[derive(Clone, Copy, Debug)]
enum Pending {
    Birth { parent: u64, line: u32 },
    Death { particle: u64 },
}

#[derive(Clone, Copy, Debug)]
struct Event {
    time: f64,
    seq: u64,
    pending: Pending,
}

impl PartialEq for Event {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Event {}

impl PartialOrd for Event {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Event {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .time
            .total_cmp(&self.time)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

struct Cmj<'a> {
    law: &'a ReproductionLaw,
    trials: TrialsSampler<'a>,
    clock: Exp<f64>,
    lines: Vec<ChaCha8Rng>,
    queue: BinaryHeap<Event>,
    seq: u64,
    alive: u64,
    born: u64,
    max_alive: u64,
    records: Option<Vec<TraceRecord>>,
    particles: Option<Vec<ParticleRecord>>,
}

impl Cmj<'_> {
    fn push(&mut self, time: f64, pending: Pending) {
        self.queue.push(Event {
            time,
            seq: self.seq,
            pending,
        });
        self.seq += 1;
    }

    fn birth(&mut self, t: f64, parent: Option<u64>, line: u32) {
        let id = self.born;
        self.born += 1;
        self.alive += 1;
        self.max_alive = self.max_alive.max(self.alive);
        let rng = &mut self.lines[line as usize];
        let lifetime = self.law.lifetime.sample(rng);
        let trials = self.trials.sample(rng);
        let mut births = Vec::new();
        for _ in 0..trials {
            let kept = self.law.keep >= 1.0 || rng.random::<f64>() < self.law.keep;
            let age = self.clock.sample(rng);
            if kept && age < lifetime {
                births.push(t + age);
            }
        }
        for time in births {
            self.push(time, Pending::Birth { parent: id, line });
        }
        if lifetime.is_finite() {
            self.push(t + lifetime, Pending::Death { particle: id });
        }
        if let Some(particles) = self.particles.as_mut() {
            particles.push(ParticleRecord {
                id,
                parent,
                line: line as u64,
                birth: t,
                lifetime,
            });
        }
        self.log(t, TraceKind::Birth, id, parent);
    }

    fn log(&mut self, t: f64, kind: TraceKind, particle: u64, parent: Option<u64>) {
        let (alive, total) = (self.alive, self.born);
        if let Some(records) = self.records.as_mut() {
            records.push(TraceRecord {
                t,
                kind,
                particle,
                parent,
                alive,
                total,
            });
        }
    }
}

/// Event-driven realisation with `options.ancestors` independent ancestor lines born at time zero.
pub fn simulate_cmj(
    law: &ReproductionLaw,
    seed: u64,
    options: &CmjOptions,
) -> Result<PopulationTrace> {
    if options.ancestors == 0 {
        return Err(EpiError::Config("need at least one ancestor".into()));
    }
    let clock = Exp::new(law.beta).map_err(|_| {
        EpiError::InvalidModel(format!("birth rate must be positive, got {}", law.beta))
    })?;
    let mut sim = Cmj {
        law,
        trials: law.trials.sampler(),
        clock,
        lines: (0..options.ancestors as u64)
            .map(|i| vertex_rng(seed, options.first_line + i))
            .collect(),
        queue: BinaryHeap::new(),
        seq: 0,
        alive: 0,
        born: 0,
        max_alive: 0,
        records: options.record.then(Vec::new),
        particles: options.record.then(Vec::new),
    };
    let mut snapshots = vec![None; options.snapshot_times.len()];
    let mut next_snapshot = 0;
    let mut order: Vec<usize> = (0..snapshots.len()).collect();
    order.sort_by(|&a, &b| options.snapshot_times[a].total_cmp(&options.snapshot_times[b]));

    let mut hitting_time = None;
    let mut truncated = false;
    for line in 0..options.ancestors as u32 {
        sim.birth(0.0, None, line);
    }
    let target = options.stop_at_alive;
    let reached = |alive: u64| target.is_some_and(|k| alive >= k);
    let mut end_time = 0.0;
    if reached(sim.alive) {
        hitting_time = Some(0.0);
    }

    while hitting_time.is_none() {
        let Some(event) = sim.queue.pop() else { break };
        let t = event.time;
        while next_snapshot < order.len() && options.snapshot_times[order[next_snapshot]] < t {
            snapshots[order[next_snapshot]] = Some(sim.alive);
            next_snapshot += 1;
        }
        if t > options.horizon {
            end_time = options.horizon;
            break;
        }
        end_time = t;
        match event.pending {
            Pending::Birth { parent, line } => {
                if sim.born >= options.max_born {
                    truncated = true;
                    break;
                }
                sim.birth(t, Some(parent), line);
            }
            Pending::Death { particle } => {
                sim.alive -= 1;
                sim.log(t, TraceKind::Death, particle, None);
            }
        }
        if reached(sim.alive) {
            hitting_time = Some(t);
        }
    }
    let extinct = sim.alive == 0;
    if extinct {
        // Z stays at zero forever
        for &i in &order[next_snapshot..] {
            snapshots[i] = Some(0);
        }
    } else if !truncated && hitting_time.is_none() && sim.queue.is_empty() {
        // immortal particles without pending births: Z is frozen
        for &i in &order[next_snapshot..] {
            snapshots[i] = Some(sim.alive);
        }
    }
    Ok(PopulationTrace {
        seed,
        ancestors: options.ancestors,
        extinct,
        extinction_time: extinct.then_some(end_time),
        truncated,
        hitting_time,
        end_time,
        total_born: sim.born,
        final_alive: sim.alive,
        max_alive: sim.max_alive,
        snapshots,
        records: sim.records,
        particles: sim.particles,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HittingTime {
    /// `T^_k = inf{t : Z(t) >= k}` on the first surviving attempt.
    pub time: Option<f64>,
    /// Attempts made, the accepted one included.
    pub attempts: u32,
    pub extinct_attempts: u32,
    pub truncated_attempts: u32,
    /// Seed of the accepted attempt.
    pub accepted_seed: Option<u64>,
}

/// First time a single-ancestor process reaches `k` alive particles, conditioned
/// on getting there: attempts that die out first are rejected and counted.
pub fn hitting_time_supercritical(
    law: &ReproductionLaw,
    k: u64,
    seed: u64,
    max_attempts: u32,
) -> Result<HittingTime> {
    if law.mean_offspring() <= 1.0 {
        return Err(EpiError::UnsupportedRegime(format!(
            "hitting times need a supercritical law, mean offspring {}",
            law.mean_offspring()
        )));
    }
    let options = CmjOptions {
        stop_at_alive: Some(k),
        ..CmjOptions::default()
    };
    let mut result = HittingTime {
        time: None,
        attempts: 0,
        extinct_attempts: 0,
        truncated_attempts: 0,
        accepted_seed: None,
    };
    for attempt in 0..max_attempts {
        let attempt_seed = derive_seed(seed, attempt as u64);
        let trace = simulate_cmj(law, attempt_seed, &options)?;
        result.attempts += 1;
        if let Some(t) = trace.hitting_time {
            result.time = Some(t);
            result.accepted_seed = Some(attempt_seed);
            return Ok(result);
        }
        if trace.truncated {
            result.truncated_attempts += 1;
        } else {
            result.extinct_attempts += 1;
        }
    }
    Ok(result)
}

/// Extinction time `T^*_k` of the process started from `k` ancestors.
pub fn extinction_time_subcritical(law: &ReproductionLaw, k: usize, seed: u64) -> Result<f64> {
    if law.mean_offspring() >= 1.0 {
        return Err(EpiError::UnsupportedRegime(format!(
            "extinction times need a subcritical law, mean offspring {}",
            law.mean_offspring()
        )));
    }
    let trace = simulate_cmj(
        law,
        seed,
        &CmjOptions {
            ancestors: k,
            ..CmjOptions::default()
        },
    )?;
    trace.extinction_time.ok_or_else(|| {
        EpiError::NoConvergence(format!(
            "subcritical process not extinct after {} births",
            trace.total_born
        ))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn markov(trials: u32, keep: f64) -> ReproductionLaw {
        ReproductionLaw::new(
            TrialsLaw::Constant { count: trials },
            keep,
            1.0,
            InfectiousPeriodModel::exponential(1.0).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn barren_law_dies_with_its_ancestors() {
        let law = ReproductionLaw::new(
            TrialsLaw::Constant { count: 0 },
            1.0,
            1.0,
            InfectiousPeriodModel::constant(2.5).unwrap(),
        )
        .unwrap();
        assert_eq!(extinction_time_subcritical(&law, 1, 3).unwrap(), 2.5);
        assert_eq!(extinction_time_subcritical(&law, 40, 3).unwrap(), 2.5);
    }

    #[test]
    fn hitting_one_is_immediate() {
        let h = hitting_time_supercritical(&markov(4, 1.0), 1, 0, 10).unwrap();
        assert_eq!(h.time, Some(0.0));
        assert_eq!(h.attempts, 1);
    }

    #[test]
    fn growth_rate_closed_form() {
        // 4 trials at rate 1, death rate 1: α′ = 4 - 1 - 1
        assert!((markov(4, 1.0).growth_rate().unwrap().value - 2.0).abs() < 1e-11);
        assert!((markov(4, 1.0).mean_offspring() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn births_respect_lifetimes_and_counts_agree() {
        let trace = simulate_cmj(
            &markov(3, 0.8),
            5,
            &CmjOptions {
                ancestors: 20,
                record: true,
                horizon: 4.0,
                ..CmjOptions::default()
            },
        )
        .unwrap();
        let particles = trace.particles.unwrap();
        for p in &particles {
            if let Some(parent) = p.parent {
                let q = &particles[parent as usize];
                assert!(q.birth <= p.birth && p.birth < q.birth + q.lifetime);
                assert_eq!(q.line, p.line);
            }
        }
        let records = trace.records.unwrap();
        let mut deaths = 0;
        for r in &records {
            if r.kind == TraceKind::Death {
                deaths += 1;
            }
            assert_eq!(r.alive, r.total - deaths);
        }
        assert!(records
            .windows(2)
            .all(|w| w[0].t <= w[1].t && w[0].total <= w[1].total));
    }

    #[test]
    fn regimes_are_checked() {
        assert!(extinction_time_subcritical(&markov(4, 1.0), 1, 0).is_err());
        assert!(hitting_time_supercritical(&markov(1, 1.0), 10, 0, 5).is_err());
    }

    #[test]
    fn final_phase_law_matches_analytics() {
        let p = EpidemicParameters::new(
            DegreeModel::regular(4).unwrap(),
            InfectiousPeriodModel::exponential(1.0).unwrap(),
            1.0,
        )
        .unwrap();
        let law = ReproductionLaw::final_phase(&p).unwrap();
        let s = analytics::summarize(&p).unwrap();
        assert!((law.mean_offspring() - s.r0_star).abs() < 1e-12);
        assert!((law.decay_rate().unwrap().value - s.alpha_star.unwrap()).abs() < 1e-10);
        let early = ReproductionLaw::early_phase(&p);
        assert!((early.growth_rate().unwrap().value - s.alpha_prime.unwrap()).abs() < 1e-10);
    }
}
