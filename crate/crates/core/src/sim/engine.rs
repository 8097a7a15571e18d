//! The event loop.
//!
//! Each infected vertex draws its infectious period and one contact time per
//! unpaired half-edge from its own random stream; pairings and the initial
//! infective come from a separate event stream. Two runs on the same seed that
//! only differ in when vertices retire therefore see identical contacts.
//!
//! `X(t)` is tracked as the number of contact clocks of infectious vertices
//! that have not rung yet. It dominates the number of infectious-susceptible
//! pairs of the completed graph and hits zero exactly when every infected vertex
//! has either recovered or contacted all of its half-edges.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rand::seq::{index, SliceRandom};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};
use serde::{Deserialize, Serialize};

use super::DegreeSequence;
use crate::distributions::InfectiousPeriodModel;
use crate::error::{EpiError, Result};
use crate::rng::{stream_rng, vertex_rng, EVENT_STREAM};

const NONE: u32 = u32::MAX;
/// Per-thread cap on parked buffers of each element type.
const POOL_LIMIT: usize = 16;

// Large fresh allocations are mapped and zeroed by the kernel on every run, which
// dominates replicated runs at large n; finished engines park their buffers here.
#[derive(Default)]
struct Pool {
    words: Vec<Vec<u32>>,
    reals: Vec<Vec<f64>>,
    states: Vec<Vec<Status>>,
}

thread_local! {
    static POOL: RefCell<Pool> = RefCell::new(Pool::default());
}

fn pooled<T: Clone>(pick: fn(&mut Pool) -> &mut Vec<Vec<T>>, len: usize, fill: T) -> Vec<T> {
    let mut v = POOL
        .with(|p| pick(&mut p.borrow_mut()).pop())
        .unwrap_or_default();
    v.clear();
    v.resize(len, fill);
    v
}

fn park<T>(pick: fn(&mut Pool) -> &mut Vec<Vec<T>>, v: &mut Vec<T>) {
    let v = std::mem::take(v);
    if v.capacity() > 0 {
        POOL.with(|p| {
            let mut pool = p.borrow_mut();
            let list = pick(&mut pool);
            if list.len() < POOL_LIMIT {
                list.push(v);
            }
        });
    }
}

fn words(p: &mut Pool) -> &mut Vec<Vec<u32>> {
    &mut p.words
}

fn reals(p: &mut Pool) -> &mut Vec<Vec<f64>> {
    &mut p.reals
}

fn states(p: &mut Pool) -> &mut Vec<Vec<Status>> {
    &mut p.states
}

/// When an infected vertex stops being infectious.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RecoveryRule {
    /// At `σ(v) + L_v`.
    #[default]
    Standard,
    /// At `σ(v) + min(L_v, max_j τ_(v,j))`: once recovered or out of half-edges to contact.
    ContactExhaustion,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SimulationOptions {
    pub recovery_rule: RecoveryRule,
    /// Number of distinct initial infectives, chosen uniformly.
    pub initial_infectives: usize,
    pub record_vertices: bool,
    pub record_events: bool,
    /// Pair the leftover half-edges at the end to obtain the full graph.
    pub complete_graph: bool,
    /// Verify the state invariants after every event (O(n) per event).
    pub check_invariants: bool,
    /// Report the first time the susceptible fraction drops below `1 - γ`.
    pub gamma_levels: Vec<f64>,
}

impl Default for SimulationOptions {
    fn default() -> Self {
        SimulationOptions {
            recovery_rule: RecoveryRule::Standard,
            initial_infectives: 1,
            record_vertices: false,
            record_events: false,
            complete_graph: false,
            check_invariants: false,
            gamma_levels: Vec::new(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimulationOutcome {
    pub seed: u64,
    pub n: usize,
    pub total_degree: u64,
    pub recovery_rule: RecoveryRule,
    /// Last time an infectious vertex exists.
    #[serde(with = "crate::analytics::ext_real")]
    pub t_strong: f64,
    /// First time `X` is zero.
    #[serde(with = "crate::analytics::ext_real")]
    pub t_weak: f64,
    /// Last time the completed graph has an infectious-susceptible edge.
    #[serde(with = "crate::analytics::ext_real::option")]
    pub t_weak_graph: Option<f64>,
    pub final_susceptible_fraction: f64,
    /// Vertices ever infected, initial infectives included.
    pub infections: usize,
    /// More than `ln n` vertices infected.
    pub major: bool,
    pub contacts: u64,
    pub wasted_contacts: u64,
    pub events: u64,
    pub gamma_hitting_times: Vec<Option<f64>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    Infection,
    Recovery,
    /// A contact along an already paired half-edge or onto a non-susceptible vertex.
    WastedContact,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EventRecord {
    pub t: f64,
    pub event_type: EventKind,
    pub vertex: u32,
    /// Half-edge whose contact clock rang.
    pub half_edge: Option<u32>,
    /// Half-edge it was paired with by this event.
    pub partner: Option<u32>,
    pub susceptible: usize,
    pub infectious: usize,
    pub recovered: usize,
    pub x: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VertexRecord {
    pub vertex: u32,
    pub infector: Option<u32>,
    pub sigma: f64,
    #[serde(with = "crate::analytics::ext_real")]
    pub period: f64,
    /// When the vertex stopped being infectious under the run's rule.
    #[serde(with = "crate::analytics::ext_real")]
    pub retirement: f64,
    pub degree: u32,
}

/// The full pairing after the leftover half-edges were matched uniformly.
#[derive(Clone, Debug, PartialEq)]
pub struct CompletedGraph {
    offsets: Vec<u32>,
    partner: Vec<u32>,
    owner: Vec<u32>,
    ultimately_susceptible: Vec<bool>,
}

impl CompletedGraph {
    pub fn n(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn degree(&self, v: usize) -> u32 {
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn is_ultimately_susceptible(&self, v: usize) -> bool {
        self.ultimately_susceptible[v]
    }

    /// Neighbours of `v` with multiplicity, one per half-edge.
    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        (self.offsets[v]..self.offsets[v + 1])
            .map(move |h| self.owner[self.partner[h as usize] as usize] as usize)
    }
}

#[derive(Clone, Debug)]
pub struct SimulationRun {
    pub outcome: SimulationOutcome,
    pub vertices: Option<Vec<VertexRecord>>,
    pub events: Option<Vec<EventRecord>>,
    pub graph: Option<CompletedGraph>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Status {
    S = 0,
    I = 1,
    R = 2,
}

#[derive(Clone, Copy, Debug)]
enum Pending {
    Contact(u32),
    Retire(u32),
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

// Reversed so the max-heap pops the earliest event; ties go to insertion order.
impl Ord for Event {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .time
            .total_cmp(&self.time)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

struct Engine<'a> {
    seed: u64,
    period: &'a InfectiousPeriodModel,
    contact_clock: Exp<f64>,
    options: &'a SimulationOptions,
    rng: ChaCha8Rng,

    offsets: Vec<u32>,
    owner: Vec<u32>,
    partner: Vec<u32>,
    free: Vec<u32>,
    free_pos: Vec<u32>,

    status: Vec<Status>,
    sigma: Vec<f64>,
    infector: Vec<u32>,
    period_len: Vec<f64>,
    retirement: Vec<f64>,
    unfired: Vec<u32>,
    free_degree: Vec<u32>,

    compartment: [usize; 3],
    unpaired_by_status: [u64; 3],
    paired: u64,
    x: u64,

    queue: BinaryHeap<Event>,
    seq: u64,

    t_weak: Option<f64>,
    t_strong: f64,
    infections: usize,
    contacts: u64,
    wasted: u64,
    events: u64,
    gamma_hits: Vec<Option<f64>>,
    log: Option<Vec<EventRecord>>,
}

impl Drop for Engine<'_> {
    fn drop(&mut self) {
        for v in [
            &mut self.offsets,
            &mut self.owner,
            &mut self.partner,
            &mut self.free,
            &mut self.free_pos,
            &mut self.infector,
            &mut self.unfired,
            &mut self.free_degree,
        ] {
            park(words, v);
        }
        for v in [&mut self.sigma, &mut self.period_len, &mut self.retirement] {
            park(reals, v);
        }
        park(states, &mut self.status);
    }
}

impl<'a> Engine<'a> {
    fn new(
        seq: &DegreeSequence,
        beta: f64,
        period: &'a InfectiousPeriodModel,
        seed: u64,
        options: &'a SimulationOptions,
    ) -> Result<Self> {
        let contact_clock = Exp::new(beta).map_err(|_| {
            EpiError::InvalidModel(format!("contact rate must be positive, got {beta}"))
        })?;
        let n = seq.n();
        let total = seq.total() as usize;
        let mut offsets = pooled(words, 0, 0);
        let mut owner = pooled(words, 0, 0);
        offsets.push(0u32);
        for (v, &d) in seq.degrees().iter().enumerate() {
            owner.extend(std::iter::repeat_n(v as u32, d as usize));
            offsets.push(owner.len() as u32);
        }
        let mut free = pooled(words, 0, 0);
        free.extend(0..total as u32);
        let mut free_pos = pooled(words, 0, 0);
        free_pos.extend(0..total as u32);
        let mut free_degree = pooled(words, 0, 0);
        free_degree.extend_from_slice(seq.degrees());
        Ok(Engine {
            seed,
            period,
            contact_clock,
            options,
            rng: stream_rng(seed, EVENT_STREAM),
            offsets,
            owner,
            partner: pooled(words, total, NONE),
            free,
            free_pos,
            status: pooled(states, n, Status::S),
            sigma: pooled(reals, n, f64::INFINITY),
            infector: pooled(words, n, NONE),
            period_len: pooled(reals, n, f64::NAN),
            retirement: pooled(reals, n, f64::NAN),
            unfired: pooled(words, n, 0),
            free_degree,
            compartment: [n, 0, 0],
            unpaired_by_status: [total as u64, 0, 0],
            paired: 0,
            x: 0,
            queue: BinaryHeap::new(),
            seq: 0,
            t_weak: None,
            t_strong: 0.0,
            infections: 0,
            contacts: 0,
            wasted: 0,
            events: 0,
            gamma_hits: vec![None; options.gamma_levels.len()],
            log: options.record_events.then(Vec::new),
        })
    }

    fn n(&self) -> usize {
        self.status.len()
    }

    fn push(&mut self, time: f64, pending: Pending) {
        self.queue.push(Event {
            time,
            seq: self.seq,
            pending,
        });
        self.seq += 1;
    }

    fn record(&mut self, t: f64, event_type: EventKind, vertex: u32, half_edge: u32, partner: u32) {
        let entry = EventRecord {
            t,
            event_type,
            vertex,
            half_edge: (half_edge != NONE).then_some(half_edge),
            partner: (partner != NONE).then_some(partner),
            susceptible: self.compartment[0],
            infectious: self.compartment[1],
            recovered: self.compartment[2],
            x: self.x,
        };
        if let Some(log) = self.log.as_mut() {
            log.push(entry);
        }
    }

    fn take_free(&mut self, h: u32) {
        let i = self.free_pos[h as usize] as usize;
        let last = self.free.pop().expect("free pool holds h");
        if last != h {
            self.free[i] = last;
            self.free_pos[last as usize] = i as u32;
        }
        self.free_pos[h as usize] = NONE;
        let v = self.owner[h as usize] as usize;
        self.free_degree[v] -= 1;
        self.unpaired_by_status[self.status[v] as usize] -= 1;
    }

    fn set_status(&mut self, v: usize, to: Status) {
        let from = self.status[v];
        self.compartment[from as usize] -= 1;
        self.compartment[to as usize] += 1;
        let k = self.free_degree[v] as u64;
        self.unpaired_by_status[from as usize] -= k;
        self.unpaired_by_status[to as usize] += k;
        self.status[v] = to;
    }

    fn infect(&mut self, w: usize, t: f64, by: u32, via: u32, partner: u32) -> Result<()> {
        if self.t_weak.is_some() {
            return Err(EpiError::Invariant(format!(
                "vertex {w} infected at {t} after X reached zero"
            )));
        }
        self.set_status(w, Status::I);
        self.sigma[w] = t;
        self.infector[w] = by;
        self.infections += 1;

        let mut rng = vertex_rng(self.seed, w as u64);
        let length = self.period.sample(&mut rng);
        let mut last_clock = 0.0f64;
        let mut clocks = 0;
        for h in self.offsets[w]..self.offsets[w + 1] {
            if self.partner[h as usize] != NONE {
                continue;
            }
            let tau = self.contact_clock.sample(&mut rng);
            last_clock = last_clock.max(tau);
            clocks += 1;
            if tau < length {
                self.push(t + tau, Pending::Contact(h));
            }
        }
        self.unfired[w] = clocks;
        self.x += clocks as u64;
        let active = match self.options.recovery_rule {
            RecoveryRule::Standard => length,
            RecoveryRule::ContactExhaustion => length.min(last_clock),
        };
        self.period_len[w] = length;
        self.retirement[w] = t + active;
        if self.retirement[w].is_finite() {
            self.push(t + active, Pending::Retire(w as u32));
        }

        let s_frac = self.compartment[0] as f64 / self.n() as f64;
        for (hit, gamma) in self.gamma_hits.iter_mut().zip(&self.options.gamma_levels) {
            if hit.is_none() && s_frac < 1.0 - gamma {
                *hit = Some(t);
            }
        }
        self.record(t, EventKind::Infection, w as u32, via, partner);
        Ok(())
    }

    fn fire(&mut self, h: u32, t: f64) -> Result<()> {
        let v = self.owner[h as usize] as usize;
        self.contacts += 1;
        self.unfired[v] -= 1;
        self.x -= 1;
        if self.partner[h as usize] != NONE {
            self.wasted += 1;
            self.record(t, EventKind::WastedContact, v as u32, h, NONE);
            return Ok(());
        }
        self.take_free(h);
        // ℓ(n) even and h was unpaired, so another unpaired half-edge exists
        let g = self.free[self.rng.random_range(0..self.free.len())];
        self.take_free(g);
        self.partner[h as usize] = g;
        self.partner[g as usize] = h;
        self.paired += 2;
        let w = self.owner[g as usize] as usize;
        if self.status[w] == Status::S {
            self.infect(w, t, v as u32, h, g)
        } else {
            self.wasted += 1;
            self.record(t, EventKind::WastedContact, v as u32, h, g);
            Ok(())
        }
    }

    fn retire(&mut self, v: usize, t: f64) {
        self.set_status(v, Status::R);
        self.x -= self.unfired[v] as u64;
        self.unfired[v] = 0;
        self.t_strong = self.t_strong.max(t);
        self.record(t, EventKind::Recovery, v as u32, NONE, NONE);
    }

    fn check(&self) -> Result<()> {
        let fail = |what: String| Err(EpiError::Invariant(what));
        let n = self.n();
        if self.compartment.iter().sum::<usize>() != n {
            return fail(format!("|S|+|I|+|R| = {:?} != {n}", self.compartment));
        }
        let total = self.owner.len() as u64;
        let unpaired: u64 = self.unpaired_by_status.iter().sum();
        if unpaired + self.paired != total
            || unpaired != self.free.len() as u64
            || self.paired % 2 == 1
        {
            return fail(format!(
                "half-edge partition {:?} + {} does not cover {total}",
                self.unpaired_by_status, self.paired
            ));
        }
        if !self.options.check_invariants {
            return Ok(());
        }
        let mut by_status = [0u64; 3];
        let mut compartment = [0usize; 3];
        let mut x = 0u64;
        for v in 0..n {
            let s = self.status[v] as usize;
            compartment[s] += 1;
            by_status[s] += self.free_degree[v] as u64;
            if self.status[v] == Status::I {
                x += self.unfired[v] as u64;
            } else if self.unfired[v] != 0 {
                return fail(format!("non-infectious vertex {v} holds contact clocks"));
            }
        }
        if by_status != self.unpaired_by_status || compartment != self.compartment {
            return fail("status bookkeeping drifted".into());
        }
        if x != self.x {
            return fail(format!("X = {} but clocks sum to {x}", self.x));
        }
        Ok(())
    }

    fn run(mut self) -> Result<SimulationRun> {
        let n = self.n();
        let k = self.options.initial_infectives;
        if k == 0 || k > n {
            return Err(EpiError::Config(format!(
                "initial infectives must lie in 1..={n}, got {k}"
            )));
        }
        let seeds: Vec<usize> = index::sample(&mut self.rng, n, k).into_iter().collect();
        for v in seeds {
            self.infect(v, 0.0, NONE, NONE, NONE)?;
        }
        if self.x == 0 {
            self.t_weak = Some(0.0);
        }
        self.check()?;

        while let Some(event) = self.queue.pop() {
            let t = event.time;
            self.events += 1;
            match event.pending {
                Pending::Contact(h) => self.fire(h, t)?,
                Pending::Retire(v) => self.retire(v as usize, t),
            }
            if self.x == 0 && self.t_weak.is_none() {
                self.t_weak = Some(t);
            }
            if self.options.check_invariants || cfg!(debug_assertions) {
                self.check()?;
            }
        }

        let t_strong = if self.compartment[1] > 0 {
            f64::INFINITY
        } else {
            self.t_strong
        };
        let t_weak = self.t_weak.unwrap_or(t_strong);
        if t_weak > t_strong {
            return Err(EpiError::Invariant(format!(
                "T† = {t_weak} exceeds T* = {t_strong}"
            )));
        }

        let vertices = self.options.record_vertices.then(|| {
            (0..n)
                .filter(|&v| self.status[v] != Status::S)
                .map(|v| VertexRecord {
                    vertex: v as u32,
                    infector: (self.infector[v] != NONE).then_some(self.infector[v]),
                    sigma: self.sigma[v],
                    period: self.period_len[v],
                    retirement: self.retirement[v],
                    degree: self.offsets[v + 1] - self.offsets[v],
                })
                .collect()
        });

        let total_degree = self.owner.len() as u64;
        let mut t_weak_graph = None;
        let graph = if self.options.complete_graph {
            let mut rest = std::mem::take(&mut self.free);
            rest.shuffle(&mut self.rng);
            for pair in rest.chunks_exact(2) {
                self.partner[pair[0] as usize] = pair[1];
                self.partner[pair[1] as usize] = pair[0];
            }
            t_weak_graph = Some(self.graph_weak_extinction());
            Some(CompletedGraph {
                ultimately_susceptible: self.status.iter().map(|&s| s == Status::S).collect(),
                offsets: std::mem::take(&mut self.offsets),
                partner: std::mem::take(&mut self.partner),
                owner: std::mem::take(&mut self.owner),
            })
        } else {
            None
        };

        let susceptible = self.compartment[0];
        let outcome = SimulationOutcome {
            seed: self.seed,
            n,
            total_degree,
            recovery_rule: self.options.recovery_rule,
            t_strong,
            t_weak,
            t_weak_graph,
            final_susceptible_fraction: susceptible as f64 / n as f64,
            infections: self.infections,
            major: self.infections as f64 > (n as f64).ln(),
            contacts: self.contacts,
            wasted_contacts: self.wasted,
            events: self.events,
            gamma_hitting_times: std::mem::take(&mut self.gamma_hits),
        };
        Ok(SimulationRun {
            outcome,
            vertices,
            events: self.log.take(),
            graph,
        })
    }

    /// Last time an edge of the completed graph joins an infectious and a susceptible vertex.
    fn graph_weak_extinction(&self) -> f64 {
        let mut last = 0.0f64;
        for (h, &g) in self.partner.iter().enumerate() {
            let u = self.owner[h] as usize;
            let w = self.owner[g as usize] as usize;
            let start = self.sigma[u];
            if start.is_finite() && self.sigma[w] > start {
                let end = self.retirement[u].min(self.sigma[w]);
                if end > start {
                    last = last.max(end);
                }
            }
        }
        last
    }
}

/// One epidemic on a lazily paired configuration model.
pub fn run_epidemic(
    seq: &DegreeSequence,
    beta: f64,
    period: &InfectiousPeriodModel,
    seed: u64,
    options: &SimulationOptions,
) -> Result<SimulationRun> {
    Engine::new(seq, beta, period, seed, options)?.run()
}

/// Same randomness as [`run_epidemic`], with every vertex retired once it has
/// recovered or used all of its contact clocks. Its strong extinction time is
/// the weak extinction time of the standard run.
pub fn weak_extinction_with_lprime(
    seq: &DegreeSequence,
    beta: f64,
    period: &InfectiousPeriodModel,
    seed: u64,
    options: &SimulationOptions,
) -> Result<SimulationRun> {
    let options = SimulationOptions {
        recovery_rule: RecoveryRule::ContactExhaustion,
        ..options.clone()
    };
    let engine = Engine::new(seq, beta, period, seed, &options)?;
    engine.run()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::DegreeModel;
    use crate::sim::sample_degree_sequence;

    #[test]
    fn zero_period_infects_only_the_seed() {
        let seq = DegreeSequence::new(vec![3; 10]).unwrap();
        let period = InfectiousPeriodModel::constant(0.0).unwrap();
        let run = run_epidemic(&seq, 5.0, &period, 7, &SimulationOptions::default()).unwrap();
        assert_eq!(run.outcome.infections, 1);
        assert_eq!(run.outcome.t_strong, 0.0);
        assert!(!run.outcome.major);
    }

    #[test]
    fn isolated_seed() {
        let seq = DegreeSequence::new(vec![0, 0, 2]).unwrap();
        let period = InfectiousPeriodModel::constant(1.5).unwrap();
        // find a seed whose initial infective is isolated
        let run = (0..50)
            .map(|s| run_epidemic(&seq, 1.0, &period, s, &SimulationOptions::default()).unwrap())
            .find(|r| r.outcome.contacts == 0 && r.outcome.t_weak == 0.0)
            .unwrap();
        assert_eq!(run.outcome.t_strong, 1.5);
        assert_eq!(run.outcome.infections, 1);
    }

    #[test]
    fn event_log_is_consistent() {
        let seq = sample_degree_sequence(&DegreeModel::poisson(3.0).unwrap(), 300, 3).unwrap();
        let period = InfectiousPeriodModel::exponential(1.0).unwrap();
        let options = SimulationOptions {
            record_events: true,
            record_vertices: true,
            complete_graph: true,
            check_invariants: true,
            ..SimulationOptions::default()
        };
        let run = run_epidemic(&seq, 1.0, &period, 11, &options).unwrap();
        let log = run.events.unwrap();
        assert!(log.windows(2).all(|w| w[0].t <= w[1].t));
        let infections = log
            .iter()
            .filter(|e| e.event_type == EventKind::Infection)
            .count();
        assert_eq!(infections, run.outcome.infections);
        assert_eq!(run.vertices.unwrap().len(), run.outcome.infections);
        let o = run.outcome;
        assert!(o.t_weak_graph.unwrap() <= o.t_weak && o.t_weak <= o.t_strong);
        let last = log.last().unwrap();
        assert_eq!(last.infectious, 0);
        assert_eq!(last.x, 0);
    }

    #[test]
    fn deterministic_given_seed() {
        let seq = sample_degree_sequence(&DegreeModel::regular(4).unwrap(), 500, 1).unwrap();
        let period = InfectiousPeriodModel::gamma(2.0, 2.0).unwrap();
        let a = run_epidemic(&seq, 1.0, &period, 99, &SimulationOptions::default()).unwrap();
        let b = run_epidemic(&seq, 1.0, &period, 99, &SimulationOptions::default()).unwrap();
        assert_eq!(a.outcome, b.outcome);
    }
}
