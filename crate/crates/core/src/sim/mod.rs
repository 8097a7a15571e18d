//! Event-driven SIR epidemic on a configuration-model multigraph whose
//! half-edges are paired only when an infectious contact first uses them.

mod engine;
mod stats;

use serde::{Deserialize, Serialize};

use crate::distributions::DegreeModel;
use crate::error::{EpiError, Result};
use crate::rng::{stream_rng, SEQUENCE_STREAM};

pub use engine::{
    run_epidemic, weak_extinction_with_lprime, CompletedGraph, EventKind, EventRecord,
    RecoveryRule, SimulationOptions, SimulationOutcome, SimulationRun, VertexRecord,
};
pub use stats::{neighbor_susceptibility_stats, validate_infection_tree, NeighborStats};

/// Redraws of the last degree before an odd total is declared unrepairable.
const MAX_PARITY_REDRAWS: u32 = 10_000;

/// Non-decreasing vertex degrees with an even total.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeSequence {
    degrees: Vec<u32>,
    total: u64,
}

impl DegreeSequence {
    pub fn new(mut degrees: Vec<u32>) -> Result<Self> {
        if degrees.len() < 2 {
            return Err(EpiError::InvalidModel(format!(
                "need at least two vertices, got {}",
                degrees.len()
            )));
        }
        let total: u64 = degrees.iter().map(|&d| d as u64).sum();
        if total % 2 == 1 {
            return Err(EpiError::InvalidModel(format!(
                "total degree {total} is odd"
            )));
        }
        if total >= u32::MAX as u64 {
            return Err(EpiError::InvalidModel(format!(
                "total degree {total} exceeds the supported half-edge count"
            )));
        }
        degrees.sort_unstable();
        Ok(DegreeSequence { degrees, total })
    }

    pub fn n(&self) -> usize {
        self.degrees.len()
    }

    pub fn degrees(&self) -> &[u32] {
        &self.degrees
    }

    /// Number of half-edges `ℓ(n)`.
    pub fn total(&self) -> u64 {
        self.total
    }
}

/// `n` i.i.d. draws from `degree`. An odd total is repaired by redrawing the
/// last vertex until the sum is even, which leaves the other draws untouched.
pub fn sample_degree_sequence(degree: &DegreeModel, n: usize, seed: u64) -> Result<DegreeSequence> {
    if n < 2 {
        return Err(EpiError::InvalidModel(format!(
            "need at least two vertices, got {n}"
        )));
    }
    let mut rng = stream_rng(seed, SEQUENCE_STREAM);
    let mut degrees: Vec<u32> = (0..n).map(|_| degree.sample(&mut rng)).collect();
    let rest: u64 = degrees[..n - 1].iter().map(|&d| d as u64).sum();
    let mut redraws = 0;
    while (rest + degrees[n - 1] as u64) % 2 == 1 {
        redraws += 1;
        if redraws > MAX_PARITY_REDRAWS {
            return Err(EpiError::InvalidModel(
                "degree law cannot produce an even total for this n (all degrees odd?)".into(),
            ));
        }
        degrees[n - 1] = degree.sample(&mut rng);
    }
    DegreeSequence::new(degrees)
}
