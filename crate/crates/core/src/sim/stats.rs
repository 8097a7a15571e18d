//! Post-hoc statistics of a finished run.

use serde::{Deserialize, Serialize};

use super::{SimulationRun, VertexRecord};
use crate::error::{EpiError, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NeighborStats {
    /// Fraction of the neighbours of never-infected vertices that are never infected.
    pub p_ss: f64,
    pub susceptible_vertices: usize,
    /// Half-edges attached to never-infected vertices.
    pub susceptible_half_edges: u64,
    /// `degree_histogram[k]` never-infected vertices have degree `k`.
    pub degree_histogram: Vec<u64>,
}

/// Neighbourhood statistics of the vertices still susceptible at the end.
/// Needs a run made with `complete_graph`.
pub fn neighbor_susceptibility_stats(run: &SimulationRun) -> Result<NeighborStats> {
    let graph = run.graph.as_ref().ok_or_else(|| {
        EpiError::Config("neighbour statistics need a run with complete_graph".into())
    })?;
    let mut histogram = Vec::new();
    let mut vertices = 0usize;
    let mut half_edges = 0u64;
    let mut both = 0u64;
    for v in (0..graph.n()).filter(|&v| graph.is_ultimately_susceptible(v)) {
        vertices += 1;
        let d = graph.degree(v) as usize;
        if histogram.len() <= d {
            histogram.resize(d + 1, 0);
        }
        histogram[d] += 1;
        half_edges += d as u64;
        both += graph
            .neighbors(v)
            .filter(|&w| graph.is_ultimately_susceptible(w))
            .count() as u64;
    }
    if vertices == 0 || half_edges == 0 {
        return Err(EpiError::Domain(
            "no never-infected vertex with a neighbour; statistics are undefined".into(),
        ));
    }
    Ok(NeighborStats {
        p_ss: both as f64 / half_edges as f64,
        susceptible_vertices: vertices,
        susceptible_half_edges: half_edges,
        degree_histogram: histogram,
    })
}

/// Every infector was infectious when it infected: `σ(ζ(v)) <= σ(v) <= retirement(ζ(v))`,
/// and every non-initial vertex was infected at a positive time.
pub fn validate_infection_tree(records: &[VertexRecord]) -> Result<()> {
    let by_vertex: std::collections::HashMap<u32, &VertexRecord> =
        records.iter().map(|r| (r.vertex, r)).collect();
    for r in records {
        let Some(parent) = r.infector else {
            if r.sigma != 0.0 {
                return Err(EpiError::Invariant(format!(
                    "vertex {} has no infector but was infected at {}",
                    r.vertex, r.sigma
                )));
            }
            continue;
        };
        let p = by_vertex.get(&parent).ok_or_else(|| {
            EpiError::Invariant(format!(
                "infector {parent} of {} was never infected",
                r.vertex
            ))
        })?;
        if !(p.sigma <= r.sigma && r.sigma <= p.retirement && r.sigma <= p.sigma + p.period) {
            return Err(EpiError::Invariant(format!(
                "vertex {} infected at {} by {parent}, infectious on [{}, {}]",
                r.vertex, r.sigma, p.sigma, p.retirement
            )));
        }
    }
    Ok(())
}
