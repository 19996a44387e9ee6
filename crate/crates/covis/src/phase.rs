//! Paired hypergraphs over two labeled day ranges (e.g. regular vs emergency
//! days) built under identical parameters, and the difference reports between
//! them: size-distribution deltas, Chebyshev-span deltas, and co-degree edges
//! unique to one phase.

use crate::analysis::{hyperedge_size_histogram, max_chebyshev};
use crate::error::{Error, Result};
use crate::hypergraph::{CoDegreeEdge, CoDegreeGraph, Hypergraph};
use crate::ingest::VisitLog;
use crate::mining::{fp_growth, MiningParams, MinSup};
use crate::window::{build_transactions, WindowSpec};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::ops::Range;

/// A labeled day range; phases in one comparison must not overlap.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhaseSpec {
    pub label: String,
    pub days: Range<u32>,
}

impl PhaseSpec {
    pub fn new(label: impl Into<String>, days: Range<u32>) -> Self {
        PhaseSpec {
            label: label.into(),
            days,
        }
    }
}

/// Run the full pipeline (slice, window, mine, construct) over one phase.
/// Supports are relative to the phase's own transaction count.
pub fn build_phase(
    log: &VisitLog,
    phase: &PhaseSpec,
    delta_t: u32,
    params: &MiningParams,
) -> Result<Hypergraph> {
    phase_pipeline(log, phase, delta_t, params).map(|(_, hg)| hg)
}

fn phase_pipeline(
    log: &VisitLog,
    phase: &PhaseSpec,
    delta_t: u32,
    params: &MiningParams,
) -> Result<(usize, Hypergraph)> {
    let range = log.day_range();
    if phase.days.start < range.start || phase.days.end > range.end {
        return Err(Error::PhaseOutOfRange {
            label: phase.label.clone(),
            lo: phase.days.start,
            hi: phase.days.end,
        });
    }
    let sliced = log.slice_days(phase.days.clone())?;
    let dataset = build_transactions(&sliced, WindowSpec::new(delta_t)?)?;
    if dataset.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let patterns = fp_growth(&dataset, params)?;
    let hg = Hypergraph::from_patterns(&patterns, log.grid_spec())?;
    Ok((dataset.len(), hg))
}

/// Set difference on co-degree graphs: edges present only in `a` (with `a`'s
/// weights) and edges present only in `b` (with `b`'s weights).
pub fn diff_co_degree(
    a: &CoDegreeGraph,
    b: &CoDegreeGraph,
) -> (Vec<CoDegreeEdge>, Vec<CoDegreeEdge>) {
    assert_eq!(
        a.min_edge_size(),
        b.min_edge_size(),
        "co-degree graphs must share the edge-size floor"
    );
    let only = |from: &CoDegreeGraph, other: &CoDegreeGraph| {
        from.edges()
            .iter()
            .filter(|e| other.weight(e.u, e.v).is_none())
            .copied()
            .collect()
    };
    (only(a, b), only(b, a))
}

/// Per-phase metrics for one (delta_t, min_sup) grid cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseMetrics {
    pub label: String,
    /// Transactions in this phase (the support denominator).
    pub m: usize,
    pub num_edges: usize,
    pub size_histogram: BTreeMap<usize, u64>,
    /// Max Chebyshev span over edges of size >= the co-degree floor; absent
    /// (never zero) when no edge qualifies.
    pub max_chebyshev: Option<u32>,
}

/// Co-degree edges seen in exactly one phase.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UniqueCoDegreeEdges {
    pub label: String,
    pub edges: Vec<CoDegreeEdge>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonCell {
    pub delta_t: u32,
    pub min_sup: MinSup,
    pub phases: Vec<PhaseMetrics>,
    pub unique_co_degree: Vec<UniqueCoDegreeEdges>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseInfo {
    pub label: String,
    pub day_lo: u32,
    pub day_hi: u32,
}

/// Full comparison over the (delta_t, min_sup) grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub phases: Vec<PhaseInfo>,
    pub min_size: usize,
    /// Edge-size floor applied to Chebyshev spans and co-degree graphs.
    pub co_degree_min_edge_size: usize,
    pub cells: Vec<ComparisonCell>,
}

impl ComparisonReport {
    /// Canonical JSON rendering; identical inputs produce identical bytes.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Evaluate every (delta_t, min_sup) cell for both phases.
///
/// Requires disjoint phases, each long enough for the largest window.
pub fn compare_phases(
    log: &VisitLog,
    phases: &[PhaseSpec; 2],
    delta_ts: &[u32],
    min_sups: &[MinSup],
    min_size: usize,
    co_degree_min_edge_size: usize,
) -> Result<ComparisonReport> {
    let [a, b] = phases;
    if a.days.start < b.days.end && b.days.start < a.days.end {
        return Err(Error::InvalidParam(format!(
            "phases `{}` and `{}` overlap",
            a.label, b.label
        )));
    }
    if delta_ts.is_empty() || min_sups.is_empty() {
        return Err(Error::InvalidParam(
            "need at least one delta_t and one min_sup".into(),
        ));
    }
    for phase in phases {
        let len = phase.days.end.saturating_sub(phase.days.start);
        for &dt in delta_ts {
            if len < dt {
                return Err(Error::WindowTooLong {
                    delta_t: dt,
                    horizon: len,
                });
            }
        }
    }

    let grid_cells: Vec<(u32, MinSup)> = delta_ts
        .iter()
        .flat_map(|&dt| min_sups.iter().map(move |&ms| (dt, ms)))
        .collect();

    let cells: Vec<ComparisonCell> = grid_cells
        .par_iter()
        .map(|&(delta_t, min_sup)| -> Result<ComparisonCell> {
            let params = MiningParams::new(min_sup, min_size)?;
            let mut metrics = Vec::with_capacity(2);
            let mut co_degrees = Vec::with_capacity(2);
            for phase in phases {
                let (m, hg) = phase_pipeline(log, phase, delta_t, &params)?;
                metrics.push(PhaseMetrics {
                    label: phase.label.clone(),
                    m,
                    num_edges: hg.num_edges(),
                    size_histogram: hyperedge_size_histogram(&hg),
                    max_chebyshev: max_chebyshev(&hg, co_degree_min_edge_size).ok(),
                });
                co_degrees.push(hg.co_degree_graph(co_degree_min_edge_size));
            }
            let (only_a, only_b) = diff_co_degree(&co_degrees[0], &co_degrees[1]);
            Ok(ComparisonCell {
                delta_t,
                min_sup,
                phases: metrics,
                unique_co_degree: vec![
                    UniqueCoDegreeEdges {
                        label: phases[0].label.clone(),
                        edges: only_a,
                    },
                    UniqueCoDegreeEdges {
                        label: phases[1].label.clone(),
                        edges: only_b,
                    },
                ],
            })
        })
        .collect::<Result<_>>()?;

    Ok(ComparisonReport {
        phases: phases
            .iter()
            .map(|p| PhaseInfo {
                label: p.label.clone(),
                day_lo: p.days.start,
                day_hi: p.days.end,
            })
            .collect(),
        min_size,
        co_degree_min_edge_size,
        cells,
    })
}
