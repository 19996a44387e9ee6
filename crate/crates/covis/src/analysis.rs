//! Structural and spatial metrics over a hypergraph: degree CCDF, hyperedge
//! size distribution, Chebyshev spans of higher-order edges, degree heatmaps,
//! and the POI-count vs degree power-law relation.

use crate::error::{Error, Result};
use crate::fitting::{fit_power_law, PowerLawFit};
use crate::grid::{chebyshev, GridSpec, LocationId};
use crate::hypergraph::{Hyperedge, Hypergraph};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::io::{self, BufRead, Write};

/// One CCDF point: the fraction of nodes with degree at least `k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CcdfPoint {
    pub k: u64,
    /// Exact node count with degree >= k.
    pub count: usize,
    /// `count / |V|`.
    pub p: f64,
}

/// Complementary cumulative degree distribution over all nodes of the
/// hypergraph (zero-degree nodes included in the denominator).
#[derive(Debug, Clone, PartialEq)]
pub struct CcdfCurve {
    points: Vec<CcdfPoint>,
    n_nodes: usize,
}

impl CcdfCurve {
    pub fn points(&self) -> &[CcdfPoint] {
        &self.points
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    pub fn p_at(&self, k: u64) -> f64 {
        self.points
            .iter()
            .find(|pt| pt.k == k)
            .map(|pt| pt.p)
            .unwrap_or(0.0)
    }

    /// CSV with header `k,p`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "k,p")?;
        for pt in &self.points {
            writeln!(w, "{},{}", pt.k, pt.p)?;
        }
        Ok(())
    }
}

/// CCDF with `k` ranging 0..=max_degree+1 (the final point is always 0,
/// closing the curve).
pub fn degree_ccdf(hg: &Hypergraph) -> CcdfCurve {
    let n_nodes = hg.num_nodes();
    assert!(n_nodes >= 1, "CCDF needs at least one node");
    let max_degree = hg.degrees().map(|(_, d)| d).max().unwrap_or(0);

    let mut hist = vec![0usize; max_degree as usize + 1];
    for (_, d) in hg.degrees() {
        hist[d as usize] += 1;
    }
    let mut points = Vec::with_capacity(max_degree as usize + 2);
    let mut at_least = n_nodes;
    for k in 0..=max_degree {
        points.push(CcdfPoint {
            k,
            count: at_least,
            p: at_least as f64 / n_nodes as f64,
        });
        at_least -= hist[k as usize];
    }
    points.push(CcdfPoint {
        k: max_degree + 1,
        count: 0,
        p: 0.0,
    });
    CcdfCurve { points, n_nodes }
}

/// Exact hyperedge size counts; empty for an edgeless hypergraph.
pub fn hyperedge_size_histogram(hg: &Hypergraph) -> BTreeMap<usize, u64> {
    let mut hist = BTreeMap::new();
    for e in hg.edges() {
        *hist.entry(e.size()).or_insert(0) += 1;
    }
    hist
}

/// CSV with header `size,count`.
pub fn write_size_histogram_csv<W: Write>(
    hist: &BTreeMap<usize, u64>,
    mut w: W,
) -> io::Result<()> {
    writeln!(w, "size,count")?;
    for (size, count) in hist {
        writeln!(w, "{size},{count}")?;
    }
    Ok(())
}

/// Max pairwise Chebyshev distance among the cells of one edge.
pub fn edge_chebyshev_span(hg: &Hypergraph, edge: &Hyperedge) -> u32 {
    let grid = hg.grid();
    let cells: Vec<(u32, u32)> = edge.items().iter().map(|&it| grid.cell(it)).collect();
    let mut best = 0;
    for i in 0..cells.len() {
        for j in i + 1..cells.len() {
            best = best.max(chebyshev(cells[i], cells[j]));
        }
    }
    best
}

/// Max Chebyshev span over the edges of size >= `min_edge_size`; errors when
/// no edge qualifies (so an absent value is never conflated with 0).
pub fn max_chebyshev(hg: &Hypergraph, min_edge_size: usize) -> Result<u32> {
    hg.edges()
        .iter()
        .filter(|e| e.size() >= min_edge_size)
        .map(|e| edge_chebyshev_span(hg, e))
        .max()
        .ok_or(Error::NoQualifyingEdges { min_edge_size })
}

/// Node degrees arranged on the aggregated grid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeGrid {
    pub width: u32,
    pub height: u32,
    /// `rows[y][x]` = degree of the cell at (x, y).
    pub rows: Vec<Vec<u64>>,
    pub max_degree: u64,
}

impl DegreeGrid {
    /// CSV matrix, one row per y (no header).
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        for row in &self.rows {
            let line: Vec<String> = row.iter().map(|d| d.to_string()).collect();
            writeln!(w, "{}", line.join(","))?;
        }
        Ok(())
    }
}

/// Degrees of every grid cell; cells outside the hypergraph's node set
/// (possible after k-uniform cropping) are 0.
pub fn degree_heatmap(hg: &Hypergraph) -> DegreeGrid {
    let grid = hg.grid();
    let mut rows = vec![vec![0u64; grid.width() as usize]; grid.height() as usize];
    let mut max_degree = 0;
    for (node, d) in hg.degrees() {
        let (x, y) = grid.cell(node);
        rows[y as usize][x as usize] = d;
        max_degree = max_degree.max(d);
    }
    DegreeGrid {
        width: grid.width(),
        height: grid.height(),
        rows,
        max_degree,
    }
}

/// Total POI count per aggregated cell.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PoiTable {
    counts: Vec<u64>,
}

impl PoiTable {
    pub fn from_counts(counts: Vec<u64>) -> Self {
        PoiTable { counts }
    }

    /// Parse `x,y,category,count` rows on the raw grid, summing counts into
    /// aggregated cells; the category column is carried by the format but not
    /// used by the fits.
    pub fn from_csv<R: BufRead>(reader: R, spec: &GridSpec) -> Result<Self> {
        let agg = spec.aggregated();
        let mut counts = vec![0u64; agg.num_cells()];
        let mut lines = reader.lines();
        let header = lines
            .next()
            .transpose()?
            .ok_or_else(|| Error::MalformedRow {
                line: 1,
                msg: "empty POI input, expected header `x,y,category,count`".into(),
            })?;
        if header.trim_end_matches('\r') != "x,y,category,count" {
            return Err(Error::MalformedRow {
                line: 1,
                msg: format!("bad POI header `{header}`"),
            });
        }
        for (idx, line) in lines.enumerate() {
            let line_no = idx + 2;
            let line = line?;
            let line = line.trim_end_matches('\r');
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 4 {
                return Err(Error::MalformedRow {
                    line: line_no,
                    msg: format!("expected 4 fields, got {}", fields.len()),
                });
            }
            let parse_u32 = |name: &'static str, raw: &str| -> Result<u32> {
                raw.parse().map_err(|_| Error::MalformedRow {
                    line: line_no,
                    msg: format!("field `{name}` is not an integer: `{raw}`"),
                })
            };
            let x = parse_u32("x", fields[0])?;
            let y = parse_u32("y", fields[1])?;
            let count: u64 = fields[3].parse().map_err(|_| Error::MalformedRow {
                line: line_no,
                msg: format!("field `count` is not an integer: `{}`", fields[3]),
            })?;
            if x >= spec.raw_width {
                return Err(Error::FieldOutOfRange {
                    line: line_no,
                    field: "x",
                    value: x as u64,
                    bound: format!("[0, {})", spec.raw_width),
                });
            }
            if y >= spec.raw_height {
                return Err(Error::FieldOutOfRange {
                    line: line_no,
                    field: "y",
                    value: y as u64,
                    bound: format!("[0, {})", spec.raw_height),
                });
            }
            let (cx, cy) = spec.aggregate_cell(x, y);
            counts[agg.id(cx, cy).index()] += count;
        }
        Ok(PoiTable { counts })
    }

    pub fn get(&self, id: LocationId) -> u64 {
        self.counts.get(id.index()).copied().unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }
}

/// Power-law relation between POI count (x) and node degree (y), fitted on
/// log-log pairs over the nodes where both are positive.
pub fn poi_degree_fit(poi: &PoiTable, hg: &Hypergraph) -> Result<PowerLawFit> {
    let points: Vec<(f64, f64)> = hg
        .degrees()
        .filter(|&(node, d)| d > 0 && poi.get(node) > 0)
        .map(|(node, d)| (poi.get(node) as f64, d as f64))
        .collect();
    fit_power_law(&points)
}

/// `max_chebyshev` result in serializable form; `None` when no edge of the
/// required size exists.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChebyshevReport {
    pub min_edge_size: usize,
    pub d_inf: Option<u32>,
}

pub fn chebyshev_report(hg: &Hypergraph, min_edge_size: usize) -> ChebyshevReport {
    ChebyshevReport {
        min_edge_size,
        d_inf: max_chebyshev(hg, min_edge_size).ok(),
    }
}
