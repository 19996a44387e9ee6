//! The co-visitation hypergraph: grid locations as nodes, frequent itemsets
//! as weighted hyperedges, plus the structural primitives built on it
//! (incidence, degree, rank, k-uniform subhypergraphs, bipartite export,
//! co-degree graphs) and the on-disk format.

use crate::error::{Error, Result};
use crate::grid::{Grid, GridSpec, LocationId};
use crate::mining::{write_pattern_line, PatternSet};
use std::collections::BTreeMap;
use std::io::{self, BufRead, Write};

/// A hyperedge: a set of locations with the support it was mined at.
#[derive(Debug, Clone, PartialEq)]
pub struct Hyperedge {
    /// Strictly ascending location ids.
    items: Vec<LocationId>,
    /// Support fraction of the originating pattern.
    weight: f64,
    /// Absolute occurrence count of the originating pattern.
    count: u64,
}

impl Hyperedge {
    pub fn items(&self) -> &[LocationId] {
        &self.items
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn size(&self) -> usize {
        self.items.len()
    }
}

/// Immutable weighted hypergraph over an aggregated grid.
///
/// Constructed from mined patterns the node set is the full grid (isolated
/// cells included); k-uniform extraction crops it to incident nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct Hypergraph {
    grid: Grid,
    /// Strictly ascending.
    nodes: Vec<LocationId>,
    /// Canonical order: size ascending, then lexicographic on item ids.
    edges: Vec<Hyperedge>,
    /// Aligned with `nodes`.
    degrees: Vec<u64>,
}

impl Hypergraph {
    /// One hyperedge per mined pattern, weighted by its support; the node set
    /// is every cell of the aggregated grid.
    pub fn from_patterns(patterns: &PatternSet, spec: &GridSpec) -> Result<Self> {
        let grid = spec.aggregated();
        let m = patterns.m();
        let edges: Vec<Hyperedge> = patterns
            .patterns()
            .iter()
            .map(|p| Hyperedge {
                items: p.items.clone(),
                weight: p.support(m),
                count: p.count,
            })
            .collect();
        Self::with_full_node_set(grid, edges)
    }

    /// Build from explicit edges; items are sorted per edge and edges are put
    /// in canonical order. Duplicate edge sets or out-of-grid items error.
    pub fn from_edges(grid: Grid, edges: Vec<(Vec<LocationId>, f64, u64)>) -> Result<Self> {
        let mut edges: Vec<Hyperedge> = edges
            .into_iter()
            .map(|(mut items, weight, count)| {
                items.sort_unstable();
                items.dedup();
                Hyperedge {
                    items,
                    weight,
                    count,
                }
            })
            .collect();
        edges.sort_by(|a, b| a.size().cmp(&b.size()).then_with(|| a.items.cmp(&b.items)));
        for pair in edges.windows(2) {
            if pair[0].items == pair[1].items {
                return Err(Error::InvalidParam(format!(
                    "duplicate hyperedge {:?}",
                    pair[0].items
                )));
            }
        }
        Self::with_full_node_set(grid, edges)
    }

    fn with_full_node_set(grid: Grid, edges: Vec<Hyperedge>) -> Result<Self> {
        let cells = grid.num_cells();
        for e in &edges {
            for &item in &e.items {
                if !grid.contains(item) {
                    return Err(Error::ItemOutsideGrid { item, cells });
                }
            }
        }
        let nodes: Vec<LocationId> = (0..cells as u32).map(LocationId).collect();
        let degrees = compute_degrees(&nodes, &edges);
        Ok(Hypergraph {
            grid,
            nodes,
            edges,
            degrees,
        })
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn nodes(&self) -> &[LocationId] {
        &self.nodes
    }

    pub fn edges(&self) -> &[Hyperedge] {
        &self.edges
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    fn node_index(&self, v: LocationId) -> Option<usize> {
        self.nodes.binary_search(&v).ok()
    }

    /// Number of hyperedges incident on `v`.
    pub fn degree(&self, v: LocationId) -> Result<u64> {
        self.node_index(v)
            .map(|i| self.degrees[i])
            .ok_or(Error::UnknownNode(v))
    }

    /// `(node, degree)` pairs in node order.
    pub fn degrees(&self) -> impl Iterator<Item = (LocationId, u64)> + '_ {
        self.nodes.iter().copied().zip(self.degrees.iter().copied())
    }

    /// Sparse boolean incidence matrix: rows are nodes (in node order),
    /// columns are edges (in edge order).
    pub fn incidence_matrix(&self) -> IncidenceMatrix {
        let cols = self
            .edges
            .iter()
            .map(|e| {
                e.items
                    .iter()
                    .map(|&it| self.node_index(it).expect("edge items are nodes"))
                    .collect()
            })
            .collect();
        IncidenceMatrix {
            n_rows: self.nodes.len(),
            n_cols: self.edges.len(),
            cols,
        }
    }

    /// Maximum hyperedge size; 0 for an edgeless hypergraph.
    pub fn rank(&self) -> usize {
        self.edges.iter().map(|e| e.size()).max().unwrap_or(0)
    }

    /// Subhypergraph induced by the edges of size exactly `k`, with the node
    /// set cropped to the nodes incident to a retained edge.
    pub fn k_uniform_sub(&self, k: usize) -> Hypergraph {
        assert!(k >= 1, "k-uniform extraction needs k >= 1");
        let edges: Vec<Hyperedge> = self
            .edges
            .iter()
            .filter(|e| e.size() == k)
            .cloned()
            .collect();
        let mut nodes: Vec<LocationId> = edges
            .iter()
            .flat_map(|e| e.items.iter().copied())
            .collect();
        nodes.sort_unstable();
        nodes.dedup();
        let degrees = compute_degrees(&nodes, &edges);
        Hypergraph {
            grid: self.grid,
            nodes,
            edges,
            degrees,
        }
    }

    /// Bipartite form: one `(edge index, node)` pair per incidence, ordered
    /// by edge index, then node id.
    pub fn bipartite_edges(&self) -> Vec<(usize, LocationId)> {
        self.edges
            .iter()
            .enumerate()
            .flat_map(|(j, e)| e.items.iter().map(move |&it| (j, it)))
            .collect()
    }

    /// Pairwise co-occurrence counts over the edges of size >= `min_edge_size`.
    ///
    /// Panics if `min_edge_size < 2` (a pair cannot co-occur in a smaller edge).
    pub fn co_degree_graph(&self, min_edge_size: usize) -> CoDegreeGraph {
        assert!(min_edge_size >= 2, "co-degree needs edges of size >= 2");
        let mut weights: BTreeMap<(LocationId, LocationId), u64> = BTreeMap::new();
        for e in self.edges.iter().filter(|e| e.size() >= min_edge_size) {
            for i in 0..e.items.len() {
                for j in i + 1..e.items.len() {
                    *weights.entry((e.items[i], e.items[j])).or_insert(0) += 1;
                }
            }
        }
        CoDegreeGraph {
            min_edge_size,
            edges: weights
                .into_iter()
                .map(|((u, v), weight)| CoDegreeEdge { u, v, weight })
                .collect(),
        }
    }

    /// Serialize: `covis-hg v1 <grid_w> <grid_h> <n_edges>` header, then one
    /// pattern-format line per edge. Round-trips bit-exactly through [`read`].
    ///
    /// [`read`]: Hypergraph::read
    pub fn write<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(
            w,
            "covis-hg v1 {} {} {}",
            self.grid.width(),
            self.grid.height(),
            self.edges.len()
        )?;
        for e in &self.edges {
            write_pattern_line(&mut w, &e.items, e.weight, e.count)?;
        }
        Ok(())
    }

    /// Parse the format produced by [`write`]; the node set is the full grid.
    /// Validation is strict: edge lines must be in canonical order.
    ///
    /// [`write`]: Hypergraph::write
    pub fn read<R: BufRead>(reader: R) -> Result<Self> {
        let bad = |line: usize, msg: String| Error::BadHypergraphFile { line, msg };
        let mut lines = reader.lines();
        let header = lines
            .next()
            .transpose()?
            .ok_or_else(|| bad(1, "empty file".into()))?;
        let header = header.trim_end_matches('\r');
        let fields: Vec<&str> = header.split(' ').collect();
        if fields.len() != 5 || fields[0] != "covis-hg" || fields[1] != "v1" {
            return Err(bad(1, format!("bad header `{header}`")));
        }
        let width: u32 = fields[2]
            .parse()
            .map_err(|_| bad(1, "bad grid width".into()))?;
        let height: u32 = fields[3]
            .parse()
            .map_err(|_| bad(1, "bad grid height".into()))?;
        let n_edges: usize = fields[4]
            .parse()
            .map_err(|_| bad(1, "bad edge count".into()))?;
        if width == 0 || height == 0 {
            return Err(bad(1, "grid dimensions must be positive".into()));
        }
        let grid = Grid::new(width, height);

        let mut edges: Vec<Hyperedge> = Vec::with_capacity(n_edges);
        for (idx, line) in lines.enumerate() {
            let line_no = idx + 2;
            let line = line?;
            let line = line.trim_end_matches('\r');
            let mut cols = line.split('\t');
            let mut col = |name: &str| {
                cols.next()
                    .ok_or_else(|| bad(line_no, format!("missing column `{name}`")))
            };
            let size: usize = col("size")?
                .parse()
                .map_err(|_| bad(line_no, "bad size".into()))?;
            let weight: f64 = col("support")?
                .parse()
                .map_err(|_| bad(line_no, "bad support".into()))?;
            let count: u64 = col("count")?
                .parse()
                .map_err(|_| bad(line_no, "bad count".into()))?;
            let items: Vec<LocationId> = col("items")?
                .split(' ')
                .map(|tok| {
                    tok.parse::<u32>()
                        .map(LocationId)
                        .map_err(|_| bad(line_no, format!("bad item id `{tok}`")))
                })
                .collect::<Result<_>>()?;
            if cols.next().is_some() {
                return Err(bad(line_no, "trailing columns".into()));
            }
            if items.len() != size {
                return Err(bad(line_no, "size column disagrees with item list".into()));
            }
            if !items.windows(2).all(|w| w[0] < w[1]) {
                return Err(bad(line_no, "item ids must be strictly ascending".into()));
            }
            if !(weight > 0.0 && weight <= 1.0) {
                return Err(bad(line_no, format!("support {weight} outside (0, 1]")));
            }
            if let Some(prev) = edges.last() {
                let canonical = prev.size() < size || (prev.size() == size && prev.items < items);
                if !canonical {
                    return Err(bad(line_no, "edges out of canonical order".into()));
                }
            }
            edges.push(Hyperedge {
                items,
                weight,
                count,
            });
        }
        if edges.len() != n_edges {
            return Err(bad(
                1,
                format!("header declares {n_edges} edges, found {}", edges.len()),
            ));
        }
        Self::with_full_node_set(grid, edges)
    }
}

fn compute_degrees(nodes: &[LocationId], edges: &[Hyperedge]) -> Vec<u64> {
    let mut degrees = vec![0u64; nodes.len()];
    for e in edges {
        for &item in &e.items {
            let i = nodes.binary_search(&item).expect("edge items are nodes");
            degrees[i] += 1;
        }
    }
    degrees
}

/// Sparse boolean incidence matrix of a hypergraph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IncidenceMatrix {
    n_rows: usize,
    n_cols: usize,
    /// Column j: the row indices of the nodes in edge j, ascending.
    cols: Vec<Vec<usize>>,
}

impl IncidenceMatrix {
    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn is_incident(&self, row: usize, col: usize) -> bool {
        self.cols[col].binary_search(&row).is_ok()
    }

    /// Row sums = node degrees.
    pub fn row_sums(&self) -> Vec<u64> {
        let mut sums = vec![0u64; self.n_rows];
        for col in &self.cols {
            for &r in col {
                sums[r] += 1;
            }
        }
        sums
    }

    /// Column sums = edge sizes.
    pub fn col_sums(&self) -> Vec<usize> {
        self.cols.iter().map(|c| c.len()).collect()
    }

    /// Total number of ones.
    pub fn n_ones(&self) -> usize {
        self.cols.iter().map(|c| c.len()).sum()
    }
}

/// Weighted pairwise graph where the weight of `(u, v)` counts the qualifying
/// hyperedges containing both endpoints. Zero-weight pairs are absent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoDegreeGraph {
    min_edge_size: usize,
    /// Sorted by `(u, v)` with `u < v`.
    edges: Vec<CoDegreeEdge>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct CoDegreeEdge {
    pub u: LocationId,
    pub v: LocationId,
    pub weight: u64,
}

impl CoDegreeGraph {
    pub fn min_edge_size(&self) -> usize {
        self.min_edge_size
    }

    pub fn edges(&self) -> &[CoDegreeEdge] {
        &self.edges
    }

    pub fn weight(&self, u: LocationId, v: LocationId) -> Option<u64> {
        let (u, v) = if u <= v { (u, v) } else { (v, u) };
        self.edges
            .binary_search_by_key(&(u, v), |e| (e.u, e.v))
            .ok()
            .map(|i| self.edges[i].weight)
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn loc(v: u32) -> LocationId {
        LocationId(v)
    }

    /// The six-node, five-edge fixture used across the structural tests:
    /// e1={u1,u2}, e2={u1,u4,u5}, e3={u4,u5}, e4={u2,u3}, e5={u2,u5,u6},
    /// with u1..u6 mapped to ids 0..5 on a 3x2 grid.
    pub(crate) fn six_node_fixture() -> Hypergraph {
        let edges = vec![
            (vec![loc(0), loc(1)], 0.4, 2),
            (vec![loc(0), loc(3), loc(4)], 0.2, 1),
            (vec![loc(3), loc(4)], 0.4, 2),
            (vec![loc(1), loc(2)], 0.2, 1),
            (vec![loc(1), loc(4), loc(5)], 0.2, 1),
        ];
        Hypergraph::from_edges(Grid::new(3, 2), edges).unwrap()
    }

    #[test]
    fn fixture_degrees() {
        let hg = six_node_fixture();
        let degrees: Vec<u64> = hg.degrees().map(|(_, d)| d).collect();
        assert_eq!(degrees, vec![2, 3, 1, 2, 3, 1]);
        assert_eq!(hg.degree(loc(1)).unwrap(), 3);
        assert_eq!(hg.degree(loc(4)).unwrap(), 3);
        assert_eq!(hg.degree(loc(2)).unwrap(), 1);
        assert_eq!(hg.degree(loc(5)).unwrap(), 1);
        assert!(matches!(
            hg.degree(loc(99)),
            Err(Error::UnknownNode(LocationId(99)))
        ));
    }

    #[test]
    fn fixture_incidence() {
        let hg = six_node_fixture();
        let inc = hg.incidence_matrix();
        assert_eq!((inc.n_rows(), inc.n_cols()), (6, 5));
        assert_eq!(inc.row_sums(), vec![2, 3, 1, 2, 3, 1]);
        // Canonical edge order: {0,1},{1,2},{3,4} then {0,3,4},{1,4,5}.
        assert_eq!(inc.col_sums(), vec![2, 2, 2, 3, 3]);
        assert!(inc.is_incident(0, 0));
        assert!(!inc.is_incident(5, 0));
        // Sum of edge sizes: 2+2+2+3+3.
        assert_eq!(inc.n_ones(), 12);
    }

    #[test]
    fn fixture_rank_and_k_uniform() {
        let hg = six_node_fixture();
        assert_eq!(hg.rank(), 3);

        let three = hg.k_uniform_sub(3);
        let sets: Vec<Vec<u32>> = three
            .edges()
            .iter()
            .map(|e| e.items().iter().map(|l| l.0).collect())
            .collect();
        assert_eq!(sets, vec![vec![0, 3, 4], vec![1, 4, 5]]);
        // Cropped node set; the two triples intersect at id 4 (u5).
        assert_eq!(three.nodes(), &[loc(0), loc(1), loc(3), loc(4), loc(5)]);
        assert_eq!(three.degree(loc(4)).unwrap(), 2);

        let two = hg.k_uniform_sub(2);
        assert_eq!(two.num_edges(), 3);

        let none = hg.k_uniform_sub(9);
        assert_eq!(none.num_edges(), 0);
        assert!(none.nodes().is_empty());
    }

    #[test]
    fn fixture_bipartite() {
        let hg = six_node_fixture();
        let bip = hg.bipartite_edges();
        // One pair per incidence: 2+2+2+3+3.
        assert_eq!(bip.len(), 12);
        assert_eq!(bip[0], (0, loc(0)));
        assert_eq!(bip[1], (0, loc(1)));
        // Ordered by edge index then node id.
        assert!(bip.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn single_edge_bipartite() {
        let hg = Hypergraph::from_edges(Grid::new(2, 2), vec![(vec![loc(0), loc(1)], 0.5, 1)])
            .unwrap();
        assert_eq!(hg.bipartite_edges(), vec![(0, loc(0)), (0, loc(1))]);
    }

    #[test]
    fn edgeless_conventions() {
        let hg = Hypergraph::from_edges(Grid::new(2, 2), vec![]).unwrap();
        assert_eq!(hg.num_nodes(), 4);
        assert_eq!(hg.rank(), 0);
        assert!(hg.bipartite_edges().is_empty());
        assert_eq!(hg.incidence_matrix().n_cols(), 0);
        assert_eq!(hg.degree(loc(3)).unwrap(), 0);
    }

    #[test]
    fn co_degree_counting() {
        let hg = Hypergraph::from_edges(
            Grid::new(4, 1),
            vec![
                (vec![loc(0), loc(1), loc(2)], 0.5, 2),
                (vec![loc(0), loc(1), loc(3)], 0.25, 1),
            ],
        )
        .unwrap();
        let cd = hg.co_degree_graph(3);
        assert_eq!(cd.weight(loc(0), loc(1)), Some(2));
        assert_eq!(cd.weight(loc(0), loc(2)), Some(1));
        assert_eq!(cd.weight(loc(1), loc(2)), Some(1));
        assert_eq!(cd.weight(loc(0), loc(3)), Some(1));
        assert_eq!(cd.weight(loc(1), loc(3)), Some(1));
        assert_eq!(cd.weight(loc(2), loc(3)), None);
        assert_eq!(cd.len(), 5);
        // Symmetric lookup.
        assert_eq!(cd.weight(loc(1), loc(0)), Some(2));
    }

    #[test]
    fn co_degree_respects_size_floor() {
        let hg = Hypergraph::from_edges(
            Grid::new(3, 1),
            vec![
                (vec![loc(0), loc(1)], 0.5, 2),
                (vec![loc(1), loc(2)], 0.25, 1),
            ],
        )
        .unwrap();
        assert!(hg.co_degree_graph(3).is_empty());
        let pairs = hg.co_degree_graph(2);
        assert_eq!(pairs.len(), 2);
    }

    #[test]
    fn single_triple_makes_a_triangle() {
        let hg = Hypergraph::from_edges(
            Grid::new(3, 1),
            vec![(vec![loc(0), loc(1), loc(2)], 0.5, 1)],
        )
        .unwrap();
        let cd = hg.co_degree_graph(3);
        assert_eq!(cd.len(), 3);
        assert!(cd.edges().iter().all(|e| e.weight == 1));
    }

    #[test]
    fn rejects_out_of_grid_items() {
        let err = Hypergraph::from_edges(Grid::new(2, 2), vec![(vec![loc(4)], 0.5, 1)]);
        assert!(matches!(err, Err(Error::ItemOutsideGrid { .. })));
    }

    #[test]
    fn rejects_duplicate_edges() {
        let err = Hypergraph::from_edges(
            Grid::new(2, 2),
            vec![
                (vec![loc(0), loc(1)], 0.5, 1),
                (vec![loc(1), loc(0)], 0.25, 1),
            ],
        );
        assert!(err.is_err());
    }

    #[test]
    fn file_round_trip() {
        let hg = six_node_fixture();
        let mut buf = Vec::new();
        hg.write(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("covis-hg v1 3 2 5\n"));

        let reloaded = Hypergraph::read(buf.as_slice()).unwrap();
        assert_eq!(reloaded, hg);

        let mut again = Vec::new();
        reloaded.write(&mut again).unwrap();
        assert_eq!(again, buf);
    }

    #[test]
    fn read_rejects_malformed() {
        assert!(Hypergraph::read("not a header\n".as_bytes()).is_err());
        assert!(Hypergraph::read("covis-hg v1 2 2 1\n".as_bytes()).is_err());
        // Non-canonical order (the pair after the triple).
        let bad = "covis-hg v1 3 1 2\n3\t0.5\t1\t0 1 2\n2\t0.5\t1\t0 1\n";
        assert!(Hypergraph::read(bad.as_bytes()).is_err());
        // Support outside (0, 1].
        assert!(Hypergraph::read("covis-hg v1 2 2 1\n2\t0\t1\t0 1\n".as_bytes()).is_err());
        assert!(Hypergraph::read("covis-hg v1 2 2 1\n2\t1.5\t1\t0 1\n".as_bytes()).is_err());
    }

    proptest! {
        #[test]
        fn handshake_identity(edge_specs in proptest::collection::vec(
            proptest::collection::btree_set(0u32..12, 1..5), 0..10)
        ) {
            let mut seen = std::collections::HashSet::new();
            let edges: Vec<(Vec<LocationId>, f64, u64)> = edge_specs
                .into_iter()
                .filter(|s| seen.insert(s.clone()))
                .map(|s| (s.into_iter().map(LocationId).collect(), 0.5, 1))
                .collect();
            let hg = Hypergraph::from_edges(Grid::new(4, 3), edges).unwrap();
            let deg_sum: u64 = hg.degrees().map(|(_, d)| d).sum();
            let size_sum: u64 = hg.edges().iter().map(|e| e.size() as u64).sum();
            let inc = hg.incidence_matrix();
            prop_assert_eq!(deg_sum, size_sum);
            prop_assert_eq!(inc.n_ones() as u64, size_sum);
            prop_assert_eq!(hg.bipartite_edges().len() as u64, size_sum);

            // k-uniform slices partition the edge set.
            let mut total = 0usize;
            for k in 1..=hg.rank() {
                total += hg.k_uniform_sub(k).num_edges();
            }
            prop_assert_eq!(total, hg.num_edges());

            // Co-degree weights never exceed the restricted degree of
            // either endpoint.
            let cd = hg.co_degree_graph(2);
            for e in cd.edges() {
                let restricted = |v: LocationId| {
                    hg.edges()
                        .iter()
                        .filter(|ed| ed.size() >= 2 && ed.items().contains(&v))
                        .count() as u64
                };
                prop_assert!(e.weight <= restricted(e.u).min(restricted(e.v)));
            }
        }
    }
}
