//! FP-Growth: compress the transaction bag into a prefix tree ordered by
//! descending item frequency, then recursively mine conditional subtrees.
//!
//! Determinism: item order is (count descending, id ascending), top-level
//! items are mined in parallel and the merged result is canonically sorted,
//! so the output is independent of transaction order and worker count.

use super::{FrequentPattern, MiningParams, PatternSet};
use crate::error::{Error, Result};
use crate::grid::LocationId;
use crate::window::TransactionDataset;
use rayon::prelude::*;
use std::collections::HashMap;

/// Mine all itemsets with count >= `ceil(min_sup * M)` and size >= `min_size`.
pub fn fp_growth(dataset: &TransactionDataset, params: &MiningParams) -> Result<PatternSet> {
    let m = dataset.len();
    if m == 0 {
        return Err(Error::EmptyDataset);
    }
    let threshold = params.min_sup.threshold(m);

    // Pass 1: global item counts.
    let mut counts: HashMap<LocationId, u64> = HashMap::new();
    for t in dataset.transactions() {
        for &item in t.items() {
            *counts.entry(item).or_insert(0) += 1;
        }
    }

    // Frequent items ordered by count descending, ties by ascending id.
    let mut frequent: Vec<(LocationId, u64)> = counts
        .into_iter()
        .filter(|&(_, c)| c >= threshold)
        .collect();
    frequent.sort_unstable_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));

    if frequent.is_empty() {
        return Ok(PatternSet::from_unsorted(Vec::new(), *params, m));
    }

    let rank_of: HashMap<LocationId, u32> = frequent
        .iter()
        .enumerate()
        .map(|(r, &(item, _))| (item, r as u32))
        .collect();
    let labels: Vec<LocationId> = frequent.iter().map(|&(item, _)| item).collect();

    // Pass 2: build the tree over item ranks.
    let mut tree = Tree::new(labels.len());
    let mut path: Vec<u32> = Vec::new();
    for t in dataset.transactions() {
        path.clear();
        path.extend(t.items().iter().filter_map(|item| rank_of.get(item)));
        path.sort_unstable();
        tree.insert(&path, 1);
    }

    // Each frequent itemset has a unique least-frequent member, so mining
    // per top-level rank partitions the output and parallelizes cleanly.
    let chunks: Vec<Vec<(Vec<LocationId>, u64)>> = (0..labels.len())
        .into_par_iter()
        .map(|r| {
            let mut out = Vec::new();
            mine_rank(&tree, &labels, r as u32, &[], threshold, &mut out);
            out
        })
        .collect();

    let patterns: Vec<FrequentPattern> = chunks
        .into_iter()
        .flatten()
        .filter(|(items, _)| items.len() >= params.min_size)
        .map(|(mut items, count)| {
            items.sort_unstable();
            FrequentPattern { items, count }
        })
        .collect();

    Ok(PatternSet::from_unsorted(patterns, *params, m))
}

/// Prefix tree over dense item ranks; node 0 is the root.
struct Tree {
    nodes: Vec<Node>,
    /// Per rank: indices of the nodes carrying that rank, plus their total count.
    headers: Vec<Header>,
}

struct Node {
    rank: u32,
    count: u64,
    parent: u32,
    /// Children sorted by rank for binary search.
    children: Vec<(u32, u32)>,
}

#[derive(Default, Clone)]
struct Header {
    nodes: Vec<u32>,
    total: u64,
}

impl Tree {
    fn new(num_items: usize) -> Self {
        Tree {
            nodes: vec![Node {
                rank: u32::MAX,
                count: 0,
                parent: u32::MAX,
                children: Vec::new(),
            }],
            headers: vec![Header::default(); num_items],
        }
    }

    /// Insert a path of strictly ascending ranks with the given count.
    fn insert(&mut self, path: &[u32], count: u64) {
        let mut cur = 0u32;
        for &rank in path {
            let node = &self.nodes[cur as usize];
            cur = match node.children.binary_search_by_key(&rank, |c| c.0) {
                Ok(i) => {
                    let child = node.children[i].1;
                    self.nodes[child as usize].count += count;
                    child
                }
                Err(i) => {
                    let child = self.nodes.len() as u32;
                    self.nodes.push(Node {
                        rank,
                        count,
                        parent: cur,
                        children: Vec::new(),
                    });
                    self.nodes[cur as usize].children.insert(i, (rank, child));
                    self.headers[rank as usize].nodes.push(child);
                    child
                }
            };
            self.headers[rank as usize].total += count;
        }
    }
}

/// Emit the itemset for `rank` (plus suffix) and recurse into its
/// conditional tree. `suffix` holds original item ids.
fn mine_rank(
    tree: &Tree,
    labels: &[LocationId],
    rank: u32,
    suffix: &[LocationId],
    threshold: u64,
    out: &mut Vec<(Vec<LocationId>, u64)>,
) {
    let header = &tree.headers[rank as usize];
    debug_assert!(header.total >= threshold);

    let mut itemset = Vec::with_capacity(suffix.len() + 1);
    itemset.extend_from_slice(suffix);
    itemset.push(labels[rank as usize]);
    out.push((itemset.clone(), header.total));

    // Conditional pattern base: prefix paths above each node of `rank`,
    // weighted by that node's count.
    let mut cond_counts: HashMap<u32, u64> = HashMap::new();
    let mut paths: Vec<(Vec<u32>, u64)> = Vec::with_capacity(header.nodes.len());
    for &node_idx in &header.nodes {
        let count = tree.nodes[node_idx as usize].count;
        let mut path = Vec::new();
        let mut cur = tree.nodes[node_idx as usize].parent;
        while cur != u32::MAX && tree.nodes[cur as usize].rank != u32::MAX {
            let r = tree.nodes[cur as usize].rank;
            path.push(r);
            *cond_counts.entry(r).or_insert(0) += count;
            cur = tree.nodes[cur as usize].parent;
        }
        if !path.is_empty() {
            path.reverse();
            paths.push((path, count));
        }
    }

    // Items surviving the threshold, re-ranked by conditional count
    // (descending), ties by ascending original id.
    let mut survivors: Vec<(u32, u64)> = cond_counts
        .into_iter()
        .filter(|&(_, c)| c >= threshold)
        .collect();
    if survivors.is_empty() {
        return;
    }
    survivors.sort_unstable_by(|a, b| {
        b.1.cmp(&a.1)
            .then_with(|| labels[a.0 as usize].cmp(&labels[b.0 as usize]))
    });
    let mut new_rank: HashMap<u32, u32> = HashMap::with_capacity(survivors.len());
    let mut new_labels: Vec<LocationId> = Vec::with_capacity(survivors.len());
    for (new_r, &(old_r, _)) in survivors.iter().enumerate() {
        new_rank.insert(old_r, new_r as u32);
        new_labels.push(labels[old_r as usize]);
    }

    let mut cond_tree = Tree::new(survivors.len());
    let mut buf: Vec<u32> = Vec::new();
    for (path, count) in &paths {
        buf.clear();
        buf.extend(path.iter().filter_map(|r| new_rank.get(r)));
        buf.sort_unstable();
        cond_tree.insert(&buf, *count);
    }

    for r in 0..new_labels.len() as u32 {
        if cond_tree.headers[r as usize].total >= threshold {
            mine_rank(&cond_tree, &new_labels, r, &itemset, threshold, out);
        }
    }
}
