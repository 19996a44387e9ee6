//! Level-wise brute-force miner used as an independent oracle for FP-Growth.
//!
//! Items are mapped to bits of a u32 mask (hence the hard cap on distinct
//! items); candidates extend a frequent itemset by one item above its highest
//! bit, so every itemset is generated exactly once and anti-monotone pruning
//! applies.

use super::{FrequentPattern, MiningParams, PatternSet};
use crate::error::{Error, Result};
use crate::grid::LocationId;
use crate::window::TransactionDataset;

const MAX_DISTINCT_ITEMS: usize = 20;

pub fn brute_force_mine(dataset: &TransactionDataset, params: &MiningParams) -> Result<PatternSet> {
    let m = dataset.len();
    if m == 0 {
        return Err(Error::EmptyDataset);
    }
    let threshold = params.min_sup.threshold(m);

    let mut universe: Vec<LocationId> = dataset
        .transactions()
        .iter()
        .flat_map(|t| t.items().iter().copied())
        .collect();
    universe.sort_unstable();
    universe.dedup();
    if universe.len() > MAX_DISTINCT_ITEMS {
        return Err(Error::TooManyItems {
            count: universe.len(),
            limit: MAX_DISTINCT_ITEMS,
        });
    }

    let bit_of = |item: LocationId| -> u32 { universe.binary_search(&item).unwrap() as u32 };
    let masks: Vec<u32> = dataset
        .transactions()
        .iter()
        .map(|t| t.items().iter().fold(0u32, |m, &it| m | 1 << bit_of(it)))
        .collect();
    let count = |candidate: u32| -> u64 {
        masks.iter().filter(|&&t| t & candidate == candidate).count() as u64
    };

    let n = universe.len() as u32;
    let mut frequent: Vec<(u32, u64)> = Vec::new();
    let mut frontier: Vec<(u32, u64)> = (0..n)
        .filter_map(|b| {
            let c = count(1 << b);
            (c >= threshold).then_some((1u32 << b, c))
        })
        .collect();

    while !frontier.is_empty() {
        frequent.extend_from_slice(&frontier);
        let mut next = Vec::new();
        for &(mask, _) in &frontier {
            let top = 31 - mask.leading_zeros();
            for b in top + 1..n {
                let cand = mask | 1 << b;
                let c = count(cand);
                if c >= threshold {
                    next.push((cand, c));
                }
            }
        }
        frontier = next;
    }

    let patterns = frequent
        .into_iter()
        .filter(|&(mask, _)| (mask.count_ones() as usize) >= params.min_size)
        .map(|(mask, count)| {
            let items = (0..n)
                .filter(|b| mask & (1 << b) != 0)
                .map(|b| universe[b as usize])
                .collect();
            FrequentPattern { items, count }
        })
        .collect();

    Ok(PatternSet::from_unsorted(patterns, *params, m))
}

#[cfg(test)]
mod tests {
    use super::super::test_support::*;
    use super::*;

    #[test]
    fn agrees_with_hand_enumeration() {
        let ds = dataset(&[&[0, 1], &[0, 1, 2], &[1, 2], &[0, 2]]);
        let set = brute_force_mine(&ds, &params("0.5", 2)).unwrap();
        let got: Vec<(Vec<u32>, u64)> = set
            .patterns()
            .iter()
            .map(|p| (p.items.iter().map(|l| l.0).collect(), p.count))
            .collect();
        assert_eq!(got, vec![(vec![0, 1], 2), (vec![0, 2], 2), (vec![1, 2], 2)]);
    }

    #[test]
    fn no_itemset_of_requested_size() {
        let ds = dataset(&[&[0]]);
        let set = brute_force_mine(&ds, &params("0.5", 2)).unwrap();
        assert!(set.is_empty());
    }

    #[test]
    fn singleton_transactions_yield_no_pairs() {
        let ds = dataset(&[&[0], &[1], &[0], &[1]]);
        let set = brute_force_mine(&ds, &params("0.1", 2)).unwrap();
        assert!(set.is_empty());
    }

    #[test]
    fn item_guard_trips() {
        let many: Vec<Vec<crate::grid::LocationId>> =
            vec![(0..21).map(crate::grid::LocationId).collect()];
        let ds = crate::window::TransactionDataset::from_sets(many);
        assert!(matches!(
            brute_force_mine(&ds, &params("0.5", 1)),
            Err(Error::TooManyItems { count: 21, .. })
        ));
    }
}
