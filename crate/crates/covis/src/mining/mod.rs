//! Frequent-itemset mining over transaction datasets.
//!
//! [`fp_growth`] is the production miner; [`brute_force_mine`] is a small
//! level-wise enumerator kept as an independent oracle. Both return exactly
//! the itemsets whose absolute count reaches `ceil(min_sup * M)` and whose
//! size reaches `min_size`, with exact integer counts.

mod brute;
mod fpgrowth;

pub use brute::brute_force_mine;
pub use fpgrowth::fp_growth;

use crate::error::{Error, Result};
use crate::grid::LocationId;
use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

/// Minimum support threshold as an exact decimal fraction.
///
/// Stored as `num / den` with `den` a power of ten, so the absolute count
/// threshold `ceil(min_sup * M)` is computed in integer arithmetic and never
/// suffers float rounding at the boundary (e.g. `0.05 * 60` must be 3, not 4).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MinSup {
    num: u64,
    den: u64,
}

impl MinSup {
    /// `num / den` with `den` a power of ten and `0 < num/den <= 1`.
    pub fn new(num: u64, den: u64) -> Result<Self> {
        if den == 0 || !is_power_of_ten(den) {
            return Err(Error::InvalidParam(format!(
                "min_sup denominator must be a power of ten, got {den}"
            )));
        }
        if num == 0 || num > den {
            return Err(Error::InvalidParam(format!(
                "min_sup must be in (0, 1], got {num}/{den}"
            )));
        }
        // Canonical form: strip trailing decimal zeros.
        let (mut num, mut den) = (num, den);
        while den > 1 && num % 10 == 0 {
            num /= 10;
            den /= 10;
        }
        Ok(MinSup { num, den })
    }

    /// Absolute count threshold for `m` transactions: `ceil(min_sup * m)`.
    pub fn threshold(&self, m: usize) -> u64 {
        let num = self.num as u128 * m as u128;
        num.div_ceil(self.den as u128) as u64
    }

    pub fn as_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

fn is_power_of_ten(mut v: u64) -> bool {
    while v.is_multiple_of(10) {
        v /= 10;
    }
    v == 1
}

impl PartialOrd for MinSup {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for MinSup {
    fn cmp(&self, other: &Self) -> Ordering {
        let lhs = self.num as u128 * other.den as u128;
        let rhs = other.num as u128 * self.den as u128;
        lhs.cmp(&rhs)
    }
}

impl FromStr for MinSup {
    type Err = Error;

    /// Parses plain decimals: `1`, `0.5`, `0.005`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParam(format!("`{s}` is not a decimal support in (0, 1]"));
        let (int_part, frac_part) = match s.split_once('.') {
            Some((i, f)) => (i, f),
            None => (s, ""),
        };
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(bad());
        }
        if !int_part.chars().all(|c| c.is_ascii_digit())
            || !frac_part.chars().all(|c| c.is_ascii_digit())
            || frac_part.len() > 12
        {
            return Err(bad());
        }
        let int: u64 = if int_part.is_empty() {
            0
        } else {
            int_part.parse().map_err(|_| bad())?
        };
        let frac: u64 = if frac_part.is_empty() {
            0
        } else {
            frac_part.parse().map_err(|_| bad())?
        };
        let den = 10u64.pow(frac_part.len() as u32);
        let num = int
            .checked_mul(den)
            .and_then(|v| v.checked_add(frac))
            .ok_or_else(bad)?;
        MinSup::new(num, den)
    }
}

impl fmt::Display for MinSup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            return write!(f, "{}", self.num);
        }
        let digits = self.den.ilog10() as usize;
        let int = self.num / self.den;
        let frac = self.num % self.den;
        write!(f, "{int}.{frac:0digits$}")
    }
}

impl serde::Serialize for MinSup {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> serde::Deserialize<'de> for MinSup {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Mining parameters: minimum support and minimum itemset cardinality.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MiningParams {
    pub min_sup: MinSup,
    pub min_size: usize,
}

impl MiningParams {
    pub fn new(min_sup: MinSup, min_size: usize) -> Result<Self> {
        if min_size == 0 {
            return Err(Error::InvalidParam("min_size must be >= 1".into()));
        }
        Ok(MiningParams { min_sup, min_size })
    }
}

/// A frequent itemset with its exact occurrence count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrequentPattern {
    /// Strictly ascending location ids.
    pub items: Vec<LocationId>,
    pub count: u64,
}

impl FrequentPattern {
    pub fn size(&self) -> usize {
        self.items.len()
    }

    /// Support fraction against `m` transactions.
    pub fn support(&self, m: usize) -> f64 {
        self.count as f64 / m as f64
    }
}

/// Mining output: patterns in canonical order (size ascending, then
/// lexicographic on item ids), with the parameters and `M` they were mined at.
#[derive(Debug, Clone, PartialEq)]
pub struct PatternSet {
    patterns: Vec<FrequentPattern>,
    params: MiningParams,
    m: usize,
}

impl PatternSet {
    pub(crate) fn from_unsorted(
        mut patterns: Vec<FrequentPattern>,
        params: MiningParams,
        m: usize,
    ) -> Self {
        patterns.sort_unstable_by(|a, b| {
            a.size().cmp(&b.size()).then_with(|| a.items.cmp(&b.items))
        });
        debug_assert!(patterns.windows(2).all(|w| w[0].items != w[1].items));
        PatternSet {
            patterns,
            params,
            m,
        }
    }

    pub fn patterns(&self) -> &[FrequentPattern] {
        &self.patterns
    }

    pub fn params(&self) -> &MiningParams {
        &self.params
    }

    /// Number of transactions the supports are relative to.
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn len(&self) -> usize {
        self.patterns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.patterns.is_empty()
    }

    pub fn contains(&self, items: &[LocationId]) -> bool {
        self.patterns
            .binary_search_by(|p| {
                p.size()
                    .cmp(&items.len())
                    .then_with(|| p.items.as_slice().cmp(items))
            })
            .is_ok()
    }

    /// Tab-separated dump, one pattern per line in canonical order:
    /// `size<TAB>support<TAB>count<TAB>item ids (space-separated, ascending)`.
    pub fn write_dump<W: Write>(&self, mut w: W) -> io::Result<()> {
        for p in &self.patterns {
            write_pattern_line(&mut w, p.items.as_slice(), p.support(self.m), p.count)?;
        }
        Ok(())
    }
}

pub(crate) fn write_pattern_line<W: Write>(
    w: &mut W,
    items: &[LocationId],
    support: f64,
    count: u64,
) -> io::Result<()> {
    write!(w, "{}\t{}\t{}\t", items.len(), support, count)?;
    for (i, item) in items.iter().enumerate() {
        if i > 0 {
            write!(w, " ")?;
        }
        write!(w, "{item}")?;
    }
    writeln!(w)
}

/// Keep only patterns with no proper frequent superset in the set.
pub fn maximal_filter(set: &PatternSet) -> PatternSet {
    // Posting lists: item -> indices of patterns containing it.
    let mut postings: HashMap<LocationId, Vec<usize>> = HashMap::new();
    for (idx, p) in set.patterns.iter().enumerate() {
        for &item in &p.items {
            postings.entry(item).or_default().push(idx);
        }
    }

    let is_subset = |small: &[LocationId], big: &[LocationId]| -> bool {
        let mut it = big.iter();
        small.iter().all(|s| it.any(|b| b == s))
    };

    let patterns = set
        .patterns
        .iter()
        .filter(|p| {
            // Scan candidate supersets through the rarest item's posting list.
            let list = p
                .items
                .iter()
                .map(|it| &postings[it])
                .min_by_key(|l| l.len())
                .expect("patterns are non-empty");
            !list.iter().any(|&idx| {
                let cand = &set.patterns[idx];
                cand.size() > p.size() && is_subset(&p.items, &cand.items)
            })
        })
        .cloned()
        .collect();

    PatternSet {
        patterns,
        params: set.params,
        m: set.m,
    }
}

#[cfg(test)]
pub(crate) mod test_support {
    use super::*;
    use crate::window::TransactionDataset;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    pub fn dataset(sets: &[&[u32]]) -> TransactionDataset {
        TransactionDataset::from_sets(
            sets.iter()
                .map(|s| s.iter().map(|&v| LocationId(v)).collect())
                .collect(),
        )
    }

    pub fn params(min_sup: &str, min_size: usize) -> MiningParams {
        MiningParams::new(min_sup.parse().unwrap(), min_size).unwrap()
    }

    /// Random dataset with at most `max_items` distinct items and at most
    /// `max_transactions` transactions, deterministic in the seed.
    pub fn random_dataset(seed: u64, max_items: u32, max_transactions: usize) -> TransactionDataset {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n_items = rng.random_range(1..=max_items);
        let n_trans = rng.random_range(1..=max_transactions);
        let mut sets = Vec::with_capacity(n_trans);
        for _ in 0..n_trans {
            let size = rng.random_range(1..=n_items);
            let mut items: Vec<LocationId> = Vec::new();
            for _ in 0..size {
                items.push(LocationId(rng.random_range(0..n_items)));
            }
            sets.push(items);
        }
        TransactionDataset::from_sets(sets)
    }

    pub fn items(ids: &[u32]) -> Vec<LocationId> {
        ids.iter().map(|&v| LocationId(v)).collect()
    }
}
