//! Sliding observation windows and the transaction dataset they induce:
//! one transaction per (individual, window) = the union of that individual's
//! daily visit sets across the window. Empty unions are dropped.

use crate::error::{Error, Result};
use crate::grid::LocationId;
use crate::ingest::VisitLog;
use rayon::prelude::*;
use std::io::{self, Write};
use std::ops::Range;

/// Window length in days; windows slide with a fixed stride of 1 day.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WindowSpec {
    delta_t: u32,
}

impl WindowSpec {
    pub fn new(delta_t: u32) -> Result<Self> {
        if delta_t == 0 {
            return Err(Error::InvalidParam("window length must be >= 1".into()));
        }
        Ok(WindowSpec { delta_t })
    }

    pub fn delta_t(&self) -> u32 {
        self.delta_t
    }
}

/// All `D - delta_t + 1` windows over a horizon of `D` days, as day offsets
/// `[t, t + delta_t)` relative to the horizon start.
pub fn enumerate_windows(horizon: u32, delta_t: u32) -> Result<Vec<Range<u32>>> {
    if delta_t == 0 {
        return Err(Error::InvalidParam("window length must be >= 1".into()));
    }
    if delta_t > horizon {
        return Err(Error::WindowTooLong { delta_t, horizon });
    }
    Ok((0..=horizon - delta_t).map(|t| t..t + delta_t).collect())
}

/// One transaction: the set of locations an individual visited in a window.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Transaction {
    /// Strictly ascending location ids; never empty.
    items: Vec<LocationId>,
}

impl Transaction {
    pub(crate) fn from_sorted(items: Vec<LocationId>) -> Self {
        debug_assert!(!items.is_empty());
        debug_assert!(items.windows(2).all(|w| w[0] < w[1]));
        Transaction { items }
    }

    pub fn items(&self) -> &[LocationId] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }
}

/// Where a transaction dataset came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Provenance {
    pub delta_t: u32,
    pub day_range: Range<u32>,
    pub individuals: usize,
}

/// The bag of transactions (duplicates allowed) fed to the miner.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransactionDataset {
    transactions: Vec<Transaction>,
    provenance: Option<Provenance>,
}

impl TransactionDataset {
    /// Build a dataset from raw item sets: items are sorted and deduplicated,
    /// empty sets are dropped. Intended for tests and ad-hoc mining.
    pub fn from_sets(sets: Vec<Vec<LocationId>>) -> Self {
        let transactions = sets
            .into_iter()
            .filter_map(|mut items| {
                items.sort_unstable();
                items.dedup();
                (!items.is_empty()).then(|| Transaction::from_sorted(items))
            })
            .collect();
        TransactionDataset {
            transactions,
            provenance: None,
        }
    }

    /// Number of transactions, `M`.
    pub fn len(&self) -> usize {
        self.transactions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.transactions.is_empty()
    }

    pub fn transactions(&self) -> &[Transaction] {
        &self.transactions
    }

    pub fn provenance(&self) -> Option<&Provenance> {
        self.provenance.as_ref()
    }

    /// Plain-text dump, one transaction per line as space-separated ascending
    /// location ids; the format frequent-itemset tools commonly consume.
    pub fn write_plain<W: Write>(&self, mut w: W) -> io::Result<()> {
        let mut line = String::new();
        for t in &self.transactions {
            line.clear();
            for (i, item) in t.items.iter().enumerate() {
                if i > 0 {
                    line.push(' ');
                }
                line.push_str(&item.0.to_string());
            }
            line.push('\n');
            w.write_all(line.as_bytes())?;
        }
        Ok(())
    }
}

/// Slide windows over the log and emit one transaction per (window,
/// individual) pair with a non-empty visit union. Output order is by window
/// start, then by uid.
pub fn build_transactions(log: &VisitLog, spec: WindowSpec) -> Result<TransactionDataset> {
    let windows = enumerate_windows(log.horizon(), spec.delta_t)?;
    let day_lo = log.day_range().start;

    let per_window: Vec<Vec<Transaction>> = windows
        .par_iter()
        .map(|w| {
            let abs = (day_lo + w.start)..(day_lo + w.end);
            let mut out = Vec::new();
            let mut buf: Vec<LocationId> = Vec::new();
            for ind in log.individuals() {
                let days = ind.days_in(abs.clone());
                match days.len() {
                    0 => {}
                    1 => out.push(Transaction::from_sorted(days[0].cells.clone())),
                    _ => {
                        buf.clear();
                        for d in days {
                            buf.extend_from_slice(&d.cells);
                        }
                        buf.sort_unstable();
                        buf.dedup();
                        out.push(Transaction::from_sorted(buf.clone()));
                    }
                }
            }
            out
        })
        .collect();

    let transactions: Vec<Transaction> = per_window.into_iter().flatten().collect();
    Ok(TransactionDataset {
        transactions,
        provenance: Some(Provenance {
            delta_t: spec.delta_t,
            day_range: log.day_range(),
            individuals: log.num_individuals(),
        }),
    })
}

/// Exact counts over a dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetStats {
    pub m: usize,
    pub mean_size: f64,
    pub max_size: usize,
    pub distinct_items: usize,
}

pub fn dataset_stats(dataset: &TransactionDataset) -> DatasetStats {
    let m = dataset.len();
    let total: usize = dataset.transactions().iter().map(|t| t.len()).sum();
    let max_size = dataset
        .transactions()
        .iter()
        .map(|t| t.len())
        .max()
        .unwrap_or(0);
    let mut items: Vec<LocationId> = dataset
        .transactions()
        .iter()
        .flat_map(|t| t.items().iter().copied())
        .collect();
    items.sort_unstable();
    items.dedup();
    DatasetStats {
        m,
        mean_size: if m == 0 { 0.0 } else { total as f64 / m as f64 },
        max_size,
        distinct_items: items.len(),
    }
}
