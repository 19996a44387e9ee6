//! Seeded synthetic trajectory generator with planted co-visitation groups.
//!
//! Ground truth for end-to-end tests and benchmarks: adopting individuals
//! visit a planted group's locations together on Bernoulli-sampled days, on
//! top of Poisson background visits drawn uniformly over the grid. The
//! generator is deterministic per seed (ChaCha8 stream; Poisson via
//! rand_distr) and reproducible across platforms.

use crate::error::{Error, Result};
use crate::grid::{GridSpec, LocationId};
use crate::ingest::{VisitLog, TIMESLOTS_PER_DAY};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::io::{self, Write};

/// A group of aggregated cells visited together by adopting individuals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlantedGroup {
    /// Aggregated location ids, distinct, within the grid.
    pub locations: Vec<u32>,
    /// Fraction of individuals that adopt the group.
    pub adoption: f64,
    /// Per-day probability that an adopter visits the whole group.
    pub visit_prob: f64,
}

fn default_manifest_delta_ts() -> Vec<u32> {
    vec![1, 3, 7]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthSpec {
    pub seed: u64,
    pub grid: GridSpec,
    /// Number of individuals (`r`).
    pub individuals: u64,
    /// Horizon in days (`D`).
    pub days: u32,
    /// Expected background visits per individual-day (Poisson rate).
    pub background_rate: f64,
    #[serde(default)]
    pub planted_groups: Vec<PlantedGroup>,
    /// Window lengths the manifest states expected supports for.
    #[serde(default = "default_manifest_delta_ts")]
    pub manifest_delta_ts: Vec<u32>,
}

impl SynthSpec {
    fn validate(&self) -> Result<()> {
        let agg = self.grid.aggregated();
        if self.individuals == 0 {
            return Err(Error::InvalidParam("individuals must be >= 1".into()));
        }
        if self.days == 0 {
            return Err(Error::InvalidParam("days must be >= 1".into()));
        }
        if !(self.background_rate >= 0.0 && self.background_rate.is_finite()) {
            return Err(Error::InvalidParam(
                "background_rate must be finite and >= 0".into(),
            ));
        }
        for (i, g) in self.planted_groups.iter().enumerate() {
            if !(0.0..=1.0).contains(&g.adoption) || !(0.0..=1.0).contains(&g.visit_prob) {
                return Err(Error::InvalidParam(format!(
                    "planted_groups[{i}]: adoption and visit_prob must lie in [0, 1]"
                )));
            }
            if g.locations.is_empty() {
                return Err(Error::InvalidParam(format!(
                    "planted_groups[{i}]: locations must be non-empty"
                )));
            }
            let mut seen = std::collections::HashSet::new();
            for &loc in &g.locations {
                if !agg.contains(LocationId(loc)) {
                    return Err(Error::ItemOutsideGrid {
                        item: LocationId(loc),
                        cells: agg.num_cells(),
                    });
                }
                if !seen.insert(loc) {
                    return Err(Error::InvalidParam(format!(
                        "planted_groups[{i}]: duplicate location {loc}"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Expected support lower bound for one group at one window length.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpectedSupport {
    pub delta_t: u32,
    /// `adoption * (1 - (1 - visit_prob)^delta_t)`; the realized support is
    /// at least this in expectation because `M` only counts non-empty
    /// transactions.
    pub lower_bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupManifest {
    pub locations: Vec<u32>,
    pub adoption: f64,
    pub visit_prob: f64,
    pub num_adopters: u64,
    pub expected_support: Vec<ExpectedSupport>,
}

/// Ground truth emitted alongside the generated trajectories.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthManifest {
    pub seed: u64,
    pub individuals: u64,
    pub days: u32,
    pub grid: GridSpec,
    pub background_rate: f64,
    pub groups: Vec<GroupManifest>,
}

pub struct SynthOutput {
    pub log: VisitLog,
    pub manifest: SynthManifest,
}

/// Generate the visit log and its ground-truth manifest; deterministic in
/// the seed.
pub fn generate(spec: &SynthSpec) -> Result<SynthOutput> {
    spec.validate()?;
    let agg = spec.grid.aggregated();
    let num_cells = agg.num_cells() as u32;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);

    let background = if spec.background_rate > 0.0 {
        Some(Poisson::new(spec.background_rate).map_err(|e| {
            Error::InvalidParam(format!("background_rate rejected by Poisson: {e}"))
        })?)
    } else {
        None
    };

    let mut sets: HashMap<u64, HashMap<u32, Vec<LocationId>>> = HashMap::new();
    let mut adopter_counts = vec![0u64; spec.planted_groups.len()];

    for uid in 0..spec.individuals {
        let adopted: Vec<usize> = spec
            .planted_groups
            .iter()
            .enumerate()
            .filter_map(|(i, g)| (rng.random::<f64>() < g.adoption).then_some(i))
            .collect();
        for &i in &adopted {
            adopter_counts[i] += 1;
        }
        for day in 0..spec.days {
            let mut cells: Vec<LocationId> = Vec::new();
            for &i in &adopted {
                let group = &spec.planted_groups[i];
                if rng.random::<f64>() < group.visit_prob {
                    cells.extend(group.locations.iter().map(|&l| LocationId(l)));
                }
            }
            if let Some(poisson) = &background {
                let k = poisson.sample(&mut rng) as u64;
                for _ in 0..k {
                    cells.push(LocationId(rng.random_range(0..num_cells)));
                }
            }
            if !cells.is_empty() {
                sets.entry(uid).or_default().insert(day, cells);
            }
        }
    }

    let log = VisitLog::from_day_sets(spec.grid, 0..spec.days, sets);
    let groups = spec
        .planted_groups
        .iter()
        .zip(adopter_counts)
        .map(|(g, num_adopters)| GroupManifest {
            locations: g.locations.clone(),
            adoption: g.adoption,
            visit_prob: g.visit_prob,
            num_adopters,
            expected_support: spec
                .manifest_delta_ts
                .iter()
                .filter(|&&dt| dt >= 1 && dt <= spec.days)
                .map(|&dt| ExpectedSupport {
                    delta_t: dt,
                    lower_bound: g.adoption * (1.0 - (1.0 - g.visit_prob).powi(dt as i32)),
                })
                .collect(),
        })
        .collect();

    Ok(SynthOutput {
        log,
        manifest: SynthManifest {
            seed: spec.seed,
            individuals: spec.individuals,
            days: spec.days,
            grid: spec.grid,
            background_rate: spec.background_rate,
            groups,
        },
    })
}

/// Write a visit log as the trajectory CSV the ingest side consumes: one row
/// per (uid, day, cell), raw coordinates at the top-left corner of the
/// aggregated cell, timeslots cycling deterministically.
pub fn write_trajectory_csv<W: Write>(log: &VisitLog, w: &mut W) -> io::Result<()> {
    writeln!(w, "uid,d,t,x,y")?;
    let spec = log.grid_spec();
    let agg = spec.aggregated();
    let range = log.day_range();
    let uids: Vec<u64> = log.uids().collect();
    for uid in uids {
        for day in range.clone() {
            for (slot, &cell) in log.visits(uid, day).iter().enumerate() {
                let (cx, cy) = agg.cell(cell);
                let (x, y) = (cx * spec.scale, cy * spec.scale);
                let t = slot % TIMESLOTS_PER_DAY as usize;
                writeln!(w, "{uid},{day},{t},{x},{y}")?;
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{build_visit_log, parse_records};
    use crate::mining::{fp_growth, MiningParams};
    use crate::window::{build_transactions, WindowSpec};

    fn base_spec() -> SynthSpec {
        SynthSpec {
            seed: 1,
            grid: GridSpec::new(10, 10, 1).unwrap(),
            individuals: 50,
            days: 8,
            background_rate: 1.0,
            planted_groups: vec![PlantedGroup {
                locations: vec![5, 23, 61],
                adoption: 0.4,
                visit_prob: 0.7,
            }],
            manifest_delta_ts: vec![1, 3],
        }
    }

    #[test]
    fn deterministic_per_seed() {
        let spec = base_spec();
        let a = generate(&spec).unwrap();
        let b = generate(&spec).unwrap();
        assert_eq!(a.log, b.log);
        assert_eq!(a.manifest, b.manifest);

        let mut other = spec.clone();
        other.seed = 2;
        assert_ne!(generate(&other).unwrap().log, a.log);
    }

    #[test]
    fn certainty_plant_dominates() {
        // visit_prob 1, adoption 1, no background: every daily transaction
        // is exactly the planted group, support 1.
        let spec = SynthSpec {
            seed: 3,
            grid: GridSpec::new(10, 10, 1).unwrap(),
            individuals: 20,
            days: 5,
            background_rate: 0.0,
            planted_groups: vec![PlantedGroup {
                locations: vec![1, 2, 3],
                adoption: 1.0,
                visit_prob: 1.0,
            }],
            manifest_delta_ts: vec![1],
        };
        let out = generate(&spec).unwrap();
        let ds = build_transactions(&out.log, WindowSpec::new(1).unwrap()).unwrap();
        assert_eq!(ds.len(), 20 * 5);
        for t in ds.transactions() {
            let ids: Vec<u32> = t.items().iter().map(|l| l.0).collect();
            assert_eq!(ids, vec![1, 2, 3]);
        }
        let params = MiningParams::new("1".parse().unwrap(), 3).unwrap();
        let mined = fp_growth(&ds, &params).unwrap();
        assert_eq!(mined.len(), 1);
        assert_eq!(mined.patterns()[0].count as usize, ds.len());
    }

    #[test]
    fn manifest_lower_bound_matches_direct_count() {
        // Count transactions containing the planted group directly; the
        // realized support should not fall far under the manifest bound.
        let spec = SynthSpec {
            seed: 9,
            grid: GridSpec::new(10, 10, 1).unwrap(),
            individuals: 1000,
            days: 10,
            background_rate: 1.0,
            planted_groups: vec![PlantedGroup {
                locations: vec![4, 40, 77],
                adoption: 0.3,
                visit_prob: 0.9,
            }],
            manifest_delta_ts: vec![3],
        };
        let out = generate(&spec).unwrap();
        let ds = build_transactions(&out.log, WindowSpec::new(3).unwrap()).unwrap();
        let group: Vec<LocationId> = vec![LocationId(4), LocationId(40), LocationId(77)];
        let containing = ds
            .transactions()
            .iter()
            .filter(|t| group.iter().all(|g| t.items().contains(g)))
            .count();
        let support = containing as f64 / ds.len() as f64;
        let bound = out.manifest.groups[0].expected_support[0].lower_bound;
        assert!((bound - 0.3 * (1.0 - 0.1f64.powi(3))).abs() < 1e-12);
        assert!(support >= 0.25, "support {support} too low vs bound {bound}");
    }

    #[test]
    fn csv_round_trips_through_ingest() {
        let spec = SynthSpec {
            seed: 5,
            grid: GridSpec::new(40, 40, 10).unwrap(),
            individuals: 30,
            days: 6,
            background_rate: 2.0,
            planted_groups: vec![PlantedGroup {
                locations: vec![0, 5, 10],
                adoption: 0.5,
                visit_prob: 0.6,
            }],
            manifest_delta_ts: vec![1],
        };
        let out = generate(&spec).unwrap();
        let mut csv = Vec::new();
        write_trajectory_csv(&out.log, &mut csv).unwrap();
        let records = parse_records(csv.as_slice(), &spec.grid).unwrap();
        let reingested = build_visit_log(&records, &spec.grid, 0..spec.days).unwrap();
        assert_eq!(reingested, out.log);
    }

    #[test]
    fn rejects_invalid_specs() {
        let mut spec = base_spec();
        spec.planted_groups[0].adoption = 1.5;
        assert!(generate(&spec).is_err());

        let mut spec = base_spec();
        spec.planted_groups[0].locations = vec![1000];
        assert!(generate(&spec).is_err());

        let mut spec = base_spec();
        spec.planted_groups[0].locations = vec![1, 1];
        assert!(generate(&spec).is_err());

        let mut spec = base_spec();
        spec.background_rate = f64::NAN;
        assert!(generate(&spec).is_err());
    }
}
