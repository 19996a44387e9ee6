//! Trajectory ingest: parse raw ping CSVs, aggregate coordinates onto the
//! analysis grid, and collapse pings into per-individual daily visit sets.
//!
//! A visit set holds each location at most once; the order, frequency, and
//! intra-day timing of pings are discarded.

use crate::error::{Error, Result};
use crate::grid::{GridSpec, LocationId};
use std::collections::HashMap;
use std::io::BufRead;
use std::ops::Range;

pub const TIMESLOTS_PER_DAY: u8 = 48;

const CSV_HEADER: &str = "uid,d,t,x,y";

/// One raw ping: an individual at a raw grid cell during a 30-minute slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrajectoryRecord {
    pub uid: u64,
    pub day: u32,
    pub timeslot: u8,
    pub x: u32,
    pub y: u32,
}

/// Parse a trajectory CSV (`uid,d,t,x,y`, base-10 integer fields).
///
/// Rows are validated against the raw grid bounds and the 48-slot day;
/// errors carry the 1-based line number (the header is line 1).
pub fn parse_records<R: BufRead>(reader: R, grid: &GridSpec) -> Result<Vec<TrajectoryRecord>> {
    let mut lines = reader.lines();
    let header = lines
        .next()
        .transpose()?
        .ok_or_else(|| Error::MalformedRow {
            line: 1,
            msg: "empty input, expected header `uid,d,t,x,y`".into(),
        })?;
    if header.trim_end_matches('\r') != CSV_HEADER {
        return Err(Error::MalformedRow {
            line: 1,
            msg: format!("bad header `{header}`, expected `{CSV_HEADER}`"),
        });
    }

    let mut records = Vec::new();
    for (idx, line) in lines.enumerate() {
        let line_no = idx + 2;
        let line = line?;
        let line = line.trim_end_matches('\r');
        records.push(parse_row(line, line_no, grid)?);
    }
    Ok(records)
}

fn parse_row(line: &str, line_no: usize, grid: &GridSpec) -> Result<TrajectoryRecord> {
    let mut fields = line.split(',');
    let mut next = |name: &'static str| -> Result<u64> {
        let raw = fields.next().ok_or_else(|| Error::MalformedRow {
            line: line_no,
            msg: format!("missing field `{name}`"),
        })?;
        raw.parse::<u64>().map_err(|_| Error::MalformedRow {
            line: line_no,
            msg: format!("field `{name}` is not a base-10 integer: `{raw}`"),
        })
    };

    let uid = next("uid")?;
    let day = next("d")?;
    let timeslot = next("t")?;
    let x = next("x")?;
    let y = next("y")?;
    if let Some(extra) = fields.next() {
        return Err(Error::MalformedRow {
            line: line_no,
            msg: format!("unexpected trailing field `{extra}`"),
        });
    }

    let check = |field: &'static str, value: u64, limit: u64| -> Result<()> {
        if value >= limit {
            return Err(Error::FieldOutOfRange {
                line: line_no,
                field,
                value,
                bound: format!("[0, {limit})"),
            });
        }
        Ok(())
    };
    check("d", day, u32::MAX as u64)?;
    check("t", timeslot, TIMESLOTS_PER_DAY as u64)?;
    check("x", x, grid.raw_width as u64)?;
    check("y", y, grid.raw_height as u64)?;

    Ok(TrajectoryRecord {
        uid,
        day: day as u32,
        timeslot: timeslot as u8,
        x: x as u32,
        y: y as u32,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct DayVisits {
    pub(crate) day: u32,
    /// Strictly ascending aggregated location ids.
    pub(crate) cells: Vec<LocationId>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct IndividualVisits {
    pub(crate) uid: u64,
    /// Sorted by day; days without pings are absent.
    days: Vec<DayVisits>,
}

impl IndividualVisits {
    /// Visit set for one day (empty slice when the individual has no pings).
    pub(crate) fn on_day(&self, day: u32) -> &[LocationId] {
        match self.days.binary_search_by_key(&day, |d| d.day) {
            Ok(i) => &self.days[i].cells,
            Err(_) => &[],
        }
    }

    /// Days with at least one visit inside `range`, in ascending order.
    pub(crate) fn days_in(&self, range: Range<u32>) -> &[DayVisits] {
        let lo = self.days.partition_point(|d| d.day < range.start);
        let hi = self.days.partition_point(|d| d.day < range.end);
        &self.days[lo..hi]
    }
}

/// Per-individual daily visit sets over a day range, on the aggregated grid.
///
/// Immutable after construction; `(uid, day)` pairs with no pings are
/// represented implicitly as empty sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VisitLog {
    grid: GridSpec,
    day_lo: u32,
    day_hi: u32,
    /// Sorted by uid.
    individuals: Vec<IndividualVisits>,
}

impl VisitLog {
    /// Number of days covered (the horizon `D`).
    pub fn horizon(&self) -> u32 {
        self.day_hi - self.day_lo
    }

    /// The absolute day range `[lo, hi)` this log covers.
    pub fn day_range(&self) -> Range<u32> {
        self.day_lo..self.day_hi
    }

    pub fn grid_spec(&self) -> &GridSpec {
        &self.grid
    }

    pub fn num_individuals(&self) -> usize {
        self.individuals.len()
    }

    /// Visit set of `uid` on absolute day `day` (empty when absent).
    pub fn visits(&self, uid: u64, day: u32) -> &[LocationId] {
        match self.individuals.binary_search_by_key(&uid, |i| i.uid) {
            Ok(i) => self.individuals[i].on_day(day),
            Err(_) => &[],
        }
    }

    pub fn uids(&self) -> impl Iterator<Item = u64> + '_ {
        self.individuals.iter().map(|i| i.uid)
    }

    pub(crate) fn individuals(&self) -> &[IndividualVisits] {
        &self.individuals
    }

    /// Restrict to an absolute day sub-range. Individuals left with no
    /// visits are dropped.
    pub fn slice_days(&self, range: Range<u32>) -> Result<VisitLog> {
        if range.start < self.day_lo || range.end > self.day_hi || range.start >= range.end {
            return Err(Error::InvalidParam(format!(
                "day slice [{}, {}) not contained in log range [{}, {})",
                range.start, range.end, self.day_lo, self.day_hi
            )));
        }
        let individuals = self
            .individuals
            .iter()
            .filter_map(|ind| {
                let days: Vec<DayVisits> = ind
                    .days
                    .iter()
                    .filter(|d| range.contains(&d.day))
                    .cloned()
                    .collect();
                (!days.is_empty()).then_some(IndividualVisits { uid: ind.uid, days })
            })
            .collect();
        Ok(VisitLog {
            grid: self.grid,
            day_lo: range.start,
            day_hi: range.end,
            individuals,
        })
    }

    /// Freeze accumulated `(uid -> day -> cells)` maps into canonical form:
    /// individuals sorted by uid, days sorted, cells deduplicated ascending.
    pub(crate) fn from_day_sets(
        grid: GridSpec,
        day_range: Range<u32>,
        sets: HashMap<u64, HashMap<u32, Vec<LocationId>>>,
    ) -> VisitLog {
        let mut individuals: Vec<IndividualVisits> = sets
            .into_iter()
            .map(|(uid, days)| {
                let mut days: Vec<DayVisits> = days
                    .into_iter()
                    .map(|(day, mut cells)| {
                        cells.sort_unstable();
                        cells.dedup();
                        DayVisits { day, cells }
                    })
                    .collect();
                days.sort_unstable_by_key(|d| d.day);
                IndividualVisits { uid, days }
            })
            .collect();
        individuals.sort_unstable_by_key(|i| i.uid);
        VisitLog {
            grid,
            day_lo: day_range.start,
            day_hi: day_range.end,
            individuals,
        }
    }
}

/// Build the visit log from parsed records: aggregate coordinates, discard
/// timeslots, and keep only records with `day` in `day_range`.
pub fn build_visit_log(
    records: &[TrajectoryRecord],
    grid: &GridSpec,
    day_range: Range<u32>,
) -> Result<VisitLog> {
    if day_range.start >= day_range.end {
        return Err(Error::InvalidParam(format!(
            "empty day range [{}, {})",
            day_range.start, day_range.end
        )));
    }
    let agg = grid.aggregated();
    let mut sets: HashMap<u64, HashMap<u32, Vec<LocationId>>> = HashMap::new();
    for rec in records {
        if !day_range.contains(&rec.day) {
            continue;
        }
        let (cx, cy) = grid.aggregate_cell(rec.x, rec.y);
        sets.entry(rec.uid)
            .or_default()
            .entry(rec.day)
            .or_default()
            .push(agg.id(cx, cy));
    }
    Ok(VisitLog::from_day_sets(*grid, day_range, sets))
}

/// Parse and accumulate in one pass without materializing the record list;
/// memory stays linear in the visit sets rather than the raw pings. With
/// `day_range = None` the range is taken as `[0, max observed day + 1)`.
///
/// Equivalent to `parse_records` + `build_visit_log` on the same input.
pub fn stream_visit_log<R: BufRead>(
    reader: R,
    grid: &GridSpec,
    day_range: Option<Range<u32>>,
) -> Result<VisitLog> {
    if let Some(range) = &day_range {
        if range.start >= range.end {
            return Err(Error::InvalidParam(format!(
                "empty day range [{}, {})",
                range.start, range.end
            )));
        }
    }
    let agg = grid.aggregated();
    let mut sets: HashMap<u64, HashMap<u32, Vec<LocationId>>> = HashMap::new();
    let mut max_day = None;

    let mut lines = reader.lines();
    let header = lines
        .next()
        .transpose()?
        .ok_or_else(|| Error::MalformedRow {
            line: 1,
            msg: "empty input, expected header `uid,d,t,x,y`".into(),
        })?;
    if header.trim_end_matches('\r') != CSV_HEADER {
        return Err(Error::MalformedRow {
            line: 1,
            msg: format!("bad header `{header}`, expected `{CSV_HEADER}`"),
        });
    }
    for (idx, line) in lines.enumerate() {
        let line = line?;
        let rec = parse_row(line.trim_end_matches('\r'), idx + 2, grid)?;
        if let Some(range) = &day_range {
            if !range.contains(&rec.day) {
                continue;
            }
        }
        max_day = Some(max_day.map_or(rec.day, |m: u32| m.max(rec.day)));
        let (cx, cy) = grid.aggregate_cell(rec.x, rec.y);
        sets.entry(rec.uid)
            .or_default()
            .entry(rec.day)
            .or_default()
            .push(agg.id(cx, cy));
    }

    let range = match day_range {
        Some(range) => range,
        None => {
            let max_day = max_day.ok_or_else(|| {
                Error::InvalidParam("no records to derive a day range from".into())
            })?;
            0..max_day + 1
        }
    };
    Ok(VisitLog::from_day_sets(*grid, range, sets))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn spec(w: u32, h: u32, s: u32) -> GridSpec {
        GridSpec::new(w, h, s).unwrap()
    }

    #[test]
    fn parses_single_row() {
        let input = "uid,d,t,x,y\n0,0,9,137,42";
        let recs = parse_records(input.as_bytes(), &spec(200, 200, 10)).unwrap();
        assert_eq!(
            recs,
            vec![TrajectoryRecord {
                uid: 0,
                day: 0,
                timeslot: 9,
                x: 137,
                y: 42
            }]
        );
    }

    #[test]
    fn empty_after_header_is_empty() {
        let recs = parse_records("uid,d,t,x,y\n".as_bytes(), &spec(10, 10, 1)).unwrap();
        assert!(recs.is_empty());
    }

    #[test]
    fn timeslot_out_of_range_names_field() {
        let err = parse_records("uid,d,t,x,y\n0,0,99,1,1".as_bytes(), &spec(10, 10, 1))
            .unwrap_err();
        match err {
            Error::FieldOutOfRange { line, field, value, .. } => {
                assert_eq!((line, field, value), (2, "t", 99));
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn coordinate_out_of_bounds_names_field() {
        let err =
            parse_records("uid,d,t,x,y\n0,0,0,10,1".as_bytes(), &spec(10, 10, 1)).unwrap_err();
        match err {
            Error::FieldOutOfRange { field, .. } => assert_eq!(field, "x"),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn malformed_row_reports_line_number() {
        let err = parse_records(
            "uid,d,t,x,y\n0,0,0,1,1\nnot,a,row,at,all".as_bytes(),
            &spec(10, 10, 1),
        )
        .unwrap_err();
        match err {
            Error::MalformedRow { line, .. } => assert_eq!(line, 3),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn bad_header_rejected() {
        assert!(parse_records("uid,day,t,x,y\n".as_bytes(), &spec(10, 10, 1)).is_err());
    }

    #[test]
    fn crlf_accepted() {
        let recs =
            parse_records("uid,d,t,x,y\r\n3,1,0,5,5\r\n".as_bytes(), &spec(10, 10, 1)).unwrap();
        assert_eq!(recs.len(), 1);
        assert_eq!(recs[0].uid, 3);
    }

    fn rec(uid: u64, day: u32, x: u32, y: u32) -> TrajectoryRecord {
        TrajectoryRecord {
            uid,
            day,
            timeslot: 0,
            x,
            y,
        }
    }

    #[test]
    fn daily_sets_aggregate_and_dedup() {
        // u1 pings several raw cells inside aggregated cells 0,1,3,4 of a
        // 3x3 aggregated grid (scale 2), with repeats.
        let g = spec(6, 6, 2);
        let records = vec![
            rec(1, 0, 0, 0),
            rec(1, 0, 1, 1), // same aggregated cell (0,0)
            rec(1, 0, 2, 0),
            rec(1, 0, 0, 2),
            rec(1, 0, 3, 3),
            rec(1, 0, 2, 2), // duplicate of aggregated cell (1,1)
        ];
        let log = build_visit_log(&records, &g, 0..1).unwrap();
        let ids: Vec<u32> = log.visits(1, 0).iter().map(|l| l.0).collect();
        assert_eq!(ids, vec![0, 1, 3, 4]);
    }

    #[test]
    fn records_outside_day_range_excluded() {
        let g = spec(4, 4, 1);
        let records = vec![rec(1, 0, 0, 0), rec(1, 5, 1, 1), rec(2, 2, 2, 2)];
        let log = build_visit_log(&records, &g, 0..3).unwrap();
        assert_eq!(log.visits(1, 0).len(), 1);
        assert!(log.visits(1, 5).is_empty());
        assert_eq!(log.visits(2, 2).len(), 1);
    }

    #[test]
    fn repeated_visits_collapse() {
        let g = spec(4, 4, 1);
        let records: Vec<_> = (0..10).map(|_| rec(7, 0, 2, 3)).collect();
        let log = build_visit_log(&records, &g, 0..1).unwrap();
        assert_eq!(log.visits(7, 0).len(), 1);
    }

    #[test]
    fn streaming_matches_two_phase_build() {
        let g = spec(6, 6, 2);
        let csv = "uid,d,t,x,y\n1,0,0,0,0\n1,0,1,3,3\n2,1,0,5,5\n1,2,0,2,2\n9,7,0,1,1\n";
        let records = parse_records(csv.as_bytes(), &g).unwrap();
        let two_phase = build_visit_log(&records, &g, 0..3).unwrap();
        let streamed = stream_visit_log(csv.as_bytes(), &g, Some(0..3)).unwrap();
        assert_eq!(two_phase, streamed);

        // Without an explicit range, the horizon covers the max observed day.
        let full = stream_visit_log(csv.as_bytes(), &g, None).unwrap();
        assert_eq!(full.day_range(), 0..8);
        assert!(stream_visit_log("uid,d,t,x,y\n".as_bytes(), &g, None).is_err());
    }

    #[test]
    fn slice_days_keeps_only_range() {
        let g = spec(4, 4, 1);
        let records = vec![rec(1, 0, 0, 0), rec(1, 2, 1, 1), rec(2, 1, 2, 2)];
        let log = build_visit_log(&records, &g, 0..3).unwrap();
        let sliced = log.slice_days(1..3).unwrap();
        assert_eq!(sliced.horizon(), 2);
        assert!(sliced.visits(1, 0).is_empty());
        assert_eq!(sliced.visits(1, 2).len(), 1);
        assert_eq!(sliced.visits(2, 1).len(), 1);
        assert!(log.slice_days(0..4).is_err());
    }

    fn arb_records() -> impl Strategy<Value = Vec<TrajectoryRecord>> {
        proptest::collection::vec(
            (0u64..5, 0u32..6, 0u8..48, 0u32..12, 0u32..12).prop_map(|(uid, day, t, x, y)| {
                TrajectoryRecord {
                    uid,
                    day,
                    timeslot: t,
                    x,
                    y,
                }
            }),
            0..120,
        )
    }

    proptest! {
        #[test]
        fn duplication_is_idempotent(records in arb_records()) {
            let g = spec(12, 12, 3);
            let mut doubled = records.clone();
            doubled.extend(records.iter().cloned());
            let a = build_visit_log(&records, &g, 0..6).unwrap();
            let b = build_visit_log(&doubled, &g, 0..6).unwrap();
            prop_assert_eq!(a, b);
        }

        #[test]
        fn order_invariant(records in arb_records(), seed in any::<u64>()) {
            let g = spec(12, 12, 3);
            let mut shuffled = records.clone();
            // Deterministic Fisher-Yates driven by the seed.
            let mut state = seed.wrapping_add(0x9E3779B97F4A7C15);
            for i in (1..shuffled.len()).rev() {
                state ^= state << 13;
                state ^= state >> 7;
                state ^= state << 17;
                shuffled.swap(i, (state as usize) % (i + 1));
            }
            let a = build_visit_log(&records, &g, 0..6).unwrap();
            let b = build_visit_log(&shuffled, &g, 0..6).unwrap();
            prop_assert_eq!(a, b);
        }

        #[test]
        fn scales_compose(x in 0u32..600, y in 0u32..600, s in 1u32..10, k in 1u32..5) {
            // aggregate(p, k*s) == aggregate(aggregate(p, s), k)
            let fine = GridSpec::new(600, 600, s).unwrap();
            let coarse = GridSpec::new(600, 600, s * k).unwrap();
            let step = GridSpec::new(600, 600, k).unwrap();
            let (fx, fy) = fine.aggregate_cell(x, y);
            prop_assert_eq!(coarse.aggregate_cell(x, y), step.aggregate_cell(fx, fy));
        }
    }
}
