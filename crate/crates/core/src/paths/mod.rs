//! Non-dominated `(departure, arrival)` pairs at the destination and the
//! concrete paths behind them.

mod records;
mod verify;

use std::fmt;

pub use records::{parse_paths, write_frontier_tsv, write_paths};
pub use verify::{verify_path, Violation, ViolationKind};

use crate::algebra::{MappedIntervalList, Slope};
use crate::dp::DpTables;
use crate::error::{Error, Result};
use crate::free_intervals::FreeIntervals;
use crate::model::{Network, ParameterSet, PatternPair, SegmentIx, StationIx, StoppingPattern};
use crate::time::{Duration, TimePoint};

use StoppingPattern::Stop;

/// A non-dominated departure/arrival pair. With positive `slack`, every
/// `(departure + i, arrival + i)` for `i` in `0..=slack` is also
/// non-dominated: a family of parallel paths.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FrontierPoint {
    pub departure: TimePoint,
    pub arrival: TimePoint,
    pub slack: Duration,
}

impl FrontierPoint {
    pub fn travel_time(&self) -> i64 {
        self.arrival - self.departure
    }

    /// Every pair the point stands for.
    pub fn expand(&self) -> impl Iterator<Item = (TimePoint, TimePoint)> + '_ {
        (0..=self.slack.secs()).map(|i| (self.departure + i, self.arrival + i))
    }

    /// Whether `self` dominates `other`: departs no earlier, arrives no
    /// later, and differs.
    pub fn dominates(&self, other: &FrontierPoint) -> bool {
        self.departure >= other.departure
            && self.arrival <= other.arrival
            && (self.departure, self.arrival) != (other.departure, other.arrival)
    }
}

impl fmt::Display for FrontierPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "depart {} arrive {}", self.departure, self.arrival)?;
        if self.slack.secs() > 0 {
            write!(f, " (+{})", self.slack)?;
        }
        Ok(())
    }
}

/// Earliest arrival for every departure, as maximal families.
///
/// Sweeping arrivals in time order, an instant is on the frontier exactly
/// when its departure beats every earlier arrival's departure.
pub fn frontier_of(arrivals: &MappedIntervalList) -> Vec<FrontierPoint> {
    let mut out: Vec<FrontierPoint> = Vec::new();
    let mut best: Option<TimePoint> = None;
    for it in arrivals.items() {
        if best.is_some_and(|m| m >= it.dep_hi()) {
            continue;
        }
        let start = match (best, it.slope) {
            (Some(m), Slope::Unit) => it.lo + (m - it.dep_lo + 1).max(0),
            _ => it.lo,
        };
        let slack = match it.slope {
            Slope::Unit => it.hi - start,
            Slope::Flat => 0,
        };
        out.push(FrontierPoint {
            departure: it.dep_at(start),
            arrival: start,
            slack: Duration::from_secs(slack),
        });
        best = Some(it.dep_hi());
    }
    out
}

pub fn frontier(network: &Network, tables: &DpTables) -> Vec<FrontierPoint> {
    frontier_of(&tables.destination(network))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathStop {
    pub station: StationIx,
    pub track: usize,
    pub pattern: StoppingPattern,
    pub arrival: TimePoint,
    pub departure: TimePoint,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathRun {
    pub segment: SegmentIx,
    pub track: usize,
    pub entry: TimePoint,
    pub exit: TimePoint,
}

/// A concrete inserted path; `runs[i]` joins `stops[i]` and `stops[i + 1]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrainPath {
    pub stops: Vec<PathStop>,
    pub runs: Vec<PathRun>,
    pub summary: FrontierPoint,
}

impl TrainPath {
    pub fn describe(&self, network: &Network) -> String {
        let ids: Vec<String> = self
            .stops
            .iter()
            .map(|s| format!("{}({})", network.station(s.station).id, s.pattern))
            .collect();
        format!("{}: {}", self.summary, ids.join(" "))
    }
}

/// Earliest instant of `list` in `[lo, hi]` whose departure is at least `d`.
fn earliest_with(list: &MappedIntervalList, lo: TimePoint, hi: TimePoint, d: TimePoint) -> Option<TimePoint> {
    let start = list.items().partition_point(|it| it.hi < lo);
    for it in list.items()[start..].iter().take_while(|it| it.lo <= hi) {
        let a = it.lo.max(lo);
        let b = it.hi.min(hi);
        let t = match it.slope {
            Slope::Flat if it.dep_lo >= d => a,
            Slope::Flat => continue,
            Slope::Unit => a.max(it.lo + (d - it.dep_lo)),
        };
        if t <= b {
            return Some(t);
        }
    }
    None
}

fn covers(list: Option<&MappedIntervalList>, t: TimePoint, d: TimePoint) -> bool {
    list.and_then(|l| l.dep_at(t)).is_some_and(|x| x >= d)
}

/// Reads one path back through the tables for the pair `(departure, arrival)`,
/// which must be one of the pairs a frontier point stands for.
///
/// Among equivalent choices it takes the earliest instant at each location,
/// then the lowest track index, then the earliest arc in the ordering.
pub fn reconstruct(
    network: &Network,
    params: &ParameterSet,
    tables: &DpTables,
    free: &FreeIntervals,
    departure: TimePoint,
    arrival: TimePoint,
) -> Result<TrainPath> {
    let d = departure;
    let request = &tables.request;
    let (u, v) = (request.origin, request.destination);
    let dead_end = |what: &str| Error::Internal(format!("reconstruction of {d}..{arrival} failed at {what}"));

    let v_tracks = network.station(v).tracks.len();
    let j = (0..v_tracks)
        .find(|&j| covers(tables.station_table(v, j, Stop), arrival, d))
        .ok_or_else(|| dead_end("the destination"))?;

    let mut stops_rev = Vec::new();
    let mut runs_rev = Vec::new();
    let (mut s, mut j, mut p, mut t, mut limit) = (v, j, Stop, arrival, tables.arcs.len());
    loop {
        if s == u && p == Stop && covers(tables.origin.get(&j), t, d) {
            stops_rev.push(PathStop { station: u, track: j, pattern: Stop, arrival: t, departure: t });
            break;
        }
        let ai = (0..limit)
            .find(|&ai| {
                let arc = &tables.arcs[ai];
                arc.to == s && covers(arc.contribution.get(&(j, p)), t, d)
            })
            .ok_or_else(|| dead_end(&format!("station {}", network.station(s).id)))?;
        let arc = &tables.arcs[ai];
        let arrived = arc.at_station.get(&(j, p)).ok_or_else(|| dead_end("arrival"))?;
        let t_arr = if p == Stop && s != v {
            let dwell = network.station(s).constraints.min_dwell.map_or(0, |w| w.secs());
            let iv = free.station(s, j).find(t).ok_or_else(|| dead_end("station free interval"))?;
            earliest_with(arrived, iv.start, t - dwell, d).ok_or_else(|| dead_end("dwell"))?
        } else if covers(Some(arrived), t, d) {
            t
        } else {
            return Err(dead_end("pass"));
        };
        stops_rev.push(PathStop { station: s, track: j, pattern: p, arrival: t_arr, departure: t });

        let seg = network.segment(arc.segment);
        let k = (0..seg.tracks.len())
            .find(|&k| covers(arc.arrivals.get(&(k, j, p)), t_arr, d))
            .ok_or_else(|| dead_end("arrival transition"))?;
        let pairs = free.segment(arc.segment, k);
        let pair = pairs
            .pairs()
            .iter()
            .find(|pr| pr.exit.contains(t_arr))
            .ok_or_else(|| dead_end("segment exit"))?;
        let mut best: Option<(TimePoint, StoppingPattern)> = None;
        for &p1 in request.patterns_at(arc.from) {
            let Some(entries) = arc.entries.get(&(k, p1)) else { continue };
            let run = params.run_time(network, arc.segment, PatternPair(p1, p))?.secs();
            let hi = pair.entry.end.min(t_arr - run);
            if let Some(tau) = earliest_with(entries, pair.entry.start, hi, d) {
                if best.is_none_or(|(b, _)| tau < b) {
                    best = Some((tau, p1));
                }
            }
        }
        let (entry, p1) = best.ok_or_else(|| dead_end("segment entry"))?;
        runs_rev.push(PathRun { segment: arc.segment, track: k, entry, exit: t_arr });

        let j1 = (0..network.station(arc.from).tracks.len())
            .find(|&j1| covers(arc.departures.get(&(j1, k, p1)), entry, d))
            .ok_or_else(|| dead_end("departure transition"))?;
        (s, j, p, t, limit) = (arc.from, j1, p1, entry, ai);
    }

    stops_rev.reverse();
    runs_rev.reverse();
    let origin_departure = stops_rev[0].departure;
    if origin_departure != departure {
        return Err(Error::Internal(format!(
            "reconstructed path departs {origin_departure}, expected {departure}"
        )));
    }
    Ok(TrainPath {
        stops: stops_rev,
        runs: runs_rev,
        summary: FrontierPoint { departure, arrival, slack: Duration::ZERO },
    })
}

/// One path per frontier point, at the family's earliest departure, with the
/// point's slack carried over.
pub fn reconstruct_all(
    network: &Network,
    params: &ParameterSet,
    tables: &DpTables,
    free: &FreeIntervals,
    points: &[FrontierPoint],
) -> Result<Vec<TrainPath>> {
    points
        .iter()
        .map(|pt| {
            let mut path = reconstruct(network, params, tables, free, pt.departure, pt.arrival)?;
            path.summary = *pt;
            Ok(path)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::MappedInterval;

    #[test]
    fn flat_piece_has_one_point() {
        let l: MappedIntervalList = [MappedInterval::flat(500, 600, 100)].into_iter().collect();
        let f = frontier_of(&l);
        assert_eq!(
            f,
            vec![FrontierPoint { departure: TimePoint(100), arrival: TimePoint(500), slack: Duration::ZERO }]
        );
    }

    #[test]
    fn unit_piece_is_a_family() {
        let l: MappedIntervalList = [MappedInterval::unit(500, 540, 100)].into_iter().collect();
        let f = frontier_of(&l);
        assert_eq!(
            f,
            vec![FrontierPoint { departure: TimePoint(100), arrival: TimePoint(500), slack: Duration::from_secs(40) }]
        );
    }

    #[test]
    fn dominated_item_is_dropped() {
        let l: MappedIntervalList =
            [MappedInterval::flat(500, 510, 100), MappedInterval::flat(600, 610, 90)].into_iter().collect();
        assert_eq!(frontier_of(&l).len(), 1);
    }

    #[test]
    fn family_starts_after_running_max() {
        let l: MappedIntervalList =
            [MappedInterval::flat(500, 500, 100), MappedInterval::unit(600, 700, 50)].into_iter().collect();
        let f = frontier_of(&l);
        assert_eq!(f[1].departure, TimePoint(101));
        assert_eq!(f[1].arrival, TimePoint(651));
        assert_eq!(f[1].slack.secs(), 49);
        for a in &f {
            for b in &f {
                assert!(!a.dominates(b));
            }
        }
    }
}
