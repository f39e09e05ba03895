//! The interval dynamic program over an arc ordering.
//!
//! For every arc `s1 -> s2` in ordering order the sweep filters the station
//! tables of `s1` through departure transitions, the segment's entry
//! windows, the running time, exit windows and arrival transitions, and
//! merges the result into the station tables of `s2`. Every intermediate
//! table is kept so paths can be read back afterwards.

use std::collections::{BTreeMap, HashMap};

use crate::algebra::{extend, intersect, shift, union, Interval, MappedIntervalList};
use crate::error::{Error, Result};
use crate::free_intervals::FreeIntervals;
use crate::model::{
    Direction, InsertionRequest, Network, ParameterSet, PatternPair, SegmentIx, StationIx, StoppingPattern,
    Transition, TransitionIx, Window,
};
use crate::routing::RouteGraph;

use StoppingPattern::{Run, Stop};

/// Tables produced while processing one arc.
#[derive(Clone, Debug, Default)]
pub struct ArcTables {
    pub segment: SegmentIx,
    pub from: StationIx,
    pub to: StationIx,
    /// After the departure transition, by `(station track, segment track, pattern)`.
    pub departures: BTreeMap<(usize, usize, StoppingPattern), MappedIntervalList>,
    /// Entering the segment, by `(segment track, pattern at from)`.
    pub entries: BTreeMap<(usize, StoppingPattern), MappedIntervalList>,
    /// Leaving the segment, by `(segment track, pattern at to)`.
    pub exits: BTreeMap<(usize, StoppingPattern), MappedIntervalList>,
    /// After the arrival transition, by `(segment track, station track, pattern)`.
    pub arrivals: BTreeMap<(usize, usize, StoppingPattern), MappedIntervalList>,
    /// Arrival instants at `to` that the station track admits.
    pub at_station: BTreeMap<(usize, StoppingPattern), MappedIntervalList>,
    /// Departure-ready instants at `to`, merged into its station tables.
    pub contribution: BTreeMap<(usize, StoppingPattern), MappedIntervalList>,
}

impl ArcTables {
    fn new(segment: SegmentIx, from: StationIx, to: StationIx) -> Self {
        ArcTables { segment, from, to, ..Default::default() }
    }

    pub fn item_count(&self) -> usize {
        [&self.departures, &self.arrivals].iter().flat_map(|m| m.values()).map(|l| l.len()).sum::<usize>()
            + [&self.entries, &self.exits, &self.at_station, &self.contribution]
                .iter()
                .flat_map(|m| m.values())
                .map(|l| l.len())
                .sum::<usize>()
    }
}

#[derive(Clone, Debug)]
pub struct DpTables {
    pub request: InsertionRequest,
    pub route_graph: RouteGraph,
    /// Origin tables, by station track (pattern S only).
    pub origin: BTreeMap<usize, MappedIntervalList>,
    /// Per arc, in ordering order.
    pub arcs: Vec<ArcTables>,
    /// Final station tables.
    pub stations: HashMap<(StationIx, usize, StoppingPattern), MappedIntervalList>,
}

impl DpTables {
    pub fn station_table(&self, s: StationIx, j: usize, p: StoppingPattern) -> Option<&MappedIntervalList> {
        self.stations.get(&(s, j, p))
    }

    /// Destination arrival tables merged over tracks.
    pub fn destination(&self, network: &Network) -> MappedIntervalList {
        let v = self.request.destination;
        (0..network.station(v).tracks.len())
            .filter_map(|j| self.stations.get(&(v, j, Stop)))
            .fold(MappedIntervalList::new(), |acc, l| union(&acc, l))
    }

    pub fn total_items(&self) -> usize {
        self.origin.values().map(|l| l.len()).sum::<usize>()
            + self.arcs.iter().map(ArcTables::item_count).sum::<usize>()
            + self.stations.values().map(|l| l.len()).sum::<usize>()
    }
}

fn window_intervals(w: Option<Window>) -> Option<[Interval; 1]> {
    w.map(|w| [Interval::new(w.start, w.end)])
}

/// Runs the sweep. Station constraints on the network apply: minimum dwell
/// at stops and arrival / departure windows.
pub fn run(
    network: &Network,
    params: &ParameterSet,
    request: &InsertionRequest,
    route_graph: &RouteGraph,
    free: &FreeIntervals,
) -> Result<DpTables> {
    request.check()?;
    let (u, v) = (request.origin, request.destination);
    if !route_graph.contains_station(u) || !route_graph.contains_station(v) {
        return Err(Error::Request("origin or destination is not on any candidate route".into()));
    }

    let mut stations: HashMap<(StationIx, usize, StoppingPattern), MappedIntervalList> = HashMap::new();
    let mut origin = BTreeMap::new();
    let u_constraints = &network.station(u).constraints;
    for j in 0..network.station(u).tracks.len() {
        let mut x = MappedIntervalList::identity(free.station(u, j).intervals());
        if let Some(w) = window_intervals(u_constraints.departure_window) {
            x = intersect(&x, &w);
        }
        origin.insert(j, x.clone());
        stations.insert((u, j, Stop), x);
    }

    let mut arcs = Vec::with_capacity(route_graph.arcs().len());
    for &l in route_graph.arcs() {
        let seg = network.segment(l);
        let tables = process_segment(network, params, request, free, &stations, l)?;
        for (&(j2, p2), x) in &tables.contribution {
            let slot = stations.entry((seg.to, j2, p2)).or_default();
            *slot = union(slot, x);
        }
        arcs.push(tables);
    }
    log::debug!(
        "dp over {} arcs: {} table items",
        arcs.len(),
        arcs.iter().map(ArcTables::item_count).sum::<usize>()
    );
    Ok(DpTables { request: request.clone(), route_graph: route_graph.clone(), origin, arcs, stations })
}

fn transition_ix(
    network: &Network,
    s: StationIx,
    j: usize,
    l: SegmentIx,
    k: usize,
    direction: Direction,
) -> Option<TransitionIx> {
    network.transition_ix(&Transition { station: s, station_track: j, segment: l, segment_track: k, direction })
}

/// The five filtering steps for one arc, reading the current tables of its
/// tail station.
pub fn process_segment(
    network: &Network,
    params: &ParameterSet,
    request: &InsertionRequest,
    free: &FreeIntervals,
    stations: &HashMap<(StationIx, usize, StoppingPattern), MappedIntervalList>,
    l: SegmentIx,
) -> Result<ArcTables> {
    let seg = network.segment(l);
    let (s1, s2) = (seg.from, seg.to);
    let mut t = ArcTables::new(l, s1, s2);
    let p1s = request.patterns_at(s1);
    let p2s = request.patterns_at(s2);
    let s1_tracks = network.station(s1).tracks.len();
    let s2_tracks = network.station(s2).tracks.len();

    // Running times are needed for every pattern pair this arc can use.
    let mut run_time = HashMap::new();
    for &p1 in p1s {
        for &p2 in p2s {
            run_time.insert((p1, p2), params.run_time(network, l, PatternPair(p1, p2))?.secs());
        }
    }

    for k in 0..seg.tracks.len() {
        let pairs = free.segment(l, k);
        // (1) departure transitions, (2) merge over station tracks and enter.
        for &p1 in p1s {
            let mut merged = MappedIntervalList::new();
            for j in 0..s1_tracks {
                let Some(x) = stations.get(&(s1, j, p1)).filter(|x| !x.is_empty()) else { continue };
                let Some(tr) = transition_ix(network, s1, j, l, k, Direction::Departing) else { continue };
                let dep = intersect(x, free.transition(tr).intervals());
                if dep.is_empty() {
                    continue;
                }
                merged = union(&merged, &dep);
                t.departures.insert((j, k, p1), dep);
            }
            let entry = intersect(&merged, pairs.entries());
            if !entry.is_empty() {
                t.entries.insert((k, p1), entry);
            }
        }
        // (3) running times, merged over the pattern at the tail.
        for &p2 in p2s {
            let mut exit = MappedIntervalList::new();
            for &p1 in p1s {
                if let Some(entry) = t.entries.get(&(k, p1)) {
                    exit = union(&exit, &shift(entry, run_time[&(p1, p2)], pairs.pairs()));
                }
            }
            if exit.is_empty() {
                continue;
            }
            // (4) arrival transitions.
            for j2 in 0..s2_tracks {
                let Some(tr) = transition_ix(network, s2, j2, l, k, Direction::Arriving) else { continue };
                let arr = intersect(&exit, free.transition(tr).intervals());
                if !arr.is_empty() {
                    t.arrivals.insert((k, j2, p2), arr);
                }
            }
            t.exits.insert((k, p2), exit);
        }
    }

    // (5) merge over segment tracks, station track filter, waiting.
    let c2 = &network.station(s2).constraints;
    let terminal = s2 == request.destination;
    for j2 in 0..s2_tracks {
        let station_free = free.station(s2, j2);
        for &p2 in p2s {
            let mut arrived = MappedIntervalList::new();
            for k in 0..seg.tracks.len() {
                if let Some(a) = t.arrivals.get(&(k, j2, p2)) {
                    arrived = union(&arrived, a);
                }
            }
            arrived = intersect(&arrived, station_free.intervals());
            if let Some(w) = window_intervals(c2.arrival_window) {
                arrived = intersect(&arrived, &w);
            }
            if arrived.is_empty() {
                continue;
            }
            let mut ready = match (p2, terminal) {
                (Stop, false) => {
                    let dwell = c2.min_dwell.map_or(0, |d| d.secs());
                    extend(&arrived, station_free.intervals(), dwell)
                }
                _ => arrived.clone(),
            };
            if !terminal {
                if let Some(w) = window_intervals(c2.departure_window) {
                    ready = intersect(&ready, &w);
                }
            }
            t.at_station.insert((j2, p2), arrived);
            if !ready.is_empty() {
                t.contribution.insert((j2, p2), ready);
            }
        }
    }
    Ok(t)
}

/// Items per route station: its tables merged over tracks and patterns,
/// against the free intervals summed over its tracks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TableSize {
    pub location: String,
    pub items: usize,
    pub free_intervals: usize,
}

pub fn table_sizes(network: &Network, tables: &DpTables, free: &FreeIntervals) -> Vec<TableSize> {
    let merged = |lists: Vec<&MappedIntervalList>| lists.into_iter().fold(MappedIntervalList::default(), |acc, l| union(&acc, l));
    let mut out = Vec::new();
    for s in tables.route_graph.stations() {
        let st = network.station(s);
        let lists = (0..st.tracks.len())
            .flat_map(|j| [Run, Stop].into_iter().filter_map(move |p| tables.station_table(s, j, p)))
            .collect();
        let free_intervals = (0..st.tracks.len()).map(|j| free.station(s, j).len()).sum();
        out.push(TableSize { location: st.id.to_string(), items: merged(lists).len(), free_intervals });
    }
    out
}

/// Human-readable dump of every table.
pub fn dump(network: &Network, tables: &DpTables) -> String {
    use std::fmt::Write as _;
    let mut out = String::new();
    let u = network.station(tables.request.origin);
    for (j, x) in &tables.origin {
        let _ = writeln!(out, "origin {} track {} S: {x}", u.id, u.tracks[*j]);
    }
    for arc in &tables.arcs {
        let seg = network.segment(arc.segment);
        let (a, b) = (network.station(arc.from), network.station(arc.to));
        let _ = writeln!(out, "[arc {}]", seg.id);
        for ((j, k, p), x) in &arc.departures {
            let _ = writeln!(out, "departure {}:{} -> track {} {p}: {x}", a.id, a.tracks[*j], seg.tracks[*k]);
        }
        for ((k, p), x) in &arc.entries {
            let _ = writeln!(out, "entry track {} {p}: {x}", seg.tracks[*k]);
        }
        for ((k, p), x) in &arc.exits {
            let _ = writeln!(out, "exit track {} {p}: {x}", seg.tracks[*k]);
        }
        for ((k, j, p), x) in &arc.arrivals {
            let _ = writeln!(out, "arrival track {} -> {}:{} {p}: {x}", seg.tracks[*k], b.id, b.tracks[*j]);
        }
        for ((j, p), x) in &arc.contribution {
            let _ = writeln!(out, "station {}:{} {p}: {x}", b.id, b.tracks[*j]);
        }
    }
    out
}
