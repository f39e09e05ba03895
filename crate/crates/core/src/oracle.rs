//! Brute-force reference: a time-expanded search on a fixed time grid.
//!
//! Nothing here uses interval arithmetic. Feasibility is evaluated per
//! instant (or per pair of instants) straight from the timetable events,
//! and the search keeps, for every (location, track, pattern, grid instant),
//! the latest origin departure that reaches it. Arcs are relaxed in the
//! order of the arc ordering, so the walks considered are exactly those
//! using arcs in increasing ordering position.

use crate::error::{Error, Result};
use crate::free_intervals::Element;
use crate::model::{
    Direction, InsertionRequest, Network, ParameterSet, PatternPair, SegmentIx, StationIx, StoppingPattern,
    Timetable, Transition, TransitionIx,
};
use crate::routing::RouteGraph;
use crate::time::TimePoint;

use StoppingPattern::{Run, Stop};

/// Largest number of (station, track, pattern, instant) nodes searched.
pub const NODE_CAP: usize = 4_000_000;

/// Whether the inserted train may occupy station track `(s, j)` over the
/// whole stay `[arrival, departure]`.
pub fn station_stay_ok(
    timetable: &Timetable,
    params: &ParameterSet,
    s: StationIx,
    j: usize,
    arrival: TimePoint,
    departure: TimePoint,
) -> bool {
    timetable.trains().iter().enumerate().all(|(ti, train)| {
        train.events.iter().filter(|e| e.station == s && e.track == j).all(|e| {
            let m = params.gamma(ti, s, j);
            departure.secs() <= e.arrival.secs() - m.before.secs()
                || arrival.secs() >= e.departure.secs() + m.after.secs()
        })
    })
}

/// Every movement that conflicts with the inserted train executing `tr`,
/// as `(time, before, after)` margins.
fn transition_blockers(
    network: &Network,
    timetable: &Timetable,
    params: &ParameterSet,
    tr: TransitionIx,
) -> Vec<(i64, i64, i64)> {
    let ours = network.transition(tr).direction;
    let mut out = Vec::new();
    for (ti, train) in timetable.trains().iter().enumerate() {
        let n = train.events.len();
        for (i, e) in train.events.iter().enumerate() {
            let moves = [
                (if i > 0 { e.entry_transition } else { None }, e.arrival, Direction::Arriving),
                (if i + 1 < n { e.exit_transition } else { None }, e.departure, Direction::Departing),
            ];
            for (theirs, time, dir) in moves {
                let Some(theirs) = theirs else { continue };
                if network.conflicting(tr, theirs) {
                    let m = params.delta(ti, dir, tr, ours);
                    out.push((time.secs(), m.before.secs(), m.after.secs()));
                }
            }
        }
    }
    out
}

pub fn transition_ok(network: &Network, timetable: &Timetable, params: &ParameterSet, tr: TransitionIx, t: TimePoint) -> bool {
    transition_blockers(network, timetable, params, tr)
        .iter()
        .all(|&(m, before, after)| t.secs() <= m - before || t.secs() >= m + after)
}

/// Existing traversals of the physical track under `(l, k)`, as
/// `(entry, exit, same_direction, before, after)`.
fn segment_blockers(
    network: &Network,
    timetable: &Timetable,
    params: &ParameterSet,
    l: SegmentIx,
    k: usize,
) -> Vec<(i64, i64, bool, i64, i64)> {
    let seg = network.segment(l);
    let mut out = Vec::new();
    for (ti, train) in timetable.trains().iter().enumerate() {
        for w in train.events.windows(2) {
            let Some(theirs) = network.segment_between(w[0].station, w[1].station) else { continue };
            let other = network.segment(theirs);
            let Some(kk) = w[0].segment_track else { continue };
            if other.resource != seg.resource || other.tracks[kk] != seg.tracks[k] {
                continue;
            }
            let m = params.beta(ti, l);
            let same = other.from == seg.from && other.to == seg.to;
            out.push((w[0].departure.secs(), w[1].arrival.secs(), same, m.before.secs(), m.after.secs()));
        }
    }
    out
}

fn pass_ok(blockers: &[(i64, i64, bool, i64, i64)], multi_block: bool, x0: i64, x1: i64) -> bool {
    blockers.iter().all(|&(entry, exit, same, bf, af)| {
        if same && multi_block {
            (x0 <= entry - bf && x1 <= exit - bf) || (x0 >= entry + af && x1 >= exit + af)
        } else {
            x1 <= entry - bf || x0 >= exit + af
        }
    })
}

/// Whether entering `(l, k)` at `entry` and leaving at `exit` keeps every
/// headway.
pub fn segment_ok(
    network: &Network,
    timetable: &Timetable,
    params: &ParameterSet,
    l: SegmentIx,
    k: usize,
    entry: TimePoint,
    exit: TimePoint,
) -> bool {
    let blockers = segment_blockers(network, timetable, params, l, k);
    pass_ok(&blockers, network.segment(l).blocks > 1, entry.secs(), exit.secs())
}

/// Per-instant feasibility of a station track or transition; segments need
/// both instants, see [`segment_ok`].
pub fn oracle_free_check(
    network: &Network,
    timetable: &Timetable,
    params: &ParameterSet,
    element: Element,
    t: TimePoint,
) -> bool {
    match element {
        Element::StationTrack(s, j) => station_stay_ok(timetable, params, s, j, t, t),
        Element::Transition(tr) => transition_ok(network, timetable, params, tr, t),
        Element::SegmentTrack(l, k) => segment_ok(network, timetable, params, l, k, t, t),
    }
}

const NONE: i64 = i64::MIN;

struct Grid {
    start: i64,
    step: i64,
    len: usize,
}

impl Grid {
    fn time(&self, i: usize) -> i64 {
        self.start + self.step * i as i64
    }
}

/// The non-dominated `(departure, arrival)` pairs on the grid
/// `T_min, T_min + g, …` for routes in `route_graph`.
pub fn oracle_frontier(
    network: &Network,
    timetable: &Timetable,
    params: &ParameterSet,
    request: &InsertionRequest,
    route_graph: &RouteGraph,
    g: i64,
) -> Result<Vec<(TimePoint, TimePoint)>> {
    request.check()?;
    if g <= 0 {
        return Err(Error::Request("grid step must be positive".into()));
    }
    let w = request.window;
    let grid = Grid { start: w.start.secs(), step: g, len: ((w.end - w.start) / g) as usize + 1 };
    let tracks: usize = route_graph.stations().map(|s| network.station(s).tracks.len()).sum();
    let nodes = tracks * 2 * grid.len;
    if nodes > NODE_CAP {
        return Err(Error::OracleTooLarge { nodes, cap: NODE_CAP });
    }
    let t_of = |i: usize| TimePoint(grid.time(i));
    let n_stations = network.stations().len();
    let slot = |p: StoppingPattern| (p == Stop) as usize;
    // ready[s][j][p][i]: latest origin departure with the train ready to
    // leave s from track j with pattern p at grid instant i.
    let mut ready: Vec<Vec<[Vec<i64>; 2]>> = (0..n_stations)
        .map(|s| {
            (0..network.station(StationIx(s)).tracks.len())
                .map(|_| [vec![NONE; grid.len], vec![NONE; grid.len]])
                .collect()
        })
        .collect();

    let (u, v) = (request.origin, request.destination);
    let cu = &network.station(u).constraints;
    for j in 0..network.station(u).tracks.len() {
        for i in 0..grid.len {
            let t = t_of(i);
            if station_stay_ok(timetable, params, u, j, t, t) && cu.departure_window.is_none_or(|w| w.contains(t)) {
                ready[u.0][j][slot(Stop)][i] = t.secs();
            }
        }
    }

    let transition_mask = |tr: Option<TransitionIx>| -> Vec<bool> {
        let Some(tr) = tr else { return vec![false; grid.len] };
        let blockers = transition_blockers(network, timetable, params, tr);
        (0..grid.len)
            .map(|i| {
                let t = grid.time(i);
                blockers.iter().all(|&(m, b, a)| t <= m - b || t >= m + a)
            })
            .collect()
    };

    for &l in route_graph.arcs() {
        let seg = network.segment(l);
        let (s1, s2) = (seg.from, seg.to);
        let p1s = request.patterns_at(s1);
        let p2s = request.patterns_at(s2);
        let n1 = network.station(s1).tracks.len();
        let n2 = network.station(s2).tracks.len();
        let terminal = s2 == v;
        let c2 = &network.station(s2).constraints;
        let mut arrived: Vec<[Vec<i64>; 2]> = (0..n2).map(|_| [vec![NONE; grid.len], vec![NONE; grid.len]]).collect();

        for k in 0..seg.tracks.len() {
            let blockers = segment_blockers(network, timetable, params, l, k);
            let multi = seg.blocks > 1;
            // Ready to enter the segment, per tail pattern.
            let mut entering = [vec![NONE; grid.len], vec![NONE; grid.len]];
            for &p1 in p1s {
                for j1 in 0..n1 {
                    let tr = network.transition_ix(&Transition {
                        station: s1,
                        station_track: j1,
                        segment: l,
                        segment_track: k,
                        direction: Direction::Departing,
                    });
                    let ok = transition_mask(tr);
                    for i in 0..grid.len {
                        let d = ready[s1.0][j1][slot(p1)][i];
                        if d != NONE && ok[i] {
                            entering[slot(p1)][i] = entering[slot(p1)][i].max(d);
                        }
                    }
                }
            }
            for &p2 in p2s {
                let mut leaving = vec![NONE; grid.len];
                for &p1 in p1s {
                    let run = params.run_time(network, l, PatternPair(p1, p2))?.secs();
                    for (i, &d) in entering[slot(p1)].iter().enumerate() {
                        if d == NONE {
                            continue;
                        }
                        let x0 = grid.time(i);
                        for (e, slot_e) in leaving.iter_mut().enumerate().skip(i) {
                            let x1 = grid.time(e);
                            if x1 - x0 >= run && *slot_e < d && pass_ok(&blockers, multi, x0, x1) {
                                *slot_e = d;
                            }
                        }
                    }
                }
                for j2 in 0..n2 {
                    let tr = network.transition_ix(&Transition {
                        station: s2,
                        station_track: j2,
                        segment: l,
                        segment_track: k,
                        direction: Direction::Arriving,
                    });
                    let ok = transition_mask(tr);
                    for i in 0..grid.len {
                        let t = t_of(i);
                        if leaving[i] != NONE
                            && ok[i]
                            && c2.arrival_window.is_none_or(|w| w.contains(t))
                            && station_stay_ok(timetable, params, s2, j2, t, t)
                        {
                            let cell = &mut arrived[j2][slot(p2)][i];
                            *cell = (*cell).max(leaving[i]);
                        }
                    }
                }
            }
        }

        for (j2, by_pattern) in arrived.iter().enumerate() {
            for &p2 in p2s {
                let arr = &by_pattern[slot(p2)];
                let mut out = vec![NONE; grid.len];
                if p2 == Run || terminal {
                    out.clone_from(arr);
                } else {
                    let dwell = c2.min_dwell.map_or(0, |d| d.secs());
                    for (ia, &d) in arr.iter().enumerate() {
                        if d == NONE {
                            continue;
                        }
                        for (id, cell) in out.iter_mut().enumerate().skip(ia) {
                            if grid.time(id) - grid.time(ia) < dwell {
                                continue;
                            }
                            if !station_stay_ok(timetable, params, s2, j2, t_of(ia), t_of(id)) {
                                break;
                            }
                            *cell = (*cell).max(d);
                        }
                    }
                }
                if !terminal {
                    if let Some(w) = c2.departure_window {
                        for (i, cell) in out.iter_mut().enumerate() {
                            if !w.contains(t_of(i)) {
                                *cell = NONE;
                            }
                        }
                    }
                }
                let target = &mut ready[s2.0][j2][slot(p2)];
                for (cell, x) in target.iter_mut().zip(out) {
                    *cell = (*cell).max(x);
                }
            }
        }
    }

    let mut best = NONE;
    let mut frontier = Vec::new();
    for i in 0..grid.len {
        let d = (0..network.station(v).tracks.len()).map(|j| ready[v.0][j][slot(Stop)][i]).max().unwrap_or(NONE);
        if d != NONE && d > best {
            frontier.push((TimePoint(d), t_of(i)));
            best = d;
        }
    }
    Ok(frontier)
}
