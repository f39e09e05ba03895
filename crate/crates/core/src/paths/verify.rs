//! Independent re-check of an inserted path against the raw timetable.
//!
//! Deliberately shares nothing with the free-interval computation: every
//! margin is tested directly against every existing event.

use std::fmt;

use super::TrainPath;
use crate::model::{Direction, Network, ParameterSet, PatternPair, StoppingPattern, Timetable, Transition};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ViolationKind {
    Structure,
    RunningTime,
    StationConstraint,
    StationSeparation,
    Headway,
    MissingTransition,
    TransitionSeparation,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub kind: ViolationKind,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}: {}", self.kind, self.message)
    }
}

/// Separation check for one disjunction: the inserted interval `[x0, x1]`
/// ends `before` ahead of `[y0, y1]` or starts `after` behind it.
fn separated(x0: i64, x1: i64, y0: i64, y1: i64, before: i64, after: i64) -> bool {
    x1 <= y0 - before || x0 >= y1 + after
}

pub fn verify_path(
    path: &TrainPath,
    network: &Network,
    timetable: &Timetable,
    params: &ParameterSet,
) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut report = |kind, message: String| out.push(Violation { kind, message });

    if path.stops.len() != path.runs.len() + 1 {
        report(ViolationKind::Structure, "stop and run counts do not match".into());
        return out;
    }
    let n = path.stops.len();
    for (i, stop) in path.stops.iter().enumerate() {
        let st = network.station(stop.station);
        if stop.track >= st.tracks.len() {
            report(ViolationKind::Structure, format!("bad track index at {}", st.id));
            return out;
        }
        if stop.arrival > stop.departure {
            report(ViolationKind::Structure, format!("departs {} before arriving", st.id));
        }
        if stop.pattern == StoppingPattern::Run && stop.arrival != stop.departure {
            report(ViolationKind::Structure, format!("runs through {} but dwells", st.id));
        }
        let c = &st.constraints;
        if stop.pattern == StoppingPattern::Stop && i > 0 && i + 1 < n {
            if let Some(w) = c.min_dwell {
                if stop.departure - stop.arrival < w.secs() {
                    report(ViolationKind::StationConstraint, format!("dwell at {} below {}", st.id, w));
                }
            }
        }
        if i > 0 && c.arrival_window.is_some_and(|w| !w.contains(stop.arrival)) {
            report(ViolationKind::StationConstraint, format!("arrival at {} outside its window", st.id));
        }
        if i + 1 < n && c.departure_window.is_some_and(|w| !w.contains(stop.departure)) {
            report(ViolationKind::StationConstraint, format!("departure from {} outside its window", st.id));
        }
    }
    for (i, run) in path.runs.iter().enumerate() {
        let (a, b) = (&path.stops[i], &path.stops[i + 1]);
        let seg = network.segment(run.segment);
        if seg.from != a.station || seg.to != b.station || run.track >= seg.tracks.len() {
            report(ViolationKind::Structure, format!("run {} does not join its stops", seg.id));
            return out;
        }
        if run.entry != a.departure || run.exit != b.arrival {
            report(ViolationKind::Structure, format!("run {} times disagree with its stops", seg.id));
        }
        let pattern = PatternPair(a.pattern, b.pattern);
        match params.run_time(network, run.segment, pattern) {
            Ok(d) if run.exit - run.entry < d.secs() => report(
                ViolationKind::RunningTime,
                format!("{} takes {} s, minimum {pattern} is {}", seg.id, run.exit - run.entry, d),
            ),
            Ok(_) => {}
            Err(e) => report(ViolationKind::RunningTime, e.to_string()),
        }
    }

    for (ti, train) in timetable.trains().iter().enumerate() {
        let name = &train.id;
        for stop in &path.stops {
            for ev in train.events.iter().filter(|e| e.station == stop.station && e.track == stop.track) {
                let m = params.gamma(ti, stop.station, stop.track);
                if !separated(
                    stop.arrival.secs(),
                    stop.departure.secs(),
                    ev.arrival.secs(),
                    ev.departure.secs(),
                    m.before.secs(),
                    m.after.secs(),
                ) {
                    let st = network.station(stop.station);
                    report(
                        ViolationKind::StationSeparation,
                        format!(
                            "at {} track {}: inserted train vs `{name}` ({}..{}), margins {}/{}",
                            st.id, st.tracks[stop.track], ev.arrival, ev.departure, m.before, m.after
                        ),
                    );
                }
            }
        }

        for run in &path.runs {
            let seg = network.segment(run.segment);
            let track_id = &seg.tracks[run.track];
            for w in train.events.windows(2) {
                let Some(theirs) = network.segment_between(w[0].station, w[1].station) else { continue };
                let other = network.segment(theirs);
                let Some(k) = w[0].segment_track else { continue };
                if other.resource != seg.resource || &other.tracks[k] != track_id {
                    continue;
                }
                let (entry, exit) = (w[0].departure.secs(), w[1].arrival.secs());
                let same_direction = other.from == seg.from && other.to == seg.to;
                let m = params.beta(ti, run.segment);
                let (bf, af) = (m.before.secs(), m.after.secs());
                let (x0, x1) = (run.entry.secs(), run.exit.secs());
                let ok = if same_direction && seg.blocks > 1 {
                    (x0 <= entry - bf && x1 <= exit - bf) || (x0 >= entry + af && x1 >= exit + af)
                } else {
                    separated(x0, x1, entry, exit, bf, af)
                };
                if !ok {
                    report(
                        ViolationKind::Headway,
                        format!(
                            "on {} track {}: inserted train ({}..{}) vs `{name}` ({}..{}), headway {}/{}",
                            seg.id, track_id, run.entry, run.exit, w[0].departure, w[1].arrival, m.before, m.after
                        ),
                    );
                }
            }
        }
    }

    // Transitions executed by the inserted train.
    for (i, run) in path.runs.iter().enumerate() {
        let (a, b) = (&path.stops[i], &path.stops[i + 1]);
        let moves = [
            (
                Transition {
                    station: a.station,
                    station_track: a.track,
                    segment: run.segment,
                    segment_track: run.track,
                    direction: Direction::Departing,
                },
                run.entry,
            ),
            (
                Transition {
                    station: b.station,
                    station_track: b.track,
                    segment: run.segment,
                    segment_track: run.track,
                    direction: Direction::Arriving,
                },
                run.exit,
            ),
        ];
        for (tr, at) in moves {
            let Some(ours) = network.transition_ix(&tr) else {
                report(ViolationKind::MissingTransition, format!("no transition {}", network.describe_transition(&tr)));
                continue;
            };
            for (ti, train) in timetable.trains().iter().enumerate() {
                for (ei, ev) in train.events.iter().enumerate() {
                    let theirs = [
                        (ev.entry_transition.filter(|_| ei > 0), ev.arrival, Direction::Arriving),
                        (ev.exit_transition, ev.departure, Direction::Departing),
                    ];
                    for (their_tr, time, dir) in theirs {
                        let Some(their_tr) = their_tr else { continue };
                        if !network.conflicting(ours, their_tr) {
                            continue;
                        }
                        let m = params.delta(ti, dir, ours, tr.direction);
                        if !separated(at.secs(), at.secs(), time.secs(), time.secs(), m.before.secs(), m.after.secs()) {
                            report(
                                ViolationKind::TransitionSeparation,
                                format!(
                                    "{} at {at}: `{}` moves at {time}, margins {}/{}",
                                    network.describe_transition(&tr),
                                    train.id,
                                    m.before,
                                    m.after
                                ),
                            );
                        }
                    }
                }
            }
        }
    }
    out
}
