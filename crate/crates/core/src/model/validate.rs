use std::fmt;

use super::{Network, ParameterSet, PatternPair, StationIx, StoppingPattern, Timetable, TransitionIx};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Severity {
    Info,
    Warning,
    Error,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub severity: Severity,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.severity {
            Severity::Info => "info",
            Severity::Warning => "warning",
            Severity::Error => "error",
        };
        write!(f, "{tag}: {}", self.message)
    }
}

/// Checks the existing timetable against its own margins and reports
/// structural gaps. The timetable is authoritative, so margin violations are
/// warnings: they only shrink the capacity left for insertion.
///
/// Each pair of existing trains `a < b` is checked by treating `b` as if it
/// were inserted next to `a`, using `a`'s margins.
pub fn validate(network: &Network, timetable: &Timetable, params: &ParameterSet) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let warn = |out: &mut Vec<Diagnostic>, message: String| {
        out.push(Diagnostic { severity: Severity::Warning, message })
    };
    let name = |t: usize| timetable.train(t).id.as_str();

    for s in network.unreachable_stations() {
        warn(&mut out, format!("station `{}` is disconnected from the network", network.station(s).id));
    }

    for (si, station) in network.stations().iter().enumerate() {
        let s = StationIx(si);
        for j in 0..station.tracks.len() {
            let occ = timetable.station_use(s, j);
            for (x, a) in occ.iter().enumerate() {
                for b in &occ[x + 1..] {
                    let (first, second) = if a.train < b.train { (a, b) } else { (b, a) };
                    let m = params.gamma(first.train, s, j);
                    let ok = second.departure.secs() <= first.arrival.secs() - m.before.secs()
                        || second.arrival.secs() >= first.departure.secs() + m.after.secs();
                    if !ok {
                        warn(
                            &mut out,
                            format!(
                                "trains `{}` and `{}` are closer than the station margin at `{}` track {}",
                                name(first.train),
                                name(second.train),
                                station.id,
                                station.tracks[j]
                            ),
                        );
                    }
                }
            }
        }
    }

    // Physical tracks: visit each (resource, track id) once via its lowest segment.
    for (li, seg) in network.segments().iter().enumerate() {
        let l = super::SegmentIx(li);
        for (k, track) in seg.tracks.iter().enumerate() {
            let owner = network
                .resource_segments(l)
                .iter()
                .copied()
                .find(|&o| network.segment(o).tracks.contains(track));
            if owner != Some(l) {
                continue;
            }
            let mut occ = timetable.physical_track_use(network, l, k);
            occ.sort_by_key(|(o, _)| (o.entry, o.train));
            for (x, &(a, _)) in occ.iter().enumerate() {
                for &(b, _) in &occ[x + 1..] {
                    let (first, second) = if a.train < b.train { (a, b) } else { (b, a) };
                    let theirs = network.segment(first.segment);
                    let ours = network.segment(second.segment);
                    let same = theirs.from == ours.from && theirs.to == ours.to;
                    let (ea, xa, eb, xb) = if same && ours.blocks > 1 {
                        (first.entry, first.exit, first.entry, first.exit)
                    } else {
                        (first.entry, first.entry, first.exit, first.exit)
                    };
                    let m = params.beta(first.train, second.segment);
                    let (bf, af) = (m.before.secs(), m.after.secs());
                    let ok = (second.entry.secs() <= ea.secs() - bf && second.exit.secs() <= xa.secs() - bf)
                        || (second.entry.secs() >= eb.secs() + af && second.exit.secs() >= xb.secs() + af);
                    if !ok {
                        warn(
                            &mut out,
                            format!(
                                "trains `{}` and `{}` violate the headway on segment `{}` track {}",
                                name(first.train),
                                name(second.train),
                                ours.id,
                                track
                            ),
                        );
                    }
                }
            }
        }
    }

    for ti in 0..network.transitions().len() {
        let t = TransitionIx(ti);
        let mut others = vec![t];
        others.extend(network.conflict_partners(t).iter().copied().filter(|&p| p.0 > ti));
        for &u in &others {
            for a in timetable.movements(t) {
                for b in timetable.movements(u) {
                    if a.train == b.train {
                        continue;
                    }
                    let ((first, _), (second, second_tr)) =
                        if a.train < b.train { ((a, t), (b, u)) } else { ((b, u), (a, t)) };
                    if t == u && a.train > b.train {
                        continue;
                    }
                    let m = params.delta(first.train, first.direction, second_tr, second.direction);
                    let ok = second.time.secs() <= first.time.secs() - m.before.secs()
                        || second.time.secs() >= first.time.secs() + m.after.secs();
                    if !ok {
                        warn(
                            &mut out,
                            format!(
                                "trains `{}` and `{}` violate the transition margin at {}",
                                name(first.train),
                                name(second.train),
                                network.describe_transition(network.transition(second_tr))
                            ),
                        );
                    }
                }
            }
        }
    }

    for (ti, train) in timetable.trains().iter().enumerate() {
        for (i, e) in train.events.iter().enumerate() {
            let has_next = i + 1 < train.events.len();
            if has_next && e.exit_transition.is_none() {
                warn(
                    &mut out,
                    format!(
                        "train `{}` departs `{}` over a transition the network does not model",
                        name(ti),
                        network.station(e.station).id
                    ),
                );
            }
            if i > 0 && e.entry_transition.is_none() {
                warn(
                    &mut out,
                    format!(
                        "train `{}` arrives at `{}` over a transition the network does not model",
                        name(ti),
                        network.station(e.station).id
                    ),
                );
            }
        }
    }

    let mut missing = 0;
    for seg in network.segments().iter() {
        let ix = network.segment_ix(seg.id.as_str()).expect("own segment");
        let complete = params.run_times(ix).is_some_and(|r| {
            StoppingPattern::ALL
                .iter()
                .all(|&p| StoppingPattern::ALL.iter().all(|&q| r.get(PatternPair(p, q)).is_some()))
        });
        if !complete {
            missing += 1;
        }
    }
    if missing > 0 {
        out.push(Diagnostic {
            severity: Severity::Info,
            message: format!("{missing} segment(s) lack running times for some stopping pattern"),
        });
    }
    out
}
