use std::collections::{HashMap, HashSet};

use super::doc::{TimeValue, TimetableDoc, TrainDoc, TrainEventDoc};
use super::{Direction, Network, SegmentIx, StationIx, TrainId, Transition, TransitionIx};
use crate::error::{Error, Result};
use crate::time::{Epoch, TimePoint};

/// One stop or pass of an existing train.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrainEvent {
    pub station: StationIx,
    pub arrival: TimePoint,
    pub departure: TimePoint,
    /// Index into the station's track list.
    pub track: usize,
    /// Track index on the segment towards the next event; `None` on the last event.
    pub segment_track: Option<usize>,
    pub entry_transition: Option<TransitionIx>,
    pub exit_transition: Option<TransitionIx>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Train {
    pub id: TrainId,
    pub events: Vec<TrainEvent>,
}

/// A train holding a station track from `arrival` to `departure`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StationOcc {
    pub train: usize,
    pub arrival: TimePoint,
    pub departure: TimePoint,
}

/// A train traversing a segment track.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SegmentOcc {
    pub train: usize,
    pub segment: SegmentIx,
    pub entry: TimePoint,
    pub exit: TimePoint,
}

/// A train executing a transition at an instant.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Movement {
    pub train: usize,
    pub time: TimePoint,
    pub direction: Direction,
}

#[derive(Clone, Debug)]
pub struct Timetable {
    pub epoch: Option<Epoch>,
    trains: Vec<Train>,
    train_index: HashMap<TrainId, usize>,
    station_use: HashMap<(StationIx, usize), Vec<StationOcc>>,
    segment_use: HashMap<(SegmentIx, usize), Vec<SegmentOcc>>,
    movements: Vec<Vec<Movement>>,
}

impl Timetable {
    pub fn from_doc(doc: &TimetableDoc, network: &Network) -> Result<Timetable> {
        let epoch = doc.epoch.as_deref().map(Epoch::parse).transpose()?;
        let mut trains = Vec::with_capacity(doc.trains.len());
        for t in &doc.trains {
            trains.push(Self::resolve_train(t, network, epoch)?);
        }
        Timetable::from_trains(trains, network, epoch)
    }

    /// Builds a timetable from already-resolved trains.
    pub fn from_trains(mut trains: Vec<Train>, network: &Network, epoch: Option<Epoch>) -> Result<Timetable> {
        for t in &mut trains {
            link_transitions(t, network);
        }
        let mut train_index = HashMap::with_capacity(trains.len());
        for (i, t) in trains.iter().enumerate() {
            if train_index.insert(t.id.clone(), i).is_some() {
                return Err(Error::Duplicate { kind: "train", id: t.id.0.clone() });
            }
        }
        let mut timetable = Timetable {
            epoch,
            trains,
            train_index,
            station_use: HashMap::new(),
            segment_use: HashMap::new(),
            movements: vec![Vec::new(); network.transitions().len()],
        };
        timetable.derive(network);
        Ok(timetable)
    }

    fn resolve_train(doc: &TrainDoc, network: &Network, epoch: Option<Epoch>) -> Result<Train> {
        let mut events: Vec<TrainEvent> = Vec::with_capacity(doc.events.len());
        let mut visited = HashSet::new();
        for e in &doc.events {
            let station = network.station_ix(&e.station)?;
            if !visited.insert(station) {
                return Err(Error::StationRevisit {
                    train: doc.id.clone(),
                    station: e.station.clone(),
                });
            }
            let track = network.station_track_ix(station, &e.track)?;
            let arrival = e.arrival.as_ref().map(|t| t.resolve(epoch)).transpose()?;
            let departure = e.departure.as_ref().map(|t| t.resolve(epoch)).transpose()?;
            let (arrival, departure) = match (arrival, departure) {
                (Some(a), Some(d)) => (a, d),
                (Some(a), None) => (a, a),
                (None, Some(d)) => (d, d),
                (None, None) => {
                    return Err(Error::InvalidValue(format!(
                        "train `{}` at `{}` has neither arrival nor departure",
                        doc.id, e.station
                    )))
                }
            };
            let non_monotone = || Error::NonMonotone {
                train: doc.id.clone(),
                station: e.station.clone(),
            };
            if arrival > departure {
                return Err(non_monotone());
            }
            if let Some(prev) = events.last() {
                if prev.departure > arrival {
                    return Err(non_monotone());
                }
            }
            events.push(TrainEvent {
                station,
                arrival,
                departure,
                track,
                segment_track: None,
                entry_transition: None,
                exit_transition: None,
            });
        }

        for i in 0..events.len().saturating_sub(1) {
            let (from, to) = (events[i].station, events[i + 1].station);
            let seg = network.segment_between(from, to).ok_or_else(|| {
                Error::InvalidValue(format!(
                    "train `{}`: no segment from `{}` to `{}`",
                    doc.id,
                    network.station(from).id,
                    network.station(to).id
                ))
            })?;
            let k = match &doc.events[i].segment_track {
                Some(name) => network.segment_track_ix(seg, name)?,
                None => infer_segment_track(network, seg, from, events[i].track).ok_or_else(|| {
                    Error::InvalidValue(format!(
                        "train `{}`: ambiguous track on segment `{}`; give segment_track",
                        doc.id,
                        network.segment(seg).id
                    ))
                })?,
            };
            events[i].segment_track = Some(k);
        }
        let mut train = Train { id: TrainId(doc.id.clone()), events };
        link_transitions(&mut train, network);
        Ok(train)
    }

    fn derive(&mut self, network: &Network) {
        for (ti, train) in self.trains.iter().enumerate() {
            for (i, e) in train.events.iter().enumerate() {
                self.station_use.entry((e.station, e.track)).or_default().push(StationOcc {
                    train: ti,
                    arrival: e.arrival,
                    departure: e.departure,
                });
                if let Some(tr) = e.entry_transition {
                    self.movements[tr.0].push(Movement {
                        train: ti,
                        time: e.arrival,
                        direction: Direction::Arriving,
                    });
                }
                if let Some(tr) = e.exit_transition {
                    self.movements[tr.0].push(Movement {
                        train: ti,
                        time: e.departure,
                        direction: Direction::Departing,
                    });
                }
                if let (Some(k), Some(next)) = (e.segment_track, train.events.get(i + 1)) {
                    let seg = network
                        .segment_between(e.station, next.station)
                        .expect("segment checked at load");
                    self.segment_use.entry((seg, k)).or_default().push(SegmentOcc {
                        train: ti,
                        segment: seg,
                        entry: e.departure,
                        exit: next.arrival,
                    });
                }
            }
        }
        for occ in self.station_use.values_mut() {
            occ.sort_by_key(|o| (o.arrival, o.departure, o.train));
        }
        for occ in self.segment_use.values_mut() {
            occ.sort_by_key(|o| (o.entry, o.exit, o.train));
        }
        for m in &mut self.movements {
            m.sort_by_key(|m| (m.time, m.train));
        }
    }

    pub fn to_doc(&self, network: &Network) -> TimetableDoc {
        TimetableDoc {
            epoch: self.epoch.map(|e| e.to_string()),
            trains: self
                .trains
                .iter()
                .map(|t| TrainDoc {
                    id: t.id.0.clone(),
                    events: t
                        .events
                        .iter()
                        .enumerate()
                        .map(|(i, e)| {
                            let station = network.station(e.station);
                            let seg_track = e.segment_track.map(|k| {
                                let next = t.events[i + 1].station;
                                let seg = network.segment_between(e.station, next).unwrap();
                                network.segment(seg).tracks[k].0.clone()
                            });
                            TrainEventDoc {
                                station: station.id.0.clone(),
                                arrival: Some(TimeValue::from(e.arrival)),
                                departure: Some(TimeValue::from(e.departure)),
                                track: station.tracks[e.track].0.clone(),
                                segment_track: seg_track,
                            }
                        })
                        .collect(),
                })
                .collect(),
        }
    }

    pub fn trains(&self) -> &[Train] {
        &self.trains
    }

    pub fn train(&self, i: usize) -> &Train {
        &self.trains[i]
    }

    pub fn train_ix(&self, id: &str) -> Result<usize> {
        self.train_index
            .get(&TrainId(id.to_owned()))
            .copied()
            .ok_or_else(|| Error::DanglingReference { kind: "train", id: id.to_owned() })
    }

    /// Occupations of a station track, sorted by arrival.
    pub fn station_use(&self, s: StationIx, track: usize) -> &[StationOcc] {
        self.station_use.get(&(s, track)).map_or(&[], Vec::as_slice)
    }

    /// Occupations of one directed segment track, sorted by entry.
    pub fn segment_use(&self, l: SegmentIx, track: usize) -> &[SegmentOcc] {
        self.segment_use.get(&(l, track)).map_or(&[], Vec::as_slice)
    }

    /// Every occupation of the physical track that `(l, track)` runs on,
    /// from both directions. The flag is true for traffic in `l`'s direction.
    pub fn physical_track_use(
        &self,
        network: &Network,
        l: SegmentIx,
        track: usize,
    ) -> Vec<(SegmentOcc, bool)> {
        let seg = network.segment(l);
        let track_id = &seg.tracks[track];
        let mut out = Vec::new();
        for &other in network.resource_segments(l) {
            let o = network.segment(other);
            let Some(k) = o.tracks.iter().position(|t| t == track_id) else {
                continue;
            };
            let same_direction = o.from == seg.from && o.to == seg.to;
            out.extend(self.segment_use(other, k).iter().map(|occ| (*occ, same_direction)));
        }
        out
    }

    /// Movements over transition `t`, sorted by time.
    pub fn movements(&self, t: TransitionIx) -> &[Movement] {
        self.movements.get(t.0).map_or(&[], Vec::as_slice)
    }

    /// The segment and track a train uses after event `i`.
    pub fn run_after(&self, network: &Network, train: usize, i: usize) -> Option<(SegmentIx, usize)> {
        let events = &self.trains[train].events;
        let e = &events[i];
        let next = events.get(i + 1)?;
        Some((network.segment_between(e.station, next.station)?, e.segment_track?))
    }
}

fn infer_segment_track(network: &Network, seg: SegmentIx, from: StationIx, track: usize) -> Option<usize> {
    if network.segment(seg).tracks.len() == 1 {
        return Some(0);
    }
    let mut candidates = network.transitions().iter().filter(|t| {
        t.direction == Direction::Departing && t.segment == seg && t.station == from && t.station_track == track
    });
    let first = candidates.next()?;
    candidates.next().is_none().then_some(first.segment_track)
}

/// Fills in the transitions a train executes, where the network models them.
pub(crate) fn link_transitions(train: &mut Train, network: &Network) {
    for i in 0..train.events.len() {
        let e = &train.events[i];
        let mut exit = None;
        let mut entry = None;
        if let (Some(k), Some(next)) = (e.segment_track, train.events.get(i + 1)) {
            if let Some(seg) = network.segment_between(e.station, next.station) {
                exit = network.transition_ix(&Transition {
                    station: e.station,
                    station_track: e.track,
                    segment: seg,
                    segment_track: k,
                    direction: Direction::Departing,
                });
            }
        }
        if i > 0 {
            let prev = &train.events[i - 1];
            if let (Some(k), Some(seg)) = (prev.segment_track, network.segment_between(prev.station, e.station)) {
                entry = network.transition_ix(&Transition {
                    station: e.station,
                    station_track: e.track,
                    segment: seg,
                    segment_track: k,
                    direction: Direction::Arriving,
                });
            }
        }
        train.events[i].exit_transition = exit;
        train.events[i].entry_transition = entry;
    }
}
