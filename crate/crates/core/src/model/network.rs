use std::collections::{BTreeSet, HashMap, VecDeque};

use super::doc::{ConflictDoc, NetworkDoc, SegmentDoc, StationDoc, TimeValue, TransitionDoc};
use super::{Direction, SegmentId, SegmentIx, StationId, StationIx, TrackId, TransitionIx, Window};
use crate::error::{Error, Result};
use crate::time::{Duration, Epoch};

/// Per-station restrictions on the inserted train.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct StationConstraints {
    pub min_dwell: Option<Duration>,
    pub arrival_window: Option<Window>,
    pub departure_window: Option<Window>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Station {
    pub id: StationId,
    pub name: String,
    pub tracks: Vec<TrackId>,
    pub constraints: StationConstraints,
}

/// A directed connection between two adjacent stations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Segment {
    pub id: SegmentId,
    pub from: StationIx,
    pub to: StationIx,
    pub tracks: Vec<TrackId>,
    /// Number of signal blocks; with one block the whole segment is a
    /// single occupation unit.
    pub blocks: u32,
    /// Physical resource shared with the opposite direction, if any.
    pub resource: usize,
}

/// A movement between a station track and a segment track.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Transition {
    pub station: StationIx,
    pub station_track: usize,
    pub segment: SegmentIx,
    pub segment_track: usize,
    pub direction: Direction,
}

#[derive(Clone, Debug)]
pub struct Network {
    pub epoch: Option<Epoch>,
    stations: Vec<Station>,
    segments: Vec<Segment>,
    transitions: Vec<Transition>,
    conflicts: Vec<(TransitionIx, TransitionIx)>,
    resources: Vec<String>,
    station_index: HashMap<StationId, StationIx>,
    segment_index: HashMap<SegmentId, SegmentIx>,
    transition_index: HashMap<Transition, TransitionIx>,
    partners: Vec<Vec<TransitionIx>>,
    out_segments: Vec<Vec<SegmentIx>>,
    in_segments: Vec<Vec<SegmentIx>>,
    resource_segments: Vec<Vec<SegmentIx>>,
}

impl Network {
    pub fn from_doc(doc: &NetworkDoc) -> Result<Network> {
        let epoch = doc.epoch.as_deref().map(Epoch::parse).transpose()?;
        let mut stations = Vec::with_capacity(doc.stations.len());
        let mut station_index = HashMap::new();
        for s in &doc.stations {
            let id = StationId(s.id.clone());
            if station_index.insert(id.clone(), StationIx(stations.len())).is_some() {
                return Err(Error::Duplicate { kind: "station", id: s.id.clone() });
            }
            if s.tracks.is_empty() {
                return Err(Error::InvalidValue(format!("station `{}` has no tracks", s.id)));
            }
            let tracks = unique_tracks("station", &s.id, &s.tracks)?;
            let window = |w: &Option<[TimeValue; 2]>| -> Result<Option<Window>> {
                match w {
                    None => Ok(None),
                    Some([a, b]) => {
                        let w = Window::new(a.resolve(epoch)?, b.resolve(epoch)?);
                        if w.start > w.end {
                            return Err(Error::InvalidValue(format!(
                                "station `{}`: window {w} is empty",
                                s.id
                            )));
                        }
                        Ok(Some(w))
                    }
                }
            };
            stations.push(Station {
                id,
                name: s.name.clone().unwrap_or_else(|| s.id.clone()),
                tracks,
                constraints: StationConstraints {
                    min_dwell: s.min_dwell.map(Duration::new).transpose()?,
                    arrival_window: window(&s.arrival_window)?,
                    departure_window: window(&s.departure_window)?,
                },
            });
        }

        let lookup_station = |id: &str| {
            station_index
                .get(&StationId(id.to_owned()))
                .copied()
                .ok_or_else(|| Error::DanglingReference { kind: "station", id: id.to_owned() })
        };

        let mut segments = Vec::with_capacity(doc.segments.len());
        let mut segment_index = HashMap::new();
        let mut resources: Vec<String> = Vec::new();
        let mut resource_ids: HashMap<String, usize> = HashMap::new();
        for seg in &doc.segments {
            let from = lookup_station(&seg.from)?;
            let to = lookup_station(&seg.to)?;
            if from == to {
                return Err(Error::InvalidValue(format!("segment `{}` is a loop", seg.id)));
            }
            if seg.tracks.is_empty() {
                return Err(Error::InvalidValue(format!("segment `{}` has no tracks", seg.id)));
            }
            if seg.blocks == 0 {
                return Err(Error::InvalidValue(format!("segment `{}` has zero blocks", seg.id)));
            }
            let id = SegmentId(seg.id.clone());
            if segment_index.insert(id.clone(), SegmentIx(segments.len())).is_some() {
                return Err(Error::Duplicate { kind: "segment", id: seg.id.clone() });
            }
            let resource_name = seg
                .resource
                .clone()
                .unwrap_or_else(|| default_resource(&seg.from, &seg.to));
            let next = resources.len();
            let resource = *resource_ids.entry(resource_name.clone()).or_insert(next);
            if resource == next {
                resources.push(resource_name);
            }
            segments.push(Segment {
                id,
                from,
                to,
                tracks: unique_tracks("segment", &seg.id, &seg.tracks)?,
                blocks: seg.blocks,
                resource,
            });
        }

        let mut network = Network {
            epoch,
            stations,
            segments,
            transitions: Vec::new(),
            conflicts: Vec::new(),
            resources,
            station_index,
            segment_index,
            transition_index: HashMap::new(),
            partners: Vec::new(),
            out_segments: Vec::new(),
            in_segments: Vec::new(),
            resource_segments: Vec::new(),
        };
        network.index_segments();

        for t in &doc.transitions {
            let tr = network.resolve_transition(t)?;
            if network.transition_index.contains_key(&tr) {
                return Err(Error::Duplicate {
                    kind: "transition",
                    id: network.describe_transition(&tr),
                });
            }
            network.transition_index.insert(tr, TransitionIx(network.transitions.len()));
            network.transitions.push(tr);
        }
        network.partners = vec![Vec::new(); network.transitions.len()];
        for c in &doc.conflicts {
            let a = network.lookup_transition_doc(&c.a)?;
            let b = network.lookup_transition_doc(&c.b)?;
            network.add_conflict(a, b);
        }
        Ok(network)
    }

    fn index_segments(&mut self) {
        let n = self.stations.len();
        self.out_segments = vec![Vec::new(); n];
        self.in_segments = vec![Vec::new(); n];
        self.resource_segments = vec![Vec::new(); self.resources.len()];
        for (i, seg) in self.segments.iter().enumerate() {
            self.out_segments[seg.from.0].push(SegmentIx(i));
            self.in_segments[seg.to.0].push(SegmentIx(i));
            self.resource_segments[seg.resource].push(SegmentIx(i));
        }
    }

    fn add_conflict(&mut self, a: TransitionIx, b: TransitionIx) {
        let pair = if a <= b { (a, b) } else { (b, a) };
        if self.conflicts.contains(&pair) {
            return;
        }
        self.conflicts.push(pair);
        if a != b {
            self.partners[a.0].push(b);
            self.partners[b.0].push(a);
        }
    }

    fn resolve_transition(&self, t: &TransitionDoc) -> Result<Transition> {
        let station = self.station_ix(&t.station)?;
        let segment = self.segment_ix(&t.segment)?;
        let station_track = self.station_track_ix(station, &t.station_track)?;
        let segment_track = self.segment_track_ix(segment, &t.segment_track)?;
        let seg = &self.segments[segment.0];
        let incident = match t.direction {
            Direction::Departing => seg.from == station,
            Direction::Arriving => seg.to == station,
        };
        if !incident {
            return Err(Error::InvalidValue(format!(
                "transition {:?} between `{}` and `{}`: segment does not {} there",
                t.direction,
                t.station,
                t.segment,
                match t.direction {
                    Direction::Departing => "start",
                    Direction::Arriving => "end",
                }
            )));
        }
        Ok(Transition {
            station,
            station_track,
            segment,
            segment_track,
            direction: t.direction,
        })
    }

    fn lookup_transition_doc(&self, t: &TransitionDoc) -> Result<TransitionIx> {
        let tr = self.resolve_transition(t)?;
        self.transition_ix(&tr).ok_or_else(|| Error::DanglingReference {
            kind: "transition",
            id: self.describe_transition(&tr),
        })
    }

    pub fn to_doc(&self) -> NetworkDoc {
        let window = |w: &Option<Window>| w.map(|w| [TimeValue::from(w.start), TimeValue::from(w.end)]);
        NetworkDoc {
            epoch: self.epoch.map(|e| e.to_string()),
            stations: self
                .stations
                .iter()
                .map(|s| StationDoc {
                    id: s.id.0.clone(),
                    name: (s.name != s.id.0).then(|| s.name.clone()),
                    tracks: s.tracks.iter().map(|t| t.0.clone()).collect(),
                    min_dwell: s.constraints.min_dwell.map(Duration::secs),
                    arrival_window: window(&s.constraints.arrival_window),
                    departure_window: window(&s.constraints.departure_window),
                })
                .collect(),
            segments: self
                .segments
                .iter()
                .map(|seg| SegmentDoc {
                    id: seg.id.0.clone(),
                    from: self.stations[seg.from.0].id.0.clone(),
                    to: self.stations[seg.to.0].id.0.clone(),
                    tracks: seg.tracks.iter().map(|t| t.0.clone()).collect(),
                    blocks: seg.blocks,
                    resource: Some(self.resources[seg.resource].clone()),
                })
                .collect(),
            transitions: self.transitions.iter().map(|t| self.transition_doc(t)).collect(),
            conflicts: self
                .conflicts
                .iter()
                .map(|&(a, b)| ConflictDoc {
                    a: self.transition_doc(&self.transitions[a.0]),
                    b: self.transition_doc(&self.transitions[b.0]),
                })
                .collect(),
        }
    }

    pub fn transition_doc(&self, t: &Transition) -> TransitionDoc {
        TransitionDoc {
            direction: t.direction,
            station: self.stations[t.station.0].id.0.clone(),
            station_track: self.stations[t.station.0].tracks[t.station_track].0.clone(),
            segment: self.segments[t.segment.0].id.0.clone(),
            segment_track: self.segments[t.segment.0].tracks[t.segment_track].0.clone(),
        }
    }

    pub fn stations(&self) -> &[Station] {
        &self.stations
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    pub fn conflicts(&self) -> &[(TransitionIx, TransitionIx)] {
        &self.conflicts
    }

    pub fn station(&self, s: StationIx) -> &Station {
        &self.stations[s.0]
    }

    pub fn segment(&self, l: SegmentIx) -> &Segment {
        &self.segments[l.0]
    }

    pub fn transition(&self, t: TransitionIx) -> &Transition {
        &self.transitions[t.0]
    }

    pub fn resource_name(&self, r: usize) -> &str {
        &self.resources[r]
    }

    pub fn station_ix(&self, id: &str) -> Result<StationIx> {
        self.station_index
            .get(&StationId(id.to_owned()))
            .copied()
            .ok_or_else(|| Error::DanglingReference { kind: "station", id: id.to_owned() })
    }

    pub fn segment_ix(&self, id: &str) -> Result<SegmentIx> {
        self.segment_index
            .get(&SegmentId(id.to_owned()))
            .copied()
            .ok_or_else(|| Error::DanglingReference { kind: "segment", id: id.to_owned() })
    }

    pub fn station_track_ix(&self, s: StationIx, track: &str) -> Result<usize> {
        let st = &self.stations[s.0];
        st.tracks.iter().position(|t| t.0 == track).ok_or_else(|| Error::DanglingReference {
            kind: "track",
            id: format!("{}:{}", st.id, track),
        })
    }

    pub fn segment_track_ix(&self, l: SegmentIx, track: &str) -> Result<usize> {
        let seg = &self.segments[l.0];
        seg.tracks.iter().position(|t| t.0 == track).ok_or_else(|| Error::DanglingReference {
            kind: "track",
            id: format!("{}:{}", seg.id, track),
        })
    }

    pub fn transition_ix(&self, t: &Transition) -> Option<TransitionIx> {
        self.transition_index.get(t).copied()
    }

    /// Transitions that conflict with `t`, excluding `t` itself.
    ///
    /// A transition always conflicts with itself; that pair is implicit.
    pub fn conflict_partners(&self, t: TransitionIx) -> &[TransitionIx] {
        &self.partners[t.0]
    }

    pub fn conflicting(&self, a: TransitionIx, b: TransitionIx) -> bool {
        a == b || self.partners[a.0].contains(&b)
    }

    pub fn out_segments(&self, s: StationIx) -> &[SegmentIx] {
        &self.out_segments[s.0]
    }

    pub fn in_segments(&self, s: StationIx) -> &[SegmentIx] {
        &self.in_segments[s.0]
    }

    /// Directed segments sharing the physical resource of `l` (including `l`).
    pub fn resource_segments(&self, l: SegmentIx) -> &[SegmentIx] {
        &self.resource_segments[self.segments[l.0].resource]
    }

    pub fn segment_between(&self, from: StationIx, to: StationIx) -> Option<SegmentIx> {
        self.out_segments[from.0].iter().copied().find(|&l| self.segments[l.0].to == to)
    }

    /// Stations not connected (ignoring direction) to the first station that
    /// any segment touches.
    pub fn unreachable_stations(&self) -> Vec<StationIx> {
        let Some(first) = self.segments.first() else {
            return Vec::new();
        };
        let mut seen = vec![false; self.stations.len()];
        let mut queue = VecDeque::from([first.from]);
        seen[first.from.0] = true;
        while let Some(s) = queue.pop_front() {
            let next = self.out_segments[s.0]
                .iter()
                .map(|l| self.segments[l.0].to)
                .chain(self.in_segments[s.0].iter().map(|l| self.segments[l.0].from));
            for n in next {
                if !seen[n.0] {
                    seen[n.0] = true;
                    queue.push_back(n);
                }
            }
        }
        let touched: BTreeSet<usize> =
            self.segments.iter().flat_map(|l| [l.from.0, l.to.0]).collect();
        touched.into_iter().filter(|&s| !seen[s]).map(StationIx).collect()
    }

    pub fn describe_transition(&self, t: &Transition) -> String {
        let st = &self.stations[t.station.0];
        let seg = &self.segments[t.segment.0];
        match t.direction {
            Direction::Departing => format!(
                "{}:{} -> {}:{}",
                st.id, st.tracks[t.station_track], seg.id, seg.tracks[t.segment_track]
            ),
            Direction::Arriving => format!(
                "{}:{} -> {}:{}",
                seg.id, seg.tracks[t.segment_track], st.id, st.tracks[t.station_track]
            ),
        }
    }
}

fn unique_tracks(kind: &'static str, owner: &str, tracks: &[String]) -> Result<Vec<TrackId>> {
    let mut out: Vec<TrackId> = Vec::with_capacity(tracks.len());
    for t in tracks {
        if out.iter().any(|o| o.0 == *t) {
            return Err(Error::Duplicate { kind, id: format!("{owner}:{t}") });
        }
        out.push(TrackId(t.clone()));
    }
    Ok(out)
}

fn default_resource(a: &str, b: &str) -> String {
    if a <= b {
        format!("{a}/{b}")
    } else {
        format!("{b}/{a}")
    }
}
