//! Seeded corridor instances: alternating single- and double-track
//! stretches, periodic trains in both directions.
//!
//! Trains are placed one at a time; a candidate is kept only if it is
//! conflict-free against everything placed before it, so generated
//! timetables are feasible by construction.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{
    ConflictDoc, Direction, InsertionRequest, Margins, Network, NetworkDoc, ParamDefaults, ParameterSet,
    PatternPair, RunTimes, SegmentDoc, StationDoc, StationIx, StoppingPattern, Timetable, Train, TrainEvent, TrainId,
    TransitionDoc, Window,
};
use crate::paths::{verify_path, FrontierPoint, PathRun, PathStop, TrainPath};
use crate::time::{Duration, TimePoint};

pub const DAY: i64 = 86_400;

#[derive(Clone, Debug)]
pub struct GenConfig {
    pub seed: u64,
    pub stations: usize,
    /// Trains attempted per day; some may not fit.
    pub trains: usize,
    /// Daily service window; every train runs inside it.
    pub window: Window,
    /// Share of double-track stretches, in `[0, 1]`.
    pub double_share: f64,
    /// Align every time and margin to this step.
    pub grid: Option<i64>,
    /// The daily pattern is repeated this many times, one day apart.
    pub days: u32,
    /// Adds a two-segment bypass around every third station.
    pub bypass: bool,
    /// Per-train margin overrides below the defaults.
    pub varied_margins: bool,
    /// Minimum dwells and departure windows for the inserted train.
    pub constraints: bool,
    pub max_tracks: usize,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            seed: 1,
            stations: 6,
            trains: 4,
            window: Window::new(TimePoint(6 * 3600), TimePoint(10 * 3600)),
            double_share: 0.5,
            grid: None,
            days: 1,
            bypass: false,
            varied_margins: false,
            constraints: false,
            max_tracks: 3,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Instance {
    pub network: Network,
    pub timetable: Timetable,
    pub params: ParameterSet,
    /// Main-line stations from one end to the other.
    pub corridor: Vec<StationIx>,
}

impl Instance {
    /// End-to-end request over `window`.
    pub fn request(&self, window: Window) -> Result<InsertionRequest> {
        InsertionRequest::new(self.corridor[0], *self.corridor.last().unwrap(), window)
    }
}

fn station_id(i: usize) -> String {
    format!("S{i:02}")
}

struct Builder<'a> {
    cfg: &'a GenConfig,
    rng: ChaCha8Rng,
}

impl Builder<'_> {
    /// A duration near `secs`, snapped to the grid.
    fn snap(&self, secs: i64) -> i64 {
        match self.cfg.grid {
            Some(g) => ((secs + g / 2) / g).max(1) * g,
            None => secs.max(1),
        }
    }

    fn jitter(&mut self, lo: i64, hi: i64) -> i64 {
        let v = self.rng.gen_range(lo..=hi);
        self.snap(v)
    }
}

pub fn generate(cfg: &GenConfig) -> Result<Instance> {
    if cfg.stations < 2 {
        return Err(Error::InvalidValue("a corridor needs at least 2 stations".into()));
    }
    if !(0.0..=1.0).contains(&cfg.double_share) {
        return Err(Error::InvalidValue("double-track share must lie in [0, 1]".into()));
    }
    if !(1..=3).contains(&cfg.max_tracks) {
        return Err(Error::InvalidValue("station tracks must be between 1 and 3".into()));
    }
    if cfg.grid.is_some_and(|g| g <= 0) {
        return Err(Error::InvalidValue("grid step must be positive".into()));
    }
    if cfg.days == 0 {
        return Err(Error::InvalidValue("at least one day".into()));
    }
    let span = cfg.window.end - cfg.window.start;
    if span <= 0 || span > DAY - 600 {
        return Err(Error::InvalidValue("daily window must be non-empty and shorter than a day".into()));
    }
    let mut b = Builder { cfg, rng: ChaCha8Rng::seed_from_u64(cfg.seed) };
    let (doc, run_times) = build_network(&mut b);
    let network = Network::from_doc(&doc)?;
    let mut params = ParameterSet::new(ParamDefaults::default());
    for (seg, rt) in &run_times {
        params.set_run_times(network.segment_ix(seg)?, *rt)?;
    }
    let corridor: Vec<StationIx> =
        (0..cfg.stations).map(|i| network.station_ix(&station_id(i))).collect::<Result<_>>()?;

    let daily = place_trains(&mut b, &network, &params, &corridor)?;
    let mut trains = Vec::with_capacity(daily.len() * cfg.days as usize);
    for day in 0..cfg.days {
        let shift = i64::from(day) * DAY;
        for (i, t) in daily.iter().enumerate() {
            let mut t = t.clone();
            t.id = TrainId(if cfg.days > 1 { format!("D{day}-T{i:03}") } else { format!("T{i:03}") });
            for e in &mut t.events {
                e.arrival += shift;
                e.departure += shift;
            }
            trains.push(t);
        }
    }
    let timetable = Timetable::from_trains(trains, &network, None)?;

    if cfg.varied_margins {
        vary_margins(&mut b, &network, &timetable, &mut params);
    }
    Ok(Instance { network, timetable, params, corridor })
}

fn build_network(b: &mut Builder) -> (NetworkDoc, Vec<(String, RunTimes)>) {
    let cfg = b.cfg;
    let n = cfg.stations;
    let mut doc = NetworkDoc::default();
    let mut run_times = Vec::new();
    let track_names = ["1", "2", "3"];
    let station = |b: &mut Builder, id: String, doc: &mut NetworkDoc| {
        let tracks = b.rng.gen_range(1..=cfg.max_tracks);
        let mut s = StationDoc {
            id,
            name: None,
            tracks: track_names[..tracks].iter().map(|t| t.to_string()).collect(),
            min_dwell: None,
            arrival_window: None,
            departure_window: None,
        };
        if cfg.constraints && b.rng.gen_bool(0.2) {
            s.min_dwell = Some(b.jitter(30, 120));
        }
        doc.stations.push(s);
    };
    for i in 0..n {
        station(b, station_id(i), &mut doc);
    }

    // Stretches alternate; their lengths are random.
    let mut double = b.rng.gen_bool(cfg.double_share);
    let mut left = 0;
    let mut link = |b: &mut Builder, doc: &mut NetworkDoc, x: &str, y: &str, double_track: bool| {
        let base = b.jitter(120, 480);
        let step = b.snap(30);
        let rt = RunTimes::all(base, base + step, base + step, base + 2 * step);
        let blocks = if double_track { b.rng.gen_range(2..=4) } else { 1 };
        for (from, to, track) in [(x, y, "1"), (y, x, if double_track { "2" } else { "1" })] {
            let id = format!("{from}-{to}");
            doc.segments.push(SegmentDoc {
                id: id.clone(),
                from: from.into(),
                to: to.into(),
                tracks: vec![track.into()],
                blocks,
                resource: None,
            });
            run_times.push((id, rt));
        }
    };
    for i in 0..n - 1 {
        if left == 0 {
            let target = if double { cfg.double_share } else { 1.0 - cfg.double_share };
            left = 1 + (target * 3.0 * b.rng.gen::<f64>()).round() as usize;
            if cfg.double_share == 0.0 || cfg.double_share == 1.0 {
                double = cfg.double_share == 1.0;
                left = n;
            }
        }
        link(b, &mut doc, &station_id(i), &station_id(i + 1), double);
        left -= 1;
        if left == 0 {
            double = !double;
        }
    }
    if cfg.bypass {
        for i in (0..n.saturating_sub(2)).step_by(3) {
            let id = format!("B{i:02}");
            station(b, id.clone(), &mut doc);
            let double_track = b.rng.gen_bool(cfg.double_share);
            link(b, &mut doc, &station_id(i), &id, double_track);
            link(b, &mut doc, &id, &station_id(i + 2), double_track);
        }
    }

    // Every station track reaches every segment track. At one station,
    // two transitions conflict when they share the station track, or the
    // segment track of one physical resource.
    let resource = |seg: &SegmentDoc| {
        if seg.from <= seg.to {
            (seg.from.clone(), seg.to.clone())
        } else {
            (seg.to.clone(), seg.from.clone())
        }
    };
    for st in &doc.stations {
        let mut here: Vec<((String, String), TransitionDoc)> = Vec::new();
        for seg in &doc.segments {
            let direction = if seg.from == st.id {
                Direction::Departing
            } else if seg.to == st.id {
                Direction::Arriving
            } else {
                continue;
            };
            for t in &st.tracks {
                for k in &seg.tracks {
                    let tr = TransitionDoc {
                        direction,
                        station: st.id.clone(),
                        station_track: t.clone(),
                        segment: seg.id.clone(),
                        segment_track: k.clone(),
                    };
                    doc.transitions.push(tr.clone());
                    here.push((resource(seg), tr));
                }
            }
        }
        for (i, (ra, a)) in here.iter().enumerate() {
            for (rb, c) in &here[i + 1..] {
                if a.station_track == c.station_track || (ra == rb && a.segment_track == c.segment_track) {
                    doc.conflicts.push(ConflictDoc { a: a.clone(), b: c.clone() });
                }
            }
        }
    }
    (doc, run_times)
}

/// Places the daily trains by rejection sampling.
fn place_trains(b: &mut Builder, network: &Network, params: &ParameterSet, corridor: &[StationIx]) -> Result<Vec<Train>> {
    let cfg = b.cfg;
    let n = corridor.len();
    let mut placed: Vec<Train> = Vec::new();
    let mut timetable = Timetable::from_trains(Vec::new(), network, None)?;
    let span = cfg.window.end - cfg.window.start;
    let period = span / (cfg.trains.max(1) as i64);
    for i in 0..cfg.trains {
        let forward = i % 2 == 0;
        let mut accepted = None;
        for attempt in 0..60 {
            let len = b.rng.gen_range(2.min(n)..=n);
            let first = b.rng.gen_range(0..=n - len);
            let mut stations: Vec<StationIx> = corridor[first..first + len].to_vec();
            if !forward {
                stations.reverse();
            }
            let nominal = cfg.window.start.secs() + period * i as i64;
            let spread = period.max(600) * (1 + attempt / 10);
            let start = b.jitter(nominal - spread / 2, nominal + spread / 2);
            let Some(path) = draft_path(b, network, params, &stations, start) else { continue };
            let last = path.stops.last().unwrap().departure;
            if path.stops[0].arrival < cfg.window.start || last > cfg.window.end {
                continue;
            }
            if verify_path(&path, network, &timetable, params).is_empty() {
                accepted = Some(path);
                break;
            }
        }
        let Some(path) = accepted else {
            log::debug!("train {i} did not fit");
            continue;
        };
        placed.push(to_train(format!("T{:03}", placed.len()), &path));
        timetable = Timetable::from_trains(placed.clone(), network, None)?;
    }
    Ok(placed)
}

fn draft_path(b: &mut Builder, network: &Network, params: &ParameterSet, stations: &[StationIx], start: i64) -> Option<TrainPath> {
    let last = stations.len() - 1;
    let patterns: Vec<StoppingPattern> = (0..=last)
        .map(|i| {
            if i == 0 || i == last || b.rng.gen_bool(0.35) {
                StoppingPattern::Stop
            } else {
                StoppingPattern::Run
            }
        })
        .collect();
    let mut stops = Vec::with_capacity(stations.len());
    let mut runs = Vec::with_capacity(last);
    let mut t = TimePoint(start);
    for (i, &s) in stations.iter().enumerate() {
        let pattern = patterns[i];
        let track = b.rng.gen_range(0..network.station(s).tracks.len());
        let arrival = t;
        let departure = if pattern == StoppingPattern::Stop && i != 0 && i != last {
            arrival + b.jitter(60, 240)
        } else {
            arrival
        };
        stops.push(PathStop { station: s, track, pattern, arrival, departure });
        if i < last {
            let segment = network.segment_between(s, stations[i + 1])?;
            let track = b.rng.gen_range(0..network.segment(segment).tracks.len());
            let d = params.run_time(network, segment, PatternPair(pattern, patterns[i + 1])).ok()?.secs();
            let extra = if b.rng.gen_bool(0.2) { b.snap(60) } else { 0 };
            t = departure + d + extra;
            runs.push(PathRun { segment, track, entry: departure, exit: t });
        }
    }
    let summary = FrontierPoint { departure: stops[0].departure, arrival: stops[last].arrival, slack: Duration::ZERO };
    Some(TrainPath { stops, runs, summary })
}

fn to_train(id: String, path: &TrainPath) -> Train {
    let events = path
        .stops
        .iter()
        .enumerate()
        .map(|(i, s)| TrainEvent {
            station: s.station,
            arrival: s.arrival,
            departure: s.departure,
            track: s.track,
            segment_track: path.runs.get(i).map(|r| r.track),
            entry_transition: None,
            exit_transition: None,
        })
        .collect();
    Train { id: TrainId(id), events }
}

/// Lowers some margins per train; lower margins never create a conflict.
fn vary_margins(b: &mut Builder, network: &Network, timetable: &Timetable, params: &mut ParameterSet) {
    let d = params.defaults;
    let pick = |b: &mut Builder, hi: Duration| -> Margins {
        let mut m = || {
            let v = b.rng.gen_range(1..=hi.secs());
            let v = b.snap(v).min(hi.secs());
            Duration::from_secs(v)
        };
        Margins { before: m(), after: m() }
    };
    for (ti, train) in timetable.trains().iter().enumerate() {
        if !b.rng.gen_bool(0.3) {
            continue;
        }
        for w in train.events.windows(2) {
            if let Some(l) = network.segment_between(w[0].station, w[1].station) {
                if b.rng.gen_bool(0.5) {
                    let m = pick(b, d.beta);
                    params.set_beta(ti, l, m);
                }
            }
        }
        for e in &train.events {
            if b.rng.gen_bool(0.5) {
                let m = pick(b, d.gamma);
                params.set_gamma(ti, e.station, e.track, m);
            }
            if let Some(tr) = e.exit_transition {
                if b.rng.gen_bool(0.3) {
                    let m = pick(b, d.delta_arrive_depart);
                    params.set_delta(ti, tr, m);
                }
            }
        }
    }
}

/// Random constraints on the inserted train: a departure window at one
/// intermediate station.
pub fn add_departure_window(instance: &mut Instance, seed: u64, window: Window) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let inner = &instance.corridor[1..instance.corridor.len() - 1];
    let Some(&s) = inner.choose(&mut rng) else { return Ok(()) };
    let span = window.end - window.start;
    let a = window.start + rng.gen_range(0..=span / 2);
    let w = Window::new(a, a + span / 2);
    let mut doc = instance.network.to_doc();
    let id = instance.network.station(s).id.0.clone();
    let st = doc.stations.iter_mut().find(|d| d.id == id).unwrap();
    st.departure_window = Some([w.start.into(), w.end.into()]);
    instance.network = Network::from_doc(&doc)?;
    Ok(())
}
