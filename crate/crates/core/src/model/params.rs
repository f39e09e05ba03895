use std::collections::HashMap;

use super::doc::{BetaDoc, DefaultsDoc, DeltaDoc, GammaDoc, ParamsDoc, RunTimeDoc};
use super::{Direction, Network, PatternPair, SegmentIx, StationIx, StoppingPattern, Timetable, TransitionIx};
use crate::error::{Error, Result};
use crate::time::Duration;

/// Separation between the inserted train and one existing train.
///
/// `before` applies when the inserted train goes first, `after` when it
/// follows the existing train.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Margins {
    pub before: Duration,
    pub after: Duration,
}

impl Margins {
    pub fn symmetric(d: Duration) -> Self {
        Margins { before: d, after: d }
    }
}

/// Minimum running times of one segment, by stopping pattern at either end.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RunTimes {
    pub rr: Option<Duration>,
    pub rs: Option<Duration>,
    pub sr: Option<Duration>,
    pub ss: Option<Duration>,
}

impl RunTimes {
    pub fn all(rr: i64, sr: i64, rs: i64, ss: i64) -> Self {
        RunTimes {
            rr: Some(Duration::from_secs(rr)),
            rs: Some(Duration::from_secs(rs)),
            sr: Some(Duration::from_secs(sr)),
            ss: Some(Duration::from_secs(ss)),
        }
    }

    pub fn uniform(d: i64) -> Self {
        Self::all(d, d, d, d)
    }

    pub fn get(&self, p: PatternPair) -> Option<Duration> {
        use StoppingPattern::{Run, Stop};
        match (p.0, p.1) {
            (Run, Run) => self.rr,
            (Run, Stop) => self.rs,
            (Stop, Run) => self.sr,
            (Stop, Stop) => self.ss,
        }
    }

    /// Shortest defined running time; used as the routing weight.
    pub fn fastest(&self) -> Option<Duration> {
        self.rr.or_else(|| [self.rs, self.sr, self.ss].into_iter().flatten().min())
    }

    fn check(&self, segment: &str) -> Result<()> {
        let bad = |what: &str| {
            Err(Error::InvalidValue(format!(
                "segment `{segment}`: running time {what}; stopping never shortens a run"
            )))
        };
        let le = |a: Option<Duration>, b: Option<Duration>| match (a, b) {
            (Some(a), Some(b)) => a <= b,
            _ => true,
        };
        if !le(self.rr, self.rs) || !le(self.rr, self.sr) || !le(self.rr, self.ss) {
            return bad("below RR in a stopping pattern");
        }
        if !le(self.rs, self.ss) || !le(self.sr, self.ss) {
            return bad("SS below RS or SR");
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ParamDefaults {
    pub beta: Duration,
    pub gamma: Duration,
    pub delta: Duration,
    /// Transition separation when the first train arrives and the second departs.
    pub delta_arrive_depart: Duration,
}

impl Default for ParamDefaults {
    fn default() -> Self {
        ParamDefaults {
            beta: Duration::from_secs(180),
            gamma: Duration::from_secs(180),
            delta: Duration::from_secs(180),
            delta_arrive_depart: Duration::from_secs(60),
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct ParameterSet {
    pub defaults: ParamDefaults,
    beta: HashMap<(usize, SegmentIx), Margins>,
    gamma: HashMap<(usize, StationIx, usize), Margins>,
    delta: HashMap<(usize, TransitionIx), Margins>,
    run_times: HashMap<SegmentIx, RunTimes>,
}

impl ParameterSet {
    pub fn new(defaults: ParamDefaults) -> Self {
        ParameterSet { defaults, ..Default::default() }
    }

    pub fn from_doc(doc: &ParamsDoc, network: &Network, timetable: &Timetable) -> Result<Self> {
        let mut defaults = ParamDefaults::default();
        let d = &doc.defaults;
        for (slot, v, name) in [
            (&mut defaults.beta, d.beta, "beta"),
            (&mut defaults.gamma, d.gamma, "gamma"),
            (&mut defaults.delta, d.delta, "delta"),
            (&mut defaults.delta_arrive_depart, d.delta_arrive_depart, "delta_arrive_depart"),
        ] {
            if let Some(v) = v {
                *slot = positive(v, name)?;
            }
        }
        let mut params = ParameterSet::new(defaults);
        for rt in &doc.run_times {
            let seg = network.segment_ix(&rt.segment)?;
            let dur = |v: Option<i64>| v.map(Duration::new).transpose();
            let times = RunTimes { rr: dur(rt.rr)?, rs: dur(rt.rs)?, sr: dur(rt.sr)?, ss: dur(rt.ss)? };
            times.check(&rt.segment)?;
            params.run_times.insert(seg, times);
        }
        for b in &doc.beta {
            let train = timetable.train_ix(&b.train)?;
            let seg = network.segment_ix(&b.segment)?;
            params.beta.insert((train, seg), margins(b.before, b.after, "beta")?);
        }
        for g in &doc.gamma {
            let train = timetable.train_ix(&g.train)?;
            let s = network.station_ix(&g.station)?;
            let j = network.station_track_ix(s, &g.track)?;
            params.gamma.insert((train, s, j), margins(g.before, g.after, "gamma")?);
        }
        for dl in &doc.delta {
            let train = timetable.train_ix(&dl.train)?;
            let tr = network.transitions().iter().position(|t| network.transition_doc(t) == dl.transition);
            let tr = tr.ok_or_else(|| Error::DanglingReference {
                kind: "transition",
                id: format!("{:?}", dl.transition),
            })?;
            params.delta.insert((train, TransitionIx(tr)), margins(dl.before, dl.after, "delta")?);
        }
        Ok(params)
    }

    pub fn to_doc(&self, network: &Network, timetable: &Timetable) -> ParamsDoc {
        let d = self.defaults;
        let mut run_times: Vec<_> = self.run_times.iter().collect();
        run_times.sort_by_key(|(s, _)| **s);
        let mut beta: Vec<_> = self.beta.iter().collect();
        beta.sort_by_key(|(k, _)| **k);
        let mut gamma: Vec<_> = self.gamma.iter().collect();
        gamma.sort_by_key(|(k, _)| **k);
        let mut delta: Vec<_> = self.delta.iter().collect();
        delta.sort_by_key(|(k, _)| **k);
        let train = |i: usize| timetable.train(i).id.0.clone();
        ParamsDoc {
            defaults: DefaultsDoc {
                beta: Some(d.beta.secs()),
                gamma: Some(d.gamma.secs()),
                delta: Some(d.delta.secs()),
                delta_arrive_depart: Some(d.delta_arrive_depart.secs()),
            },
            run_times: run_times
                .into_iter()
                .map(|(s, r)| RunTimeDoc {
                    segment: network.segment(*s).id.0.clone(),
                    rr: r.rr.map(Duration::secs),
                    rs: r.rs.map(Duration::secs),
                    sr: r.sr.map(Duration::secs),
                    ss: r.ss.map(Duration::secs),
                })
                .collect(),
            beta: beta
                .into_iter()
                .map(|(&(t, s), m)| BetaDoc {
                    train: train(t),
                    segment: network.segment(s).id.0.clone(),
                    before: m.before.secs(),
                    after: m.after.secs(),
                })
                .collect(),
            gamma: gamma
                .into_iter()
                .map(|(&(t, s, j), m)| GammaDoc {
                    train: train(t),
                    station: network.station(s).id.0.clone(),
                    track: network.station(s).tracks[j].0.clone(),
                    before: m.before.secs(),
                    after: m.after.secs(),
                })
                .collect(),
            delta: delta
                .into_iter()
                .map(|(&(t, tr), m)| DeltaDoc {
                    train: train(t),
                    transition: network.transition_doc(network.transition(tr)),
                    before: m.before.secs(),
                    after: m.after.secs(),
                })
                .collect(),
        }
    }

    pub fn set_run_times(&mut self, seg: SegmentIx, times: RunTimes) -> Result<()> {
        times.check(&format!("#{}", seg.0))?;
        self.run_times.insert(seg, times);
        Ok(())
    }

    pub fn set_beta(&mut self, train: usize, seg: SegmentIx, m: Margins) {
        self.beta.insert((train, seg), m);
    }

    pub fn set_gamma(&mut self, train: usize, s: StationIx, track: usize, m: Margins) {
        self.gamma.insert((train, s, track), m);
    }

    pub fn set_delta(&mut self, train: usize, tr: TransitionIx, m: Margins) {
        self.delta.insert((train, tr), m);
    }

    /// Headway margins between existing `train` and the inserted train on
    /// segment `seg` (the inserted train's segment).
    pub fn beta(&self, train: usize, seg: SegmentIx) -> Margins {
        self.beta.get(&(train, seg)).copied().unwrap_or(Margins::symmetric(self.defaults.beta))
    }

    pub fn gamma(&self, train: usize, s: StationIx, track: usize) -> Margins {
        self.gamma.get(&(train, s, track)).copied().unwrap_or(Margins::symmetric(self.defaults.gamma))
    }

    /// Transition margins between an existing train's movement (direction
    /// `theirs`) and the inserted train executing `ours` in direction `our_dir`.
    pub fn delta(&self, train: usize, theirs: Direction, ours: TransitionIx, our_dir: Direction) -> Margins {
        if let Some(m) = self.delta.get(&(train, ours)) {
            return *m;
        }
        let d = &self.defaults;
        let pick = |first: Direction, second: Direction| {
            if first == Direction::Arriving && second == Direction::Departing {
                d.delta_arrive_depart
            } else {
                d.delta
            }
        };
        Margins { before: pick(our_dir, theirs), after: pick(theirs, our_dir) }
    }

    pub fn run_times(&self, seg: SegmentIx) -> Option<&RunTimes> {
        self.run_times.get(&seg)
    }

    pub fn run_time(&self, network: &Network, seg: SegmentIx, p: PatternPair) -> Result<Duration> {
        self.run_times
            .get(&seg)
            .and_then(|r| r.get(p))
            .ok_or_else(|| Error::MissingRunTime {
                segment: network.segment(seg).id.0.clone(),
                pattern: p.to_string(),
            })
    }
}

fn positive(v: i64, name: &str) -> Result<Duration> {
    let d = Duration::new(v)?;
    if v == 0 {
        return Err(Error::InvalidValue(format!("{name} must be at least 1 s")));
    }
    Ok(d)
}

fn margins(before: i64, after: i64, name: &str) -> Result<Margins> {
    Ok(Margins { before: positive(before, name)?, after: positive(after, name)? })
}
