//! Time intervals in which each infrastructure element can host the
//! inserted train without violating a margin to any existing train.
//!
//! Every existing occupation forbids an open interval of instants around it
//! (or, on segments, a pair of them). Because every margin is at least one
//! second, those open intervals always contain an integer, and the closed
//! gaps between them are exactly the conflict-free instants.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, RwLock};

pub use crate::algebra::{Interval, WindowPair};
use crate::model::{Network, ParameterSet, SegmentIx, StationIx, Timetable, TransitionIx, Window};
use crate::time::TimePoint;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FreeIntervalList(Vec<Interval>);

impl FreeIntervalList {
    pub fn intervals(&self) -> &[Interval] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, t: TimePoint) -> bool {
        self.find(t).is_some()
    }

    /// The interval containing `t`.
    pub fn find(&self, t: TimePoint) -> Option<Interval> {
        let i = self.0.partition_point(|iv| iv.end < t);
        self.0.get(i).filter(|iv| iv.start <= t).copied()
    }
}

impl fmt::Display for FreeIntervalList {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(Interval::to_string).collect();
        write!(f, "{}", parts.join(" "))
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FreeIntervalPairList {
    pairs: Vec<WindowPair>,
    entries: Vec<Interval>,
}

impl FreeIntervalPairList {
    fn new(pairs: Vec<WindowPair>) -> Self {
        let entries = pairs.iter().map(|p| p.entry).collect();
        FreeIntervalPairList { pairs, entries }
    }

    pub fn pairs(&self) -> &[WindowPair] {
        &self.pairs
    }

    /// Entry intervals, in order.
    pub fn entries(&self) -> &[Interval] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Whether entering at `entry` and leaving at `exit` stays within one pair.
    pub fn admits(&self, entry: TimePoint, exit: TimePoint) -> bool {
        self.pairs.iter().any(|p| p.entry.contains(entry) && p.exit.contains(exit))
    }
}

impl fmt::Display for FreeIntervalPairList {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.pairs.iter().map(|p| format!("({} {})", p.entry, p.exit)).collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// Closed gaps between open forbidden intervals `(lo, hi)`, clipped to `w`.
fn gaps(mut forbidden: Vec<(i64, i64)>, w: Window) -> FreeIntervalList {
    forbidden.sort_unstable();
    let mut out = Vec::new();
    let mut reach = w.start.secs();
    for (lo, hi) in forbidden {
        let end = lo.min(w.end.secs());
        if reach <= end {
            out.push(Interval::secs(reach, end));
        }
        reach = reach.max(hi);
        if reach > w.end.secs() {
            break;
        }
    }
    if reach <= w.end.secs() {
        out.push(Interval::secs(reach, w.end.secs()));
    }
    FreeIntervalList(out)
}

pub fn station_free(
    timetable: &Timetable,
    params: &ParameterSet,
    s: StationIx,
    j: usize,
    window: Window,
) -> FreeIntervalList {
    let forbidden = timetable
        .station_use(s, j)
        .iter()
        .map(|o| {
            let m = params.gamma(o.train, s, j);
            (o.arrival.secs() - m.before.secs(), o.departure.secs() + m.after.secs())
        })
        .collect();
    gaps(forbidden, window)
}

pub fn transition_free(
    network: &Network,
    timetable: &Timetable,
    params: &ParameterSet,
    tr: TransitionIx,
    window: Window,
) -> FreeIntervalList {
    let ours = network.transition(tr).direction;
    let mut forbidden = Vec::new();
    for &other in std::iter::once(&tr).chain(network.conflict_partners(tr)) {
        for mv in timetable.movements(other) {
            let m = params.delta(mv.train, mv.direction, tr, ours);
            forbidden.push((mv.time.secs() - m.before.secs(), mv.time.secs() + m.after.secs()));
        }
    }
    gaps(forbidden, window)
}

/// One existing traversal seen from the inserted train on `(l, k)`:
/// the inserted train passes first iff it enters by `a` and exits by `b`, and
/// passes second iff it enters from `c` and exits from `d` (margins included).
#[derive(Clone, Copy, Debug)]
struct Passage {
    entry: i64,
    a: i64,
    b: i64,
    c: i64,
    d: i64,
}

fn passages(network: &Network, timetable: &Timetable, params: &ParameterSet, l: SegmentIx, k: usize) -> Vec<Passage> {
    let multi_block = network.segment(l).blocks > 1;
    timetable
        .physical_track_use(network, l, k)
        .into_iter()
        .map(|(o, same_direction)| {
            let m = params.beta(o.train, l);
            let (bf, af) = (m.before.secs(), m.after.secs());
            let (entry, exit) = (o.entry.secs(), o.exit.secs());
            if same_direction && multi_block {
                Passage { entry, a: entry - bf, b: exit - bf, c: entry + af, d: exit + af }
            } else {
                Passage { entry, a: entry - bf, b: entry - bf, c: exit + af, d: exit + af }
            }
        })
        .collect()
}

pub fn segment_free(
    network: &Network,
    timetable: &Timetable,
    params: &ParameterSet,
    l: SegmentIx,
    k: usize,
    window: Window,
) -> FreeIntervalPairList {
    let mut occ = passages(network, timetable, params, l, k);
    // With positive margins the inserted train can only pass ahead of a
    // prefix of the occupations in entry order, so each prefix yields one
    // candidate pair.
    occ.sort_unstable_by_key(|p| p.entry);
    let n = occ.len();
    let (mut min_a, mut min_b) = (vec![i64::MAX; n + 1], vec![i64::MAX; n + 1]);
    for i in (0..n).rev() {
        min_a[i] = min_a[i + 1].min(occ[i].a);
        min_b[i] = min_b[i + 1].min(occ[i].b);
    }
    let (ws, we) = (window.start.secs(), window.end.secs());
    let one_block = network.segment(l).blocks == 1;
    let mut pairs = Vec::new();
    let (mut max_c, mut max_d) = (i64::MIN, i64::MIN);
    for i in 0..=n {
        if i > 0 {
            max_c = max_c.max(occ[i - 1].c);
            max_d = max_d.max(occ[i - 1].d);
        }
        let mut entry = Interval::secs(max_c.max(ws), min_a[i].min(we));
        let mut exit = Interval::secs(max_d.max(ws), min_b[i].min(we));
        if one_block {
            entry = entry.intersect(&exit);
            exit = entry;
        }
        if entry.is_empty() || exit.is_empty() {
            continue;
        }
        pairs.push(WindowPair { entry, exit });
    }
    FreeIntervalPairList::new(pairs)
}

/// A location whose free intervals can be requested.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Element {
    StationTrack(StationIx, usize),
    Transition(TransitionIx),
    SegmentTrack(SegmentIx, usize),
}

#[derive(Clone, Debug)]
pub enum Free {
    Intervals(Arc<FreeIntervalList>),
    Pairs(Arc<FreeIntervalPairList>),
}

/// Lazily computed, memoized free intervals over one timetable and window.
///
/// Safe to share between threads; distinct keys may be filled concurrently.
pub struct FreeIntervals<'a> {
    network: &'a Network,
    timetable: &'a Timetable,
    params: &'a ParameterSet,
    window: Window,
    cache: RwLock<HashMap<Element, Free>>,
}

impl<'a> FreeIntervals<'a> {
    pub fn new(network: &'a Network, timetable: &'a Timetable, params: &'a ParameterSet, window: Window) -> Self {
        FreeIntervals { network, timetable, params, window, cache: RwLock::new(HashMap::new()) }
    }

    pub fn window(&self) -> Window {
        self.window
    }

    pub fn get(&self, e: Element) -> Free {
        if let Some(f) = self.cache.read().expect("cache poisoned").get(&e) {
            return f.clone();
        }
        let computed = match e {
            Element::StationTrack(s, j) => {
                Free::Intervals(Arc::new(station_free(self.timetable, self.params, s, j, self.window)))
            }
            Element::Transition(t) => Free::Intervals(Arc::new(transition_free(
                self.network,
                self.timetable,
                self.params,
                t,
                self.window,
            ))),
            Element::SegmentTrack(l, k) => Free::Pairs(Arc::new(segment_free(
                self.network,
                self.timetable,
                self.params,
                l,
                k,
                self.window,
            ))),
        };
        self.cache.write().expect("cache poisoned").entry(e).or_insert(computed).clone()
    }

    pub fn station(&self, s: StationIx, j: usize) -> Arc<FreeIntervalList> {
        match self.get(Element::StationTrack(s, j)) {
            Free::Intervals(f) => f,
            Free::Pairs(_) => unreachable!(),
        }
    }

    pub fn transition(&self, t: TransitionIx) -> Arc<FreeIntervalList> {
        match self.get(Element::Transition(t)) {
            Free::Intervals(f) => f,
            Free::Pairs(_) => unreachable!(),
        }
    }

    pub fn segment(&self, l: SegmentIx, k: usize) -> Arc<FreeIntervalPairList> {
        match self.get(Element::SegmentTrack(l, k)) {
            Free::Pairs(f) => f,
            Free::Intervals(_) => unreachable!(),
        }
    }

    /// Number of elements computed so far.
    pub fn computed(&self) -> usize {
        self.cache.read().expect("cache poisoned").len()
    }

    /// Every computed element with its intervals, in element order.
    pub fn snapshot(&self) -> Vec<(Element, Free)> {
        let mut all: Vec<_> =
            self.cache.read().expect("cache poisoned").iter().map(|(k, v)| (*k, v.clone())).collect();
        all.sort_by_key(|(k, _)| *k);
        all
    }
}
