//! Interval lists carrying the latest feasible origin departure.
//!
//! A [`MappedIntervalList`] is a sorted list of disjoint closed intervals of
//! presence times. Each item maps its instants to an origin departure that is
//! either constant ([`Slope::Flat`]) or advances one second per second
//! ([`Slope::Unit`]). Lists are kept in a canonical form: points are grouped
//! greedily from the left into the longest affine piece, and single-instant
//! items are flat. Two lists with the same pointwise function are therefore
//! equal.

use std::fmt;

use crate::time::TimePoint;

/// A closed interval `[start, end]` of instants.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Interval {
    pub start: TimePoint,
    pub end: TimePoint,
}

impl Interval {
    pub fn new(start: TimePoint, end: TimePoint) -> Self {
        Interval { start, end }
    }

    pub fn secs(start: i64, end: i64) -> Self {
        Interval { start: TimePoint(start), end: TimePoint(end) }
    }

    pub fn is_empty(&self) -> bool {
        self.start > self.end
    }

    pub fn contains(&self, t: TimePoint) -> bool {
        self.start <= t && t <= self.end
    }

    pub fn intersect(&self, other: &Interval) -> Interval {
        Interval { start: self.start.max(other.start), end: self.end.min(other.end) }
    }

    pub fn len(&self) -> i64 {
        self.end - self.start
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.start.secs(), self.end.secs())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Slope {
    Flat,
    Unit,
}

impl Slope {
    #[inline]
    fn gradient(self) -> i64 {
        match self {
            Slope::Flat => 0,
            Slope::Unit => 1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct MappedInterval {
    pub lo: TimePoint,
    pub hi: TimePoint,
    /// Origin departure mapped to `lo`.
    pub dep_lo: TimePoint,
    pub slope: Slope,
}

impl MappedInterval {
    pub fn new(lo: TimePoint, hi: TimePoint, dep_lo: TimePoint, slope: Slope) -> Self {
        debug_assert!(lo <= hi, "empty mapped interval");
        let slope = if lo == hi { Slope::Flat } else { slope };
        MappedInterval { lo, hi, dep_lo, slope }
    }

    pub fn flat(lo: i64, hi: i64, dep: i64) -> Self {
        Self::new(TimePoint(lo), TimePoint(hi), TimePoint(dep), Slope::Flat)
    }

    pub fn unit(lo: i64, hi: i64, dep_lo: i64) -> Self {
        Self::new(TimePoint(lo), TimePoint(hi), TimePoint(dep_lo), Slope::Unit)
    }

    #[inline]
    pub fn dep_at(&self, t: TimePoint) -> TimePoint {
        self.dep_lo + self.slope.gradient() * (t - self.lo)
    }

    #[inline]
    pub fn dep_hi(&self) -> TimePoint {
        self.dep_at(self.hi)
    }

    pub fn span(&self) -> Interval {
        Interval::new(self.lo, self.hi)
    }

    /// The same mapping on `[lo, hi]`, which must lie inside the item.
    pub fn restrict(&self, lo: TimePoint, hi: TimePoint) -> Self {
        debug_assert!(self.lo <= lo && hi <= self.hi && lo <= hi);
        Self::new(lo, hi, self.dep_at(lo), self.slope)
    }

    /// Presence times moved later by `d`; departures unchanged.
    pub fn translate(&self, d: i64) -> Self {
        MappedInterval { lo: self.lo + d, hi: self.hi + d, ..*self }
    }

    fn single(&self) -> bool {
        self.lo == self.hi
    }
}

impl fmt::Display for MappedInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let slope = match self.slope {
            Slope::Flat => "flat",
            Slope::Unit => "unit",
        };
        write!(
            f,
            "[{}, {}] dep {}..{} {slope}",
            self.lo.secs(),
            self.hi.secs(),
            self.dep_lo.secs(),
            self.dep_hi().secs()
        )
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct MappedIntervalList {
    items: Vec<MappedInterval>,
}

impl MappedIntervalList {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn items(&self) -> &[MappedInterval] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    /// Origin departure at `t`, if `t` is covered.
    pub fn dep_at(&self, t: TimePoint) -> Option<TimePoint> {
        let i = self.items.partition_point(|it| it.hi < t);
        self.items.get(i).filter(|it| it.lo <= t).map(|it| it.dep_at(t))
    }

    /// Builds a list where presence equals departure over every interval, as
    /// at the origin.
    pub fn identity(intervals: &[Interval]) -> Self {
        let mut b = Builder::default();
        for iv in intervals.iter().filter(|iv| !iv.is_empty()) {
            b.push(MappedInterval::new(iv.start, iv.end, iv.start, Slope::Unit));
        }
        b.finish()
    }

    /// Appends an item that starts after the current last item.
    pub fn push(&mut self, item: MappedInterval) {
        let mut b = Builder { items: std::mem::take(&mut self.items) };
        b.push(item);
        self.items = b.items;
    }

    /// Checks the canonical-form invariants; used by tests and debug asserts.
    pub fn is_canonical(&self) -> bool {
        let mut b = Builder::default();
        for it in &self.items {
            if it.lo > it.hi || it.dep_lo > it.lo || (it.single() && it.slope != Slope::Flat) {
                return false;
            }
            if b.items.last().is_some_and(|l| l.hi >= it.lo) {
                return false;
            }
            b.push(*it);
        }
        b.items == self.items
    }
}

impl fmt::Display for MappedIntervalList {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, it) in self.items.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{it}")?;
        }
        Ok(())
    }
}

impl FromIterator<MappedInterval> for MappedIntervalList {
    /// Normalizes arbitrary (possibly overlapping) items.
    fn from_iter<I: IntoIterator<Item = MappedInterval>>(iter: I) -> Self {
        normalize(iter.into_iter().collect())
    }
}

/// Accumulates items in increasing order, merging into canonical form.
#[derive(Default)]
struct Builder {
    items: Vec<MappedInterval>,
}

impl Builder {
    fn push(&mut self, item: MappedInterval) {
        let mut item = MappedInterval::new(item.lo, item.hi, item.dep_lo, item.slope);
        if let Some(last) = self.items.last_mut() {
            debug_assert!(last.hi < item.lo, "builder input out of order");
            if last.hi + 1 == item.lo {
                let step = item.dep_lo - last.dep_hi();
                let absorb = if last.single() {
                    match step {
                        0 => Some(Slope::Flat),
                        1 => Some(Slope::Unit),
                        _ => None,
                    }
                } else {
                    (step == last.slope.gradient()).then_some(last.slope)
                };
                if let Some(s) = absorb {
                    last.slope = s;
                    if item.single() || item.slope == s {
                        last.hi = item.hi;
                        return;
                    }
                    last.hi = item.lo;
                    item = item.restrict(item.lo + 1, item.hi);
                }
            }
        }
        self.items.push(item);
    }

    fn finish(self) -> MappedIntervalList {
        MappedIntervalList { items: self.items }
    }
}

/// Pointwise maximum of the departure functions over the union of domains.
///
/// Where the two mappings cross the output splits at the crossing instant;
/// equal values keep `a`'s piece.
pub fn union(a: &MappedIntervalList, b: &MappedIntervalList) -> MappedIntervalList {
    if b.is_empty() {
        return a.clone();
    }
    if a.is_empty() {
        return b.clone();
    }
    let (xs, ys) = (&a.items, &b.items);
    let mut out = Builder { items: Vec::with_capacity(xs.len() + ys.len()) };
    let (mut i, mut j) = (0, 0);
    // `cursor` is the first instant not yet emitted.
    let mut cursor = xs[0].lo.min(ys[0].lo);
    loop {
        while i < xs.len() && xs[i].hi < cursor {
            i += 1;
        }
        while j < ys.len() && ys[j].hi < cursor {
            j += 1;
        }
        let x = xs.get(i);
        let y = ys.get(j);
        let (x, y) = match (x, y) {
            (None, None) => break,
            (Some(x), None) => {
                out.push(x.restrict(cursor.max(x.lo), x.hi));
                cursor = x.hi + 1;
                continue;
            }
            (None, Some(y)) => {
                out.push(y.restrict(cursor.max(y.lo), y.hi));
                cursor = y.hi + 1;
                continue;
            }
            (Some(x), Some(y)) => (x, y),
        };
        let lo = cursor.max(x.lo.min(y.lo));
        let x_on = x.lo <= lo;
        let y_on = y.lo <= lo;
        match (x_on, y_on) {
            (true, false) => {
                let hi = x.hi.min(y.lo - 1);
                out.push(x.restrict(lo, hi));
                cursor = hi + 1;
            }
            (false, true) => {
                let hi = y.hi.min(x.lo - 1);
                out.push(y.restrict(lo, hi));
                cursor = hi + 1;
            }
            (true, true) => {
                let hi = x.hi.min(y.hi);
                merge_overlap(&mut out, x, y, lo, hi);
                cursor = hi + 1;
            }
            (false, false) => unreachable!("cursor advanced past both items"),
        }
    }
    out.finish()
}

/// Emits the pointwise max of two items on `[lo, hi]`, covered by both.
fn merge_overlap(out: &mut Builder, x: &MappedInterval, y: &MappedInterval, lo: TimePoint, hi: TimePoint) {
    let fx = x.dep_at(lo);
    let fy = y.dep_at(lo);
    match (x.slope, y.slope) {
        (sx, sy) if sx == sy => {
            let w = if fx >= fy { x } else { y };
            out.push(w.restrict(lo, hi));
        }
        (Slope::Unit, _) => {
            // x - y grows by one per second; x wins from `t*` on.
            let t_star = lo + (fy - fx).max(0);
            if t_star > lo {
                out.push(y.restrict(lo, (t_star - 1).min(hi)));
            }
            if t_star <= hi {
                out.push(x.restrict(t_star, hi));
            }
        }
        (Slope::Flat, _) => {
            // x - y shrinks by one per second; x wins up to `t*`.
            if fx < fy {
                out.push(y.restrict(lo, hi));
                return;
            }
            let t_star = lo + (fx - fy);
            out.push(x.restrict(lo, t_star.min(hi)));
            if t_star < hi {
                out.push(y.restrict(t_star + 1, hi));
            }
        }
    }
}

/// Canonical form of arbitrary items by balanced pairwise union.
pub fn normalize(mut raw: Vec<MappedInterval>) -> MappedIntervalList {
    raw.sort_by_key(|it| it.lo);
    let mut level: Vec<MappedIntervalList> = raw
        .into_iter()
        .map(|it| {
            let mut b = Builder::default();
            b.push(it);
            b.finish()
        })
        .collect();
    if level.is_empty() {
        return MappedIntervalList::new();
    }
    while level.len() > 1 {
        let mut next = Vec::with_capacity(level.len().div_ceil(2));
        let mut it = level.into_iter();
        while let Some(a) = it.next() {
            match it.next() {
                Some(b) => next.push(union(&a, &b)),
                None => next.push(a),
            }
        }
        level = next;
    }
    level.pop().unwrap()
}

/// Restricts `a` to instants inside `f` (sorted, disjoint intervals).
pub fn intersect(a: &MappedIntervalList, f: &[Interval]) -> MappedIntervalList {
    let mut out = Builder::default();
    let mut j = 0;
    for it in &a.items {
        while j < f.len() && f[j].end < it.lo {
            j += 1;
        }
        let mut k = j;
        while k < f.len() && f[k].start <= it.hi {
            let lo = it.lo.max(f[k].start);
            let hi = it.hi.min(f[k].end);
            if lo <= hi {
                out.push(it.restrict(lo, hi));
            }
            k += 1;
        }
    }
    out.finish()
}

/// Running maximum of the departure function from the first covered instant
/// up to `end`, filling gaps with the value reached so far.
///
/// Used on items confined to one free interval, where waiting is allowed.
fn carry_forward(items: &[MappedInterval], end: TimePoint, out: &mut Builder, shift: i64) {
    let mut best: Option<TimePoint> = None;
    let mut cursor: Option<TimePoint> = None;
    let emit = |out: &mut Builder, m: MappedInterval| out.push(m.translate(shift));
    for it in items {
        if it.lo > end {
            break;
        }
        if let (Some(m), Some(c)) = (best, cursor) {
            if c < it.lo {
                emit(out, MappedInterval::new(c, it.lo - 1, m, Slope::Flat));
            }
        }
        let hi = it.hi.min(end);
        match best {
            Some(m) if m >= it.dep_at(hi) => {
                emit(out, MappedInterval::new(it.lo, hi, m, Slope::Flat));
            }
            Some(m) if m >= it.dep_lo => {
                // Unit item overtaking the running max part way through.
                let t0 = it.lo + (m - it.dep_lo) + 1;
                emit(out, MappedInterval::new(it.lo, t0 - 1, m, Slope::Flat));
                emit(out, it.restrict(t0, hi));
                best = Some(it.dep_at(hi));
            }
            _ => {
                emit(out, it.restrict(it.lo, hi));
                best = Some(it.dep_at(hi));
            }
        }
        cursor = Some(hi + 1);
    }
    if let (Some(m), Some(c)) = (best, cursor) {
        if c <= end {
            emit(out, MappedInterval::new(c, end, m, Slope::Flat));
        }
    }
}

/// Items of `a` lying inside `iv`, clipped.
fn clip(a: &MappedIntervalList, iv: Interval) -> Vec<MappedInterval> {
    let start = a.items.partition_point(|it| it.hi < iv.start);
    a.items[start..]
        .iter()
        .take_while(|it| it.lo <= iv.end)
        .map(|it| it.restrict(it.lo.max(iv.start), it.hi.min(iv.end)))
        .collect()
}

/// Adds waiting: within each free interval, every instant at least `dwell`
/// after a covered instant gets the best departure seen so far.
///
/// With `dwell = 0` the result contains `a` itself; with a positive dwell,
/// only instants that complete the dwell remain.
pub fn extend(a: &MappedIntervalList, f: &[Interval], dwell: i64) -> MappedIntervalList {
    let mut out = Builder::default();
    for iv in f {
        let inside = clip(a, *iv);
        if inside.is_empty() {
            continue;
        }
        carry_forward(&inside, iv.end - dwell, &mut out, dwell);
    }
    out.finish()
}

/// An entry window paired with the exit window reachable from it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct WindowPair {
    pub entry: Interval,
    pub exit: Interval,
}

/// Runs through a segment taking at least `d` seconds: every exit instant in
/// a pair's exit window that some entry instant in the same pair's entry
/// window precedes by at least `d`, with the best such departure.
pub fn shift(a: &MappedIntervalList, d: i64, pairs: &[WindowPair]) -> MappedIntervalList {
    let mut out = Builder::default();
    for p in pairs {
        let inside = clip(a, p.entry);
        if inside.is_empty() {
            continue;
        }
        let mut moved = Builder::default();
        carry_forward(&inside, p.exit.end - d, &mut moved, d);
        for it in moved.items {
            let lo = it.lo.max(p.exit.start);
            if lo <= it.hi {
                out.push(it.restrict(lo, it.hi));
            }
        }
    }
    out.finish()
}
