//! Per-second reference semantics for mapped interval lists.

use std::collections::BTreeMap;

use rand::Rng;
use railpath::algebra::{Interval, MappedInterval, MappedIntervalList, WindowPair};
use railpath::TimePoint;

/// Instant → latest departure.
pub type Table = BTreeMap<i64, i64>;

pub fn table(list: &MappedIntervalList) -> Table {
    let mut out = Table::new();
    for it in list.items() {
        for t in it.lo.secs()..=it.hi.secs() {
            out.insert(t, it.dep_at(TimePoint(t)).secs());
        }
    }
    out
}

pub fn union(a: &Table, b: &Table) -> Table {
    let mut out = a.clone();
    for (&t, &d) in b {
        let e = out.entry(t).or_insert(d);
        *e = (*e).max(d);
    }
    out
}

pub fn intersect(a: &Table, f: &[Interval]) -> Table {
    a.iter().filter(|(&t, _)| f.iter().any(|iv| iv.contains(TimePoint(t)))).map(|(&t, &d)| (t, d)).collect()
}

/// Best departure over covered instants `x` in `[lo, hi]`.
fn best(a: &Table, lo: i64, hi: i64) -> Option<i64> {
    if lo > hi {
        return None;
    }
    a.range(lo..=hi).map(|(_, &d)| d).max()
}

pub fn extend(a: &Table, f: &[Interval], dwell: i64) -> Table {
    let mut out = Table::new();
    for iv in f {
        let (s, e) = (iv.start.secs(), iv.end.secs());
        for t in s..=e {
            if let Some(d) = best(a, s, t - dwell) {
                out.insert(t, d);
            }
        }
    }
    out
}

pub fn shift(a: &Table, d: i64, pairs: &[WindowPair]) -> Table {
    let mut out = Table::new();
    for p in pairs {
        let (es, ee) = (p.entry.start.secs(), p.entry.end.secs());
        for t in p.exit.start.secs()..=p.exit.end.secs() {
            if let Some(dep) = best(a, es, ee.min(t - d)) {
                let e = out.entry(t).or_insert(dep);
                *e = (*e).max(dep);
            }
        }
    }
    out
}

pub fn random_list(rng: &mut impl Rng, horizon: i64) -> MappedIntervalList {
    let mut items = Vec::new();
    let mut t = rng.gen_range(0..40);
    while t < horizon {
        let len = rng.gen_range(0..40);
        let dep = t - rng.gen_range(0..200);
        items.push(if rng.gen_bool(0.5) { MappedInterval::flat(t, t + len, dep) } else { MappedInterval::unit(t, t + len, dep) });
        t += len + rng.gen_range(1..60);
    }
    items.into_iter().collect()
}

pub fn random_intervals(rng: &mut impl Rng, horizon: i64) -> Vec<Interval> {
    let mut out = Vec::new();
    let mut t = rng.gen_range(0..60);
    while t < horizon {
        let len = rng.gen_range(0..80);
        out.push(Interval::secs(t, t + len));
        t += len + rng.gen_range(1..50);
    }
    out
}

/// Pairs with increasing, disjoint entry and exit windows, each exit window
/// starting no earlier than its entry window.
pub fn random_pairs(rng: &mut impl Rng, horizon: i64) -> Vec<WindowPair> {
    let mut out = Vec::new();
    let (mut e, mut x) = (rng.gen_range(0..40), 0);
    while e < horizon {
        let elen = rng.gen_range(0..60);
        let xs = (e + rng.gen_range(0..40)).max(x);
        let xlen = rng.gen_range(0..80);
        out.push(WindowPair { entry: Interval::secs(e, e + elen), exit: Interval::secs(xs, xs + xlen) });
        x = xs + xlen + 1 + rng.gen_range(0..20);
        e = (e + elen + 1 + rng.gen_range(0..40)).max(x - 60);
    }
    out
}
