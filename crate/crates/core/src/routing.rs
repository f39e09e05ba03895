//! Candidate routes and the arc ordering the dynamic program sweeps.
//!
//! Routes come from Yen's k-shortest loopless paths. They are then accepted
//! greedily, shortest first, as long as one arc ordering can still respect
//! the arc order of every accepted route.

use std::cmp::Ordering;
use std::collections::{BTreeSet, BinaryHeap, HashMap, HashSet};
use std::fmt;

use crate::model::{Network, ParameterSet, SegmentIx, StationIx};

/// A loopless station path and the segments joining it.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Route {
    pub stations: Vec<StationIx>,
    pub arcs: Vec<SegmentIx>,
    pub weight: i64,
}

impl Route {
    pub fn from_stations(network: &Network, stations: Vec<StationIx>, weight: impl Fn(SegmentIx) -> Option<i64>) -> Option<Route> {
        let mut arcs = Vec::with_capacity(stations.len().saturating_sub(1));
        let mut total = 0;
        for w in stations.windows(2) {
            let l = network.segment_between(w[0], w[1])?;
            total += weight(l)?;
            arcs.push(l);
        }
        Some(Route { stations, arcs, weight: total })
    }

    pub fn describe(&self, network: &Network) -> String {
        let ids: Vec<&str> = self.stations.iter().map(|&s| network.station(s).id.as_str()).collect();
        ids.join("-")
    }

    fn key<'n>(&self, network: &'n Network) -> (i64, Vec<&'n str>) {
        (self.weight, self.stations.iter().map(|&s| network.station(s).id.as_str()).collect())
    }
}

/// Routing weight of a segment: its fastest running time.
pub fn run_time_weight(params: &ParameterSet) -> impl Fn(SegmentIx) -> Option<i64> + '_ {
    move |l| params.run_times(l).and_then(|r| r.fastest()).map(|d| d.secs())
}

/// Shortest `from`–`to` station sequence avoiding banned stations and arcs,
/// lexicographically smallest by station id among equal weights.
fn shortest(
    network: &Network,
    from: StationIx,
    to: StationIx,
    weight: &dyn Fn(SegmentIx) -> Option<i64>,
    banned_stations: &HashSet<StationIx>,
    banned_arcs: &HashSet<SegmentIx>,
) -> Option<(i64, Vec<StationIx>)> {
    let usable = |l: SegmentIx| -> Option<i64> {
        if banned_arcs.contains(&l) {
            return None;
        }
        let seg = network.segment(l);
        if banned_stations.contains(&seg.from) || banned_stations.contains(&seg.to) {
            return None;
        }
        weight(l)
    };
    // Distances to `to` over reversed arcs, then a greedy forward walk.
    let n = network.stations().len();
    let mut dist = vec![i64::MAX; n];
    let mut heap = BinaryHeap::new();
    dist[to.0] = 0;
    heap.push(std::cmp::Reverse((0i64, to.0)));
    while let Some(std::cmp::Reverse((d, v))) = heap.pop() {
        if d > dist[v] {
            continue;
        }
        for &l in network.in_segments(StationIx(v)) {
            let Some(w) = usable(l) else { continue };
            let u = network.segment(l).from.0;
            if d + w < dist[u] {
                dist[u] = d + w;
                heap.push(std::cmp::Reverse((d + w, u)));
            }
        }
    }
    if dist[from.0] == i64::MAX || banned_stations.contains(&from) {
        return None;
    }
    let mut path = vec![from];
    let mut seen = HashSet::from([from]);
    let mut cur = from;
    while cur != to {
        let next = network
            .out_segments(cur)
            .iter()
            .filter_map(|&l| {
                let w = usable(l)?;
                let v = network.segment(l).to;
                (dist[v.0] != i64::MAX && w + dist[v.0] == dist[cur.0] && !seen.contains(&v)).then_some(v)
            })
            .min_by(|a, b| network.station(*a).id.cmp(&network.station(*b).id))?;
        seen.insert(next);
        path.push(next);
        cur = next;
    }
    Some((dist[from.0], path))
}

struct Candidate<'n> {
    key: (i64, Vec<&'n str>),
    route: Route,
}

impl PartialEq for Candidate<'_> {
    fn eq(&self, other: &Self) -> bool {
        self.key == other.key
    }
}
impl Eq for Candidate<'_> {}
impl PartialOrd for Candidate<'_> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Candidate<'_> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key.cmp(&other.key)
    }
}

/// Up to `k` loopless `u`–`v` routes in non-decreasing weight, ties broken
/// by the lexicographic order of station ids. Segments without a weight are
/// unusable.
pub fn k_shortest_paths(
    network: &Network,
    u: StationIx,
    v: StationIx,
    k: usize,
    weight: impl Fn(SegmentIx) -> Option<i64>,
) -> Vec<Route> {
    let weight: &dyn Fn(SegmentIx) -> Option<i64> = &weight;
    let none = HashSet::new();
    let Some((_, first)) = shortest(network, u, v, weight, &none, &HashSet::new()) else {
        return Vec::new();
    };
    let mut accepted = vec![Route::from_stations(network, first, weight).expect("shortest path is weighted")];
    let mut candidates: BTreeSet<Candidate> = BTreeSet::new();
    let mut known: HashSet<Vec<StationIx>> = HashSet::from([accepted[0].stations.clone()]);

    while accepted.len() < k {
        let prev = accepted.last().unwrap().clone();
        for i in 0..prev.stations.len() - 1 {
            let spur = prev.stations[i];
            let root = &prev.stations[..=i];
            let banned_arcs: HashSet<SegmentIx> = accepted
                .iter()
                .filter(|r| r.stations.len() > i + 1 && &r.stations[..=i] == root)
                .map(|r| r.arcs[i])
                .collect();
            let banned_stations: HashSet<StationIx> = root[..i].iter().copied().collect();
            let Some((_, tail)) = shortest(network, spur, v, weight, &banned_stations, &banned_arcs) else {
                continue;
            };
            let mut stations = root[..i].to_vec();
            stations.extend(tail);
            if known.insert(stations.clone()) {
                let route = Route::from_stations(network, stations, weight).expect("weighted");
                candidates.insert(Candidate { key: route.key(network), route });
            }
        }
        match candidates.pop_first() {
            Some(c) => accepted.push(c.route),
            None => break,
        }
    }
    accepted
}

/// A route skipped because its arc order contradicts accepted routes:
/// `earlier` precedes `later` on this route, but accepted routes force
/// `later` before `earlier`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rejection {
    pub route: usize,
    pub earlier: SegmentIx,
    pub later: SegmentIx,
}

impl Rejection {
    pub fn describe(&self, network: &Network, routes: &[Route]) -> String {
        format!(
            "route {} ({}) rejected: it needs arc {} before arc {}, but accepted routes need the reverse",
            self.route,
            routes[self.route].describe(network),
            network.segment(self.earlier).id,
            network.segment(self.later).id
        )
    }
}

/// A permutation of the arcs of the accepted routes.
#[derive(Clone, Debug)]
pub struct ArcOrdering {
    pub arcs: Vec<SegmentIx>,
    /// Routes the ordering is consistent with.
    pub covered: Vec<Route>,
    pub rejected: Vec<Rejection>,
    position: HashMap<SegmentIx, usize>,
}

impl ArcOrdering {
    pub fn position(&self, l: SegmentIx) -> Option<usize> {
        self.position.get(&l).copied()
    }

    /// Whether `route` uses arcs of the ordering in increasing position.
    pub fn is_consistent(&self, route: &Route) -> bool {
        let mut last = None;
        for &l in &route.arcs {
            let Some(p) = self.position(l) else { return false };
            if last.is_some_and(|q| q >= p) {
                return false;
            }
            last = Some(p);
        }
        true
    }
}

impl fmt::Display for ArcOrdering {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ids: Vec<String> = self.arcs.iter().map(|l| l.0.to_string()).collect();
        write!(f, "{}", ids.join(" "))
    }
}

/// Accepts routes in order while a consistent arc ordering exists.
///
/// Precedence constraints link consecutive arcs of each accepted route. A new
/// route is rejected if one of its later arcs already reaches one of its
/// earlier arcs; the report names the earliest such arc and the latest arc
/// reaching it. The ordering is a topological order that prefers arcs in
/// order of first appearance.
pub fn build_ordering(routes: &[Route]) -> ArcOrdering {
    let mut first_seen: Vec<SegmentIx> = Vec::new();
    let mut index: HashMap<SegmentIx, usize> = HashMap::new();
    let mut succ: Vec<BTreeSet<usize>> = Vec::new();
    let mut covered = Vec::new();
    let mut rejected = Vec::new();

    for (ri, route) in routes.iter().enumerate() {
        if let Some(rej) = contradiction(route, &index, &succ) {
            rejected.push(Rejection { route: ri, earlier: rej.0, later: rej.1 });
            continue;
        }
        for &l in &route.arcs {
            index.entry(l).or_insert_with(|| {
                first_seen.push(l);
                succ.push(BTreeSet::new());
                first_seen.len() - 1
            });
        }
        for w in route.arcs.windows(2) {
            succ[index[&w[0]]].insert(index[&w[1]]);
        }
        covered.push(route.clone());
    }

    // Kahn's algorithm, smallest first-appearance index first.
    let n = first_seen.len();
    let mut indegree = vec![0usize; n];
    for s in &succ {
        for &t in s {
            indegree[t] += 1;
        }
    }
    let mut ready: BTreeSet<usize> = (0..n).filter(|&i| indegree[i] == 0).collect();
    let mut arcs = Vec::with_capacity(n);
    while let Some(i) = ready.pop_first() {
        arcs.push(first_seen[i]);
        for &t in &succ[i] {
            indegree[t] -= 1;
            if indegree[t] == 0 {
                ready.insert(t);
            }
        }
    }
    debug_assert_eq!(arcs.len(), n, "accepted constraints must be acyclic");
    let position = arcs.iter().enumerate().map(|(i, &l)| (l, i)).collect();
    ArcOrdering { arcs, covered, rejected, position }
}

fn contradiction(
    route: &Route,
    index: &HashMap<SegmentIx, usize>,
    succ: &[BTreeSet<usize>],
) -> Option<(SegmentIx, SegmentIx)> {
    for (i, &earlier) in route.arcs.iter().enumerate() {
        let Some(&target) = index.get(&earlier) else { continue };
        for &later in route.arcs[i + 1..].iter().rev() {
            let Some(&source) = index.get(&later) else { continue };
            if reaches(succ, source, target) {
                return Some((earlier, later));
            }
        }
    }
    None
}

fn reaches(succ: &[BTreeSet<usize>], from: usize, to: usize) -> bool {
    let mut stack = vec![from];
    let mut seen = vec![false; succ.len()];
    while let Some(x) = stack.pop() {
        if x == to {
            return true;
        }
        if std::mem::replace(&mut seen[x], true) {
            continue;
        }
        stack.extend(succ[x].iter().copied());
    }
    false
}

/// The network restricted to the arcs of an ordering.
#[derive(Clone, Debug)]
pub struct RouteGraph {
    pub ordering: ArcOrdering,
    stations: BTreeSet<StationIx>,
}

impl RouteGraph {
    pub fn stations(&self) -> impl Iterator<Item = StationIx> + '_ {
        self.stations.iter().copied()
    }

    pub fn contains_station(&self, s: StationIx) -> bool {
        self.stations.contains(&s)
    }

    pub fn arcs(&self) -> &[SegmentIx] {
        &self.ordering.arcs
    }
}

pub fn prune(network: &Network, ordering: ArcOrdering) -> RouteGraph {
    let stations = ordering
        .arcs
        .iter()
        .flat_map(|&l| {
            let seg = network.segment(l);
            [seg.from, seg.to]
        })
        .collect();
    RouteGraph { ordering, stations }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn contradiction_names_earliest_and_latest_arcs() {
        let accepted = Route { stations: vec![], arcs: vec![SegmentIx(5), SegmentIx(1), SegmentIx(2)], weight: 0 };
        let mirrored = Route { stations: vec![], arcs: vec![SegmentIx(2), SegmentIx(7), SegmentIx(5)], weight: 0 };
        let ordering = build_ordering(&[accepted, mirrored]);
        assert_eq!(ordering.covered.len(), 1);
        assert_eq!(ordering.rejected, vec![Rejection { route: 1, earlier: SegmentIx(2), later: SegmentIx(5) }]);
        assert_eq!(ordering.arcs, vec![SegmentIx(5), SegmentIx(1), SegmentIx(2)]);
    }

    #[test]
    fn first_route_is_never_rejected() {
        let r = Route { stations: vec![], arcs: vec![SegmentIx(0), SegmentIx(1)], weight: 0 };
        let o = build_ordering(std::slice::from_ref(&r));
        assert!(o.rejected.is_empty());
        assert!(o.is_consistent(&r));
    }
}
