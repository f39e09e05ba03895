use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use railpath::model::{load_network, Network, SegmentIx, StationIx};
use railpath::routing::{build_ordering, k_shortest_paths, prune, Route};

/// Builds a network from `(from, to, weight)` arcs; the weight is returned
/// through a lookup keyed by segment id.
fn network(stations: &[&str], arcs: &[(&str, &str)]) -> Network {
    let mut doc = String::from("[stations]\n");
    for s in stations {
        let _ = writeln!(doc, "{s} tracks=1");
    }
    doc.push_str("[segments]\n");
    for (a, b) in arcs {
        let _ = writeln!(doc, "{a}-{b} from={a} to={b} tracks=1");
    }
    load_network(&doc).unwrap()
}

fn ix(net: &Network, id: &str) -> StationIx {
    net.station_ix(id).unwrap()
}

fn names(net: &Network, routes: &[Route]) -> Vec<String> {
    routes.iter().map(|r| r.describe(net)).collect()
}

#[test]
fn corridor_has_one_route() {
    let net = network(&["A", "B", "C"], &[("A", "B"), ("B", "C"), ("C", "B"), ("B", "A")]);
    let routes = k_shortest_paths(&net, ix(&net, "A"), ix(&net, "C"), 3, |_| Some(300));
    assert_eq!(names(&net, &routes), ["A-B-C"]);
    let graph = prune(&net, build_ordering(&routes));
    assert_eq!(graph.arcs().len(), 2);
    assert_eq!(graph.stations().count(), 3);
}

#[test]
fn diamond_routes_come_in_weight_order() {
    let net = network(&["U", "A", "B", "V"], &[("U", "A"), ("A", "V"), ("U", "B"), ("B", "V")]);
    let slow = net.segment_ix("B-V").unwrap();
    let w = |l: SegmentIx| Some(if l == slow { 400 } else { 300 });
    let routes = k_shortest_paths(&net, ix(&net, "U"), ix(&net, "V"), 3, w);
    assert_eq!(names(&net, &routes), ["U-A-V", "U-B-V"]);
    assert_eq!(routes[0].weight, 600);
    assert_eq!(routes[1].weight, 700);

    let one = k_shortest_paths(&net, ix(&net, "U"), ix(&net, "V"), 1, w);
    let graph = prune(&net, build_ordering(&one));
    assert!(!graph.contains_station(ix(&net, "B")));
    assert_eq!(graph.arcs().len(), 2);
}

#[test]
fn disconnected_pair_has_no_route() {
    let net = network(&["A", "B", "C"], &[("A", "B"), ("C", "B")]);
    assert!(k_shortest_paths(&net, ix(&net, "A"), ix(&net, "C"), 3, |_| Some(1)).is_empty());
}

#[test]
fn single_route_ordering_follows_the_route() {
    let net = network(&["A", "B", "C", "D"], &[("C", "D"), ("B", "C"), ("A", "B")]);
    let routes = k_shortest_paths(&net, ix(&net, "A"), ix(&net, "D"), 1, |_| Some(60));
    let ordering = build_ordering(&routes);
    assert_eq!(ordering.arcs, routes[0].arcs);
    assert!(ordering.rejected.is_empty());
}

fn all_simple_paths(net: &Network, u: StationIx, v: StationIx, w: &dyn Fn(SegmentIx) -> Option<i64>) -> Vec<Route> {
    fn dfs(net: &Network, v: StationIx, stack: &mut Vec<StationIx>, out: &mut Vec<Vec<StationIx>>) {
        let here = *stack.last().unwrap();
        if here == v {
            out.push(stack.clone());
            return;
        }
        for &l in net.out_segments(here) {
            let next = net.segment(l).to;
            if !stack.contains(&next) {
                stack.push(next);
                dfs(net, v, stack, out);
                stack.pop();
            }
        }
    }
    let mut found = Vec::new();
    dfs(net, v, &mut vec![u], &mut found);
    let mut routes: Vec<Route> = found.into_iter().filter_map(|s| Route::from_stations(net, s, w)).collect();
    routes.sort_by_key(|r| {
        (r.weight, r.stations.iter().map(|&s| net.station(s).id.to_string()).collect::<Vec<_>>())
    });
    routes
}

#[test]
fn yen_matches_exhaustive_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for case in 0..200 {
        let n = rng.gen_range(3..=10);
        let ids: Vec<String> = (0..n).map(|i| format!("N{i}")).collect();
        let id_refs: Vec<&str> = ids.iter().map(String::as_str).collect();
        let mut arcs = Vec::new();
        for a in 0..n {
            for b in 0..n {
                if a != b && rng.gen_bool(0.3) {
                    arcs.push((id_refs[a], id_refs[b]));
                }
            }
        }
        let net = network(&id_refs, &arcs);
        // Few distinct weights, so ties are common.
        let weights: Vec<i64> = (0..arcs.len()).map(|_| rng.gen_range(1..=4) * 60).collect();
        let w = |l: SegmentIx| Some(weights[l.0]);
        let (u, v) = (StationIx(0), StationIx(n - 1));
        let want = all_simple_paths(&net, u, v, &w);
        let k = 6;
        let got = k_shortest_paths(&net, u, v, k, w);
        let want: Vec<_> = want.into_iter().take(k).collect();
        assert_eq!(names(&net, &got), names(&net, &want), "case {case}");
    }
}
