//! One line per acceptance criterion; exits non-zero if any fails.
//!
//! Run with `cargo test -p railpath --test acceptance`.

mod common;

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use railpath::algebra::{self, MappedIntervalList};
use railpath::bench;
use railpath::dp::TableSize;
use railpath::free_intervals::{Element, FreeIntervals};
use railpath::model::{load_network, Network, SegmentIx, StationIx, TransitionIx, Window};
use railpath::oracle::{oracle_free_check, oracle_frontier, segment_ok};
use railpath::paths::FrontierPoint;
use railpath::pipeline;
use railpath::routing::{build_ordering, Route};
use railpath::synth::{generate, GenConfig, Instance, DAY};
use railpath::TimePoint;

use common::algebra as brute;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn hours(a: i64, b: i64) -> Window {
    Window::new(TimePoint(a * 3600), TimePoint(b * 3600))
}

/// Frontier families never dominate one another, member by member.
fn non_dominated(frontier: &[FrontierPoint]) -> bool {
    for a in frontier {
        for b in frontier {
            if a.dominates(b) {
                return false;
            }
        }
    }
    let mut all: Vec<_> = frontier.iter().flat_map(|p| p.expand().collect::<Vec<_>>()).collect();
    all.sort();
    all.windows(2).all(|w| w[0].0 < w[1].0 && w[0].1 < w[1].1)
}

fn oracle_equivalence(frontiers: &mut Vec<Vec<FrontierPoint>>) -> Outcome {
    let g = 60;
    let n = 250;
    let mut failures = Vec::new();
    for seed in 0..n {
        let cfg = GenConfig {
            seed: 10_000 + seed,
            stations: 2 + (seed % 5) as usize,
            trains: (seed % 5) as usize,
            window: hours(6, 10),
            grid: Some(g),
            bypass: seed % 7 == 3,
            varied_margins: seed % 3 == 0,
            constraints: seed % 4 == 1,
            ..GenConfig::default()
        };
        let inst = generate(&cfg).unwrap();
        let request = inst.request(hours(6, 10)).unwrap();
        let report = pipeline::insert(&inst.network, &inst.timetable, &inst.params, &request, false).unwrap();
        let prepared = pipeline::prepare(&inst.network, &inst.timetable, &inst.params, &request).unwrap();
        let oracle: BTreeSet<_> =
            oracle_frontier(&inst.network, &inst.timetable, &inst.params, &request, &prepared.route_graph, g)
                .unwrap()
                .into_iter()
                .collect();
        let dp: BTreeSet<_> = report
            .frontier
            .iter()
            .flat_map(|p| p.expand().collect::<Vec<_>>())
            .filter(|(d, _)| (d.secs() - request.window.start.secs()) % g == 0)
            .collect();
        if dp != oracle {
            failures.push(seed);
        }
        frontiers.push(report.frontier);
    }
    outcome(failures.is_empty(), format!("{n} grid instances, mismatches {failures:?}"))
}

fn conflict_freeness(frontiers: &mut Vec<Vec<FrontierPoint>>) -> Outcome {
    let n = 1000;
    let (mut paths, mut bad) = (0usize, Vec::new());
    for seed in 0..n {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let start = rng.gen_range(5..9);
        let cfg = GenConfig {
            seed,
            stations: rng.gen_range(2..=14),
            trains: rng.gen_range(0..=24),
            window: hours(start, start + rng.gen_range(2..=6)),
            double_share: rng.gen_range(0.0..=1.0),
            bypass: rng.gen_bool(0.25),
            varied_margins: rng.gen_bool(0.4),
            constraints: rng.gen_bool(0.3),
            max_tracks: rng.gen_range(1..=3),
            ..GenConfig::default()
        };
        let inst = generate(&cfg).unwrap();
        let mut request = inst.request(cfg.window).unwrap();
        request.route_count = rng.gen_range(1..=3);
        let report = pipeline::insert(&inst.network, &inst.timetable, &inst.params, &request, false).unwrap();
        paths += report.paths.len();
        if !report.verified() {
            bad.push(seed);
        }
        frontiers.push(report.frontier);
    }
    outcome(bad.is_empty(), format!("{n} instances, {paths} paths checked, failing seeds {bad:?}"))
}

fn free_interval_agreement() -> Outcome {
    let n = 100;
    let window = hours(6, 8);
    let (mut checks, mut bad) = (0u64, Vec::new());
    for seed in 0..n {
        let mut rng = ChaCha8Rng::seed_from_u64(500 + seed);
        let cfg = GenConfig {
            seed: 500 + seed,
            stations: rng.gen_range(2..=5),
            trains: rng.gen_range(1..=8),
            window: hours(5, 9),
            bypass: seed % 4 == 0,
            varied_margins: seed % 2 == 0,
            ..GenConfig::default()
        };
        let inst = generate(&cfg).unwrap();
        let (net, tt, params) = (&inst.network, &inst.timetable, &inst.params);
        let free = FreeIntervals::new(net, tt, params, window);
        let (ws, we) = (window.start.secs(), window.end.secs());
        let mut ok = true;
        for (si, st) in net.stations().iter().enumerate() {
            for j in 0..st.tracks.len() {
                let f = free.station(StationIx(si), j);
                let e = Element::StationTrack(StationIx(si), j);
                for t in ws..=we {
                    checks += 1;
                    ok &= f.contains(TimePoint(t)) == oracle_free_check(net, tt, params, e, TimePoint(t));
                }
            }
        }
        for ti in 0..net.transitions().len() {
            let f = free.transition(TransitionIx(ti));
            let e = Element::Transition(TransitionIx(ti));
            for t in ws..=we {
                checks += 1;
                ok &= f.contains(TimePoint(t)) == oracle_free_check(net, tt, params, e, TimePoint(t));
            }
        }
        for (li, seg) in net.segments().iter().enumerate() {
            let l = SegmentIx(li);
            for k in 0..seg.tracks.len() {
                let f = free.segment(l, k);
                for t in ws..=we {
                    let exits = [t, t + rng.gen_range(0..=900), t + rng.gen_range(0..=3600)];
                    for x in exits.into_iter().filter(|&x| x <= we) {
                        checks += 1;
                        let (a, b) = (TimePoint(t), TimePoint(x));
                        ok &= f.admits(a, b) == segment_ok(net, tt, params, l, k, a, b);
                    }
                }
            }
        }
        if !ok {
            bad.push(seed);
        }
    }
    outcome(bad.is_empty(), format!("{n} fixtures, {checks} instant checks over 2 h, failing {bad:?}"))
}

fn algebra_semantics() -> Outcome {
    let per_op = 10_000;
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let horizon = 400;
    let mut failures = [0usize; 4];
    let canonical = |l: &MappedIntervalList| l.is_canonical();
    for _ in 0..per_op {
        let a = brute::random_list(&mut rng, horizon);
        let b = brute::random_list(&mut rng, horizon);
        let (ta, tb) = (brute::table(&a), brute::table(&b));

        let u = algebra::union(&a, &b);
        failures[0] += usize::from(brute::table(&u) != brute::union(&ta, &tb) || !canonical(&u));

        let f = brute::random_intervals(&mut rng, horizon);
        let i = algebra::intersect(&a, &f);
        failures[1] += usize::from(brute::table(&i) != brute::intersect(&ta, &f) || !canonical(&i));

        let pairs = brute::random_pairs(&mut rng, horizon);
        let d = rng.gen_range(0..=120);
        let s = algebra::shift(&a, d, &pairs);
        failures[2] += usize::from(brute::table(&s) != brute::shift(&ta, d, &pairs) || !canonical(&s));

        let dwell = if rng.gen_bool(0.5) { 0 } else { rng.gen_range(1..=90) };
        let e = algebra::extend(&a, &f, dwell);
        failures[3] += usize::from(brute::table(&e) != brute::extend(&ta, &f, dwell) || !canonical(&e));
    }
    outcome(
        failures.iter().all(|&f| f == 0),
        format!("{} cases, failures union/intersect/shift/extend {failures:?}", 4 * per_op),
    )
}

fn non_domination(frontiers: &[Vec<FrontierPoint>]) -> Outcome {
    let bad = frontiers.iter().filter(|f| !non_dominated(f)).count();
    let points: usize = frontiers.iter().map(Vec::len).sum();
    outcome(bad == 0, format!("{} runs, {points} families, {bad} with a dominated point", frontiers.len()))
}

fn ratio_ok(sizes: &[TableSize]) -> (bool, f64) {
    let mut worst: f64 = 0.0;
    let mut ok = true;
    for s in sizes {
        if s.free_intervals == 0 {
            ok &= s.items == 0;
        } else {
            let r = s.items as f64 / s.free_intervals as f64;
            worst = worst.max(r);
            ok &= r <= 10.0;
        }
    }
    (ok, worst)
}

fn corridor() -> Instance {
    let cfg = GenConfig { seed: 2021, stations: 40, trains: 100, window: hours(5, 13), ..GenConfig::default() };
    generate(&cfg).unwrap()
}

fn performance(sizes: &mut Vec<TableSize>) -> Outcome {
    let inst = corridor();
    let request = inst.request(hours(6, 13)).unwrap();
    let rows = bench::run(&inst.network, &inst.timetable, &inst.params, &request, &[1], 5).unwrap();
    let row = &rows[0];
    sizes.extend(row.table_sizes.iter().cloned());
    let mean = row.mean_ms();
    outcome(
        mean < 1000.0,
        format!(
            "40 stations, {} trains, 7 h window: query mean {mean:.2} ms over {} runs, {} families",
            inst.timetable.trains().len(),
            row.runs_ms.len(),
            row.frontier
        ),
    )
}

fn scaling(sizes: &mut Vec<TableSize>) -> Outcome {
    let cfg = GenConfig { seed: 2021, stations: 40, trains: 100, window: hours(5, 23), days: 8, ..GenConfig::default() };
    let inst = generate(&cfg).unwrap();
    let request = inst.request(Window::new(TimePoint(0), TimePoint(DAY))).unwrap();
    let multiples: Vec<u32> = (1..=8).collect();
    let rows = bench::run(&inst.network, &inst.timetable, &inst.params, &request, &multiples, 5).unwrap();
    for r in &rows {
        sizes.extend(r.table_sizes.iter().cloned());
    }
    let points: Vec<(f64, f64)> = rows.iter().map(|r| (f64::from(r.multiple), r.mean_ms())).collect();
    let (slope, _, r2) = bench::linear_fit(&points);
    let means: Vec<String> = points.iter().map(|p| format!("{:.1}", p.1)).collect();
    outcome(
        r2 >= 0.95,
        format!(
            "{} trains over 8 days, means [{}] ms, slope {slope:.2} ms/day, R² {r2:.3}",
            inst.timetable.trains().len(),
            means.join(", ")
        ),
    )
}

fn table_sizes(sizes: &[TableSize]) -> Outcome {
    let (ok, worst) = ratio_ok(sizes);
    let peak = sizes.iter().map(|s| s.items).max().unwrap_or(0);
    outcome(ok, format!("{} location profiles, peak {peak} items, worst items/free ratio {worst:.2}", sizes.len()))
}

fn graph(arcs: &[(String, String)]) -> Network {
    let mut names: Vec<&String> = arcs.iter().flat_map(|(a, b)| [a, b]).collect();
    names.sort();
    names.dedup();
    let mut doc = String::from("[stations]\n");
    for n in names {
        doc.push_str(&format!("{n} tracks=1\n"));
    }
    doc.push_str("[segments]\n");
    for (a, b) in arcs {
        doc.push_str(&format!("{a}-{b} from={a} to={b} tracks=1\n"));
    }
    load_network(&doc).unwrap()
}

fn route(net: &Network, stations: &[&str]) -> Route {
    let ix = stations.iter().map(|s| net.station_ix(s).unwrap()).collect();
    Route::from_stations(net, ix, |_| Some(1)).unwrap()
}

fn all_routes(net: &Network, u: &str, v: &str) -> Vec<Route> {
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
    dfs(net, net.station_ix(v).unwrap(), &mut vec![net.station_ix(u).unwrap()], &mut found);
    let mut routes: Vec<Route> = found.into_iter().filter_map(|s| Route::from_stations(net, s, |_| Some(1))).collect();
    routes.sort_by_key(|r| (r.weight, r.describe(net)));
    routes
}

fn arc_ordering() -> Outcome {
    // Layers of vertices joined forward at equal height, with two-way arcs
    // between neighbours inside each layer.
    let (layers, height) = (4, 4);
    let name = |l: usize, h: usize| format!("L{l}H{h}");
    let mut arcs = Vec::new();
    for h in 0..height {
        arcs.push(("U".to_string(), name(0, h)));
        arcs.push((name(layers - 1, h), "V".to_string()));
        for l in 0..layers {
            if l + 1 < layers {
                arcs.push((name(l, h), name(l + 1, h)));
            }
            if h + 1 < height {
                arcs.push((name(l, h), name(l, h + 1)));
                arcs.push((name(l, h + 1), name(l, h)));
            }
        }
    }
    let layered = graph(&arcs);
    let routes = all_routes(&layered, "U", "V");
    let ordering = build_ordering(&routes);
    let layered_ok = ordering.rejected.is_empty() && routes.iter().all(|r| ordering.is_consistent(r));

    // The same class plus one arc, reduced to the vertices of the two
    // mirrored paths through the middle.
    let fig = [
        ("u", "a1"), ("u", "a3"), ("u", "a5"), ("a3", "a1"), ("a1", "a5"), ("a5", "a1"), ("a1", "a3"),
        ("a3", "a4"), ("a5", "a6"), ("a2", "a1"), ("a1", "a2"), ("a4", "a2"), ("a2", "a6"), ("a6", "a2"),
        ("a2", "a4"), ("a2", "v"), ("a4", "v"), ("a6", "v"),
    ];
    let fig: Vec<(String, String)> = fig.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect();
    let net = graph(&fig);
    let shown = route(&net, &["u", "a5", "a6", "a2", "a1", "a3", "a4", "v"]);
    let mirrored = route(&net, &["u", "a3", "a4", "a2", "a1", "a5", "a6", "v"]);
    let o = build_ordering(&[shown.clone(), mirrored.clone()]);
    let arc = |a: &str, b: &str| net.segment_ix(&format!("{a}-{b}")).unwrap();
    let rejected_ok = o.rejected.len() == 1
        && o.rejected[0].route == 1
        && o.rejected[0].earlier == arc("a3", "a4")
        && o.rejected[0].later == arc("a5", "a6")
        && o.is_consistent(&shown)
        && !o.is_consistent(&mirrored);
    let report = o.rejected.first().map(|r| r.describe(&net, &[shown, mirrored])).unwrap_or_default();
    outcome(
        layered_ok && rejected_ok,
        format!("layered graph: {} routes, {} rejected; mirrored pair: {report}", routes.len(), ordering.rejected.len()),
    )
}

fn main() -> ExitCode {
    let started = Instant::now();
    let mut frontiers = Vec::new();
    let mut sizes = Vec::new();
    let results = [
        ("oracle equivalence", oracle_equivalence(&mut frontiers)),
        ("conflict-freeness", conflict_freeness(&mut frontiers)),
        ("free-interval agreement", free_interval_agreement()),
        ("interval algebra semantics", algebra_semantics()),
        ("non-domination", non_domination(&frontiers)),
        ("query performance", performance(&mut sizes)),
        ("window scaling", scaling(&mut sizes)),
        ("table sizes", table_sizes(&sizes)),
        ("arc ordering", arc_ordering()),
    ];
    let mut all = true;
    for (i, (name, o)) in results.iter().enumerate() {
        all &= o.pass;
        println!("criterion {}: {} — {name}: {}", i + 1, if o.pass { "PASS" } else { "FAIL" }, o.detail);
    }
    println!("acceptance finished in {:.1} s", started.elapsed().as_secs_f64());
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
