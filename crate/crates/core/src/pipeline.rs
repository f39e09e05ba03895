//! Routing → free intervals → sweep → frontier → paths → verification.

use std::time::Instant;

use crate::dp::{self, DpTables, TableSize};
use crate::error::{Error, Result};
use crate::free_intervals::FreeIntervals;
use crate::model::{InsertionRequest, Network, ParameterSet, Timetable};
use crate::paths::{self, FrontierPoint, TrainPath, Violation};
use crate::routing::{self, Route, RouteGraph};

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Timings {
    /// Routing plus every free interval on the route graph.
    pub preprocess_ms: f64,
    pub dp_ms: f64,
    pub reconstruct_ms: f64,
}

impl Timings {
    /// The query phase: everything after preprocessing.
    pub fn query_ms(&self) -> f64 {
        self.dp_ms + self.reconstruct_ms
    }
}

#[derive(Clone, Debug)]
pub struct RunReport {
    pub routes: Vec<Route>,
    pub rejections: Vec<String>,
    pub timings: Timings,
    pub table_sizes: Vec<TableSize>,
    pub frontier: Vec<FrontierPoint>,
    pub paths: Vec<TrainPath>,
    /// Violations found by the independent check, per path index.
    pub violations: Vec<(usize, Violation)>,
    pub dump: Option<String>,
}

impl RunReport {
    pub fn verified(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn summary(&self) -> String {
        use std::fmt::Write as _;
        let mut out = String::new();
        let t = &self.timings;
        let _ = writeln!(
            out,
            "preprocess {:.3} ms, dp {:.3} ms, reconstruct {:.3} ms",
            t.preprocess_ms, t.dp_ms, t.reconstruct_ms
        );
        let _ = writeln!(out, "{} routes, {} non-dominated families", self.routes.len(), self.frontier.len());
        for r in &self.rejections {
            let _ = writeln!(out, "{r}");
        }
        for s in &self.table_sizes {
            let _ = writeln!(out, "table {}: {} items, {} free", s.location, s.items, s.free_intervals);
        }
        out
    }
}

pub struct Prepared<'a> {
    pub routes: Vec<Route>,
    pub route_graph: RouteGraph,
    pub free: FreeIntervals<'a>,
}

/// Routing and free intervals, computed eagerly for the route graph.
pub fn prepare<'a>(
    network: &'a Network,
    timetable: &'a Timetable,
    params: &'a ParameterSet,
    request: &InsertionRequest,
) -> Result<Prepared<'a>> {
    request.check()?;
    let routes = routing::k_shortest_paths(
        network,
        request.origin,
        request.destination,
        request.route_count,
        routing::run_time_weight(params),
    );
    if routes.is_empty() {
        return Err(Error::Request(format!(
            "no route from `{}` to `{}`",
            network.station(request.origin).id,
            network.station(request.destination).id
        )));
    }
    let ordering = routing::build_ordering(&routes);
    let route_graph = routing::prune(network, ordering);
    let free = FreeIntervals::new(network, timetable, params, request.window);
    for s in route_graph.stations() {
        for j in 0..network.station(s).tracks.len() {
            free.station(s, j);
        }
    }
    for &l in route_graph.arcs() {
        for k in 0..network.segment(l).tracks.len() {
            free.segment(l, k);
        }
    }
    for (i, tr) in network.transitions().iter().enumerate() {
        if route_graph.ordering.position(tr.segment).is_some() {
            free.transition(crate::model::TransitionIx(i));
        }
    }
    Ok(Prepared { routes, route_graph, free })
}

/// The query phase alone: sweep, frontier and one path per family.
pub fn query(
    network: &Network,
    params: &ParameterSet,
    request: &InsertionRequest,
    prepared: &Prepared,
) -> Result<(DpTables, Vec<FrontierPoint>, Vec<TrainPath>, Timings)> {
    let mut timings = Timings::default();
    let t0 = Instant::now();
    let tables = dp::run(network, params, request, &prepared.route_graph, &prepared.free)?;
    let frontier = paths::frontier(network, &tables);
    timings.dp_ms = ms(t0);
    let t1 = Instant::now();
    let found = paths::reconstruct_all(network, params, &tables, &prepared.free, &frontier)?;
    timings.reconstruct_ms = ms(t1);
    Ok((tables, frontier, found, timings))
}

pub fn insert(
    network: &Network,
    timetable: &Timetable,
    params: &ParameterSet,
    request: &InsertionRequest,
    dump_tables: bool,
) -> Result<RunReport> {
    let t0 = Instant::now();
    let prepared = prepare(network, timetable, params, request)?;
    let preprocess_ms = ms(t0);
    let (tables, frontier, found, mut timings) = query(network, params, request, &prepared)?;
    timings.preprocess_ms = preprocess_ms;

    let violations = found
        .iter()
        .enumerate()
        .flat_map(|(i, p)| paths::verify_path(p, network, timetable, params).into_iter().map(move |v| (i, v)))
        .collect();
    let rejections = prepared
        .route_graph
        .ordering
        .rejected
        .iter()
        .map(|r| r.describe(network, &prepared.routes))
        .collect();
    Ok(RunReport {
        rejections,
        timings,
        table_sizes: dp::table_sizes(network, &tables, &prepared.free),
        frontier,
        paths: found,
        violations,
        dump: dump_tables.then(|| dp::dump(network, &tables)),
        routes: prepared.routes,
    })
}

fn ms(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1e3
}
