#![allow(dead_code)]

pub mod algebra;

use std::collections::BTreeSet;
use std::fmt::Write as _;

use railpath::model::{load_network, load_parameters, load_timetable, Direction, InsertionRequest, Network, ParameterSet, Timetable, Window};
use railpath::oracle::oracle_frontier;
use railpath::pipeline::{self, RunReport};
use railpath::TimePoint;

pub struct Fixture {
    pub network: Network,
    pub timetable: Timetable,
    pub params: ParameterSet,
}

/// Completes a network document with every station/segment track
/// combination as a transition; two transitions at one station conflict if
/// they share the station track or the physical segment track.
pub fn with_transitions(doc: &str) -> String {
    let net = load_network(doc).unwrap();
    let mut all = Vec::new();
    for seg in net.segments() {
        for (end, dir) in [(seg.from, Direction::Departing), (seg.to, Direction::Arriving)] {
            let st = net.station(end);
            for j in &st.tracks {
                for k in &seg.tracks {
                    all.push((st.id.to_string(), j.to_string(), seg.id.to_string(), k.to_string(), dir, seg.resource));
                }
            }
        }
    }
    let text = |t: &(String, String, String, String, Direction, usize)| match t.4 {
        Direction::Departing => format!("dep {} {} {} {}", t.0, t.1, t.2, t.3),
        Direction::Arriving => format!("arr {} {} {} {}", t.2, t.3, t.0, t.1),
    };
    let mut out = format!("{doc}\n[transitions]\n");
    for t in &all {
        let _ = writeln!(out, "{}", text(t));
    }
    out.push_str("[conflicts]\n");
    for (i, a) in all.iter().enumerate() {
        for b in &all[i + 1..] {
            let same_station = a.0 == b.0;
            if same_station && (a.1 == b.1 || (a.5 == b.5 && a.3 == b.3)) {
                let _ = writeln!(out, "{} | {}", text(a), text(b));
            }
        }
    }
    out
}

pub fn fixture(network: &str, timetable: &str, params: &str) -> Fixture {
    let network = load_network(&with_transitions(network)).unwrap();
    let timetable = load_timetable(timetable, &network).unwrap();
    let params = load_parameters(params, &network, &timetable).unwrap();
    Fixture { network, timetable, params }
}

impl Fixture {
    pub fn request(&self, from: &str, to: &str, start: i64, end: i64) -> InsertionRequest {
        let u = self.network.station_ix(from).unwrap();
        let v = self.network.station_ix(to).unwrap();
        InsertionRequest::new(u, v, Window::new(TimePoint(start), TimePoint(end))).unwrap()
    }

    pub fn insert(&self, request: &InsertionRequest) -> RunReport {
        pipeline::insert(&self.network, &self.timetable, &self.params, request, false).unwrap()
    }

    /// Asserts the frontier equals the oracle's at one-second granularity
    /// and that every path passes the independent check.
    pub fn check_against_oracle(&self, request: &InsertionRequest) -> RunReport {
        let report = self.insert(request);
        assert!(report.verified(), "{:?}", report.violations);
        let prepared = pipeline::prepare(&self.network, &self.timetable, &self.params, request).unwrap();
        let oracle: BTreeSet<_> =
            oracle_frontier(&self.network, &self.timetable, &self.params, request, &prepared.route_graph, 1)
                .unwrap()
                .into_iter()
                .collect();
        let dp: BTreeSet<_> = report.frontier.iter().flat_map(|p| p.expand().collect::<Vec<_>>()).collect();
        assert_eq!(dp, oracle);
        report
    }
}
