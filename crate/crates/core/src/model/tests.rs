use super::*;
use crate::synth::{self, GenConfig};
use crate::time::{parse_time, Duration};

const NET: &str = "
[stations]
A tracks=1,2
B tracks=1
C tracks=1,2
[segments]
A-B from=A to=B tracks=1
B-A from=B to=A tracks=1
B-C from=B to=C tracks=1
C-B from=C to=B tracks=1
[transitions]
dep A 1 A-B 1
dep A 2 A-B 1
arr B-A 1 A 1
arr B-A 1 A 2
arr A-B 1 B 1
dep B 1 B-C 1
dep B 1 B-A 1
arr C-B 1 B 1
arr B-C 1 C 1
arr B-C 1 C 2
dep C 1 C-B 1
dep C 2 C-B 1
[conflicts]
dep A 1 A-B 1 | arr B-A 1 A 1
";

const PARAMS: &str = "
[run_times]
A-B rr=300 rs=360 sr=360 ss=420
B-A rr=300 rs=360 sr=360 ss=420
B-C rr=300 rs=360 sr=360 ss=420
C-B rr=300 rs=360 sr=360 ss=420
";

fn t(s: &str) -> TimePoint {
    parse_time(s, None).unwrap()
}

fn toy() -> Network {
    load_network(NET).unwrap()
}

fn timetable(net: &Network, doc: &str) -> Timetable {
    load_timetable(doc, net).unwrap()
}

#[test]
fn three_stations_two_tracks_each_way() {
    let net = toy();
    assert_eq!(net.stations().len(), 3);
    assert_eq!(net.segments().len(), 4);
    let b = net.station_ix("B").unwrap();
    assert_eq!(net.out_segments(b).len(), 2);
    assert_eq!(net.in_segments(b).len(), 2);
    // A-B and B-A share one physical track.
    let ab = net.segment_ix("A-B").unwrap();
    assert_eq!(net.resource_segments(ab).len(), 2);
}

#[test]
fn transition_to_unknown_track_is_rejected() {
    let doc = NET.replace("dep A 2 A-B 1", "dep A 2 A-B 2");
    let err = load_network(&doc).unwrap_err();
    assert!(err.to_string().contains('2'), "{err}");
}

#[test]
fn station_occupation_spans_arrival_to_departure() {
    let net = toy();
    let tt = timetable(&net, "[train X]\nA dep=07:00 track=1\nB arr=07:02 dep=07:20 track=1\n");
    let b = net.station_ix("B").unwrap();
    let occ = tt.station_use(b, 0);
    assert_eq!(occ.len(), 1);
    assert_eq!((occ[0].arrival, occ[0].departure), (t("07:02"), t("07:20")));
}

#[test]
fn departure_before_arrival_is_an_error() {
    let net = toy();
    let err = load_timetable("[train X]\nA dep=07:00 track=1\nB arr=07:20 dep=07:02 track=1\n", &net)
        .unwrap_err();
    assert!(matches!(err, Error::NonMonotone { .. }), "{err}");
}

#[test]
fn revisiting_a_station_is_an_error() {
    let net = toy();
    let doc = "[train X]\nA dep=07:00 track=1\nB arr=07:05 dep=07:06 track=1\nA arr=07:12 track=1\n";
    let err = load_timetable(doc, &net).unwrap_err();
    assert!(matches!(err, Error::StationRevisit { .. }), "{err}");
    assert!(err.to_string().contains("at most once"));
}

#[test]
fn missing_margins_fall_back_to_defaults() {
    let net = toy();
    let tt = timetable(&net, "[train X]\nA dep=07:00 track=1\nB arr=07:05 track=1\n");
    let params = load_parameters(PARAMS, &net, &tt).unwrap();
    let ab = net.segment_ix("A-B").unwrap();
    assert_eq!(params.beta(0, ab), Margins::symmetric(Duration::from_secs(180)));
    let arr_b = net.transition_ix(&net.transitions()[4]).unwrap();
    let dep_b = TransitionIx(5);
    assert_eq!(net.transition(arr_b).direction, Direction::Arriving);
    assert_eq!(net.transition(dep_b).direction, Direction::Departing);
    // The existing train arrives, we depart afterwards: the short margin.
    let m = params.delta(0, Direction::Arriving, dep_b, Direction::Departing);
    assert_eq!(m.after.secs(), 60);
    assert_eq!(m.before.secs(), 180);
}

#[test]
fn missing_run_time_names_segment_and_pattern() {
    let net = toy();
    let tt = timetable(&net, "");
    let params = load_parameters("[run_times]\nA-B rr=300 rs=360 sr=360\n", &net, &tt).unwrap();
    let ab = net.segment_ix("A-B").unwrap();
    let ss = PatternPair(StoppingPattern::Stop, StoppingPattern::Stop);
    let err = params.run_time(&net, ab, ss).unwrap_err();
    assert_eq!(err.to_string(), "no running time for segment `A-B` with pattern SS");
}

#[test]
fn zero_margin_is_rejected() {
    let net = toy();
    let tt = timetable(&net, "");
    assert!(load_parameters("[defaults]\nbeta=0\n", &net, &tt).is_err());
}

#[test]
fn clean_timetable_has_no_warnings() {
    let net = toy();
    let tt = timetable(
        &net,
        "[train X]\nA dep=07:00 track=1\nB arr=07:05 track=1\n[train Y]\nA dep=08:00 track=2\nB arr=08:05 track=1\n",
    );
    let params = load_parameters(PARAMS, &net, &tt).unwrap();
    let found: Vec<_> = validate(&net, &tt, &params).into_iter().filter(|d| d.severity > Severity::Info).collect();
    assert!(found.is_empty(), "{found:?}");
}

#[test]
fn close_trains_on_a_segment_are_reported() {
    let net = toy();
    let tt = timetable(
        &net,
        "[train X]\nA dep=07:00 track=1\nB arr=07:05 track=1\n[train Y]\nA dep=07:01 track=2\nB arr=07:06 track=1\n",
    );
    let params = load_parameters(PARAMS, &net, &tt).unwrap();
    let found = validate(&net, &tt, &params);
    let headway: Vec<_> = found.iter().filter(|d| d.message.contains("headway")).collect();
    assert_eq!(headway.len(), 1, "{found:?}");
    let msg = &headway[0].message;
    assert!(msg.contains("`X`") && msg.contains("`Y`") && msg.contains("`A-B`"), "{msg}");
    assert_eq!(headway[0].severity, Severity::Warning);
}

#[test]
fn conflicting_transitions_too_close_are_reported() {
    let net = toy();
    // X leaves A on track 1 at 07:00; Y arrives there over B-A at 07:02:50,
    // 10 s short of the three-minute margin.
    let tt = timetable(
        &net,
        "[train X]\nA dep=07:00 track=1\nB arr=07:05 track=1\n\
         [train Y]\nB dep=06:57:50 track=1\nA arr=07:02:50 track=1\n",
    );
    let params = load_parameters(PARAMS, &net, &tt).unwrap();
    let found = validate(&net, &tt, &params);
    let msgs: Vec<_> = found.iter().filter(|d| d.message.contains("transition margin")).collect();
    assert!(!msgs.is_empty(), "{found:?}");
    assert!(msgs[0].message.contains("`X`") && msgs[0].message.contains("`Y`"));
}

#[test]
fn line_documents_round_trip() {
    let net = toy();
    let tt = timetable(&net, "[train X]\nA dep=07:00 track=1\nB arr=07:02 dep=07:20 track=1\nC arr=07:26 track=2\n");
    let params = load_parameters(&format!("{PARAMS}[beta]\nX A-B before=90 after=120\n"), &net, &tt).unwrap();

    let net2 = load_network(&write_network(&net)).unwrap();
    assert_eq!(write_network(&net2), write_network(&net));
    let tt2 = load_timetable(&write_timetable(&tt, &net), &net2).unwrap();
    assert_eq!(tt2.trains(), tt.trains());
    let p_text = write_params(&params, &net, &tt);
    let p2 = load_parameters(&p_text, &net2, &tt2).unwrap();
    assert_eq!(write_params(&p2, &net2, &tt2), p_text);
}

#[test]
fn tree_documents_round_trip() {
    let net = toy();
    let tt = timetable(&net, "[train X]\nA dep=07:00 track=1\nB arr=07:02 dep=07:20 track=1\n");
    let json = serde_json::to_string(&net.to_doc()).unwrap();
    let net2 = load_network(&json).unwrap();
    assert_eq!(write_network(&net2), write_network(&net));
    let json = serde_json::to_string(&tt.to_doc(&net)).unwrap();
    assert_eq!(load_timetable(&json, &net2).unwrap().trains(), tt.trains());
}

#[test]
fn forty_station_network_validates_quickly() {
    let cfg = GenConfig { stations: 40, trains: 100, seed: 7, ..GenConfig::default() };
    let inst = synth::generate(&cfg).unwrap();
    assert_eq!(inst.network.segments().len(), 78);
    let start = std::time::Instant::now();
    let found = validate(&inst.network, &inst.timetable, &inst.params);
    let elapsed = start.elapsed();
    assert!(found.iter().all(|d| d.severity < Severity::Error));
    assert!(elapsed.as_millis() < 50, "{elapsed:?}");
}
