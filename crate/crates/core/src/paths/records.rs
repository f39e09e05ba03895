use std::fmt::Write as _;

use super::{FrontierPoint, PathRun, PathStop, TrainPath};
use crate::error::{Error, Result};
use crate::model::{Network, StoppingPattern};
use crate::time::{parse_time, Duration, TimePoint};

/// Path records:
///
/// ```text
/// [path 1]
/// departure=07:00:00 arrival=07:25:00 slack=40
/// stop A track=1 pattern=S arr=07:00:00 dep=07:00:00
/// run A-B track=1 entry=07:00:00 exit=07:05:00
/// ```
pub fn write_paths(network: &Network, paths: &[TrainPath]) -> String {
    let mut out = String::new();
    if paths.is_empty() {
        out.push_str("# no feasible path\n");
    }
    for (n, p) in paths.iter().enumerate() {
        let _ = writeln!(out, "[path {}]", n + 1);
        let _ = writeln!(
            out,
            "departure={} arrival={} slack={}",
            p.summary.departure,
            p.summary.arrival,
            p.summary.slack.secs()
        );
        for (i, s) in p.stops.iter().enumerate() {
            let st = network.station(s.station);
            let _ = writeln!(
                out,
                "stop {} track={} pattern={} arr={} dep={}",
                st.id, st.tracks[s.track], s.pattern, s.arrival, s.departure
            );
            if let Some(r) = p.runs.get(i) {
                let seg = network.segment(r.segment);
                let _ = writeln!(out, "run {} track={} entry={} exit={}", seg.id, seg.tracks[r.track], r.entry, r.exit);
            }
        }
    }
    out
}

pub fn write_frontier_tsv(points: &[FrontierPoint]) -> String {
    let mut out = String::from("departure\tarrival\tslack\ttravel\n");
    for p in points {
        let _ = writeln!(out, "{}\t{}\t{}\t{}", p.departure.secs(), p.arrival.secs(), p.slack.secs(), p.travel_time());
    }
    out
}

pub fn parse_paths(network: &Network, text: &str) -> Result<Vec<TrainPath>> {
    let mut paths: Vec<TrainPath> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let t = raw.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        if t.starts_with("[path") {
            paths.push(TrainPath {
                stops: Vec::new(),
                runs: Vec::new(),
                summary: FrontierPoint { departure: TimePoint(0), arrival: TimePoint(0), slack: Duration::ZERO },
            });
            continue;
        }
        let path = paths.last_mut().ok_or_else(|| Error::parse(line, "record before `[path N]`"))?;
        let mut words = t.split_whitespace();
        let head = words.next().unwrap_or_default();
        let mut fields = std::collections::HashMap::new();
        let mut positional = Vec::new();
        for w in words {
            match w.split_once('=') {
                Some((k, v)) => {
                    fields.insert(k, v);
                }
                None => positional.push(w),
            }
        }
        let field = |k: &str| fields.get(k).copied().ok_or_else(|| Error::parse(line, format!("missing `{k}`")));
        let time = |k: &str| -> Result<TimePoint> { parse_time(field(k)?, None).map_err(|e| e.at_line(line)) };
        match head {
            h if h.starts_with("departure=") => {
                let (_, dep) = h.split_once('=').unwrap();
                path.summary.departure = parse_time(dep, None).map_err(|e| e.at_line(line))?;
                path.summary.arrival = time("arrival")?;
                let slack = field("slack")?.parse::<i64>().map_err(|_| Error::parse(line, "bad slack"))?;
                path.summary.slack = Duration::new(slack).map_err(|e| e.at_line(line))?;
            }
            "stop" => {
                let id = positional.first().ok_or_else(|| Error::parse(line, "stop needs a station"))?;
                let station = network.station_ix(id).map_err(|e| e.at_line(line))?;
                let track = network.station_track_ix(station, field("track")?).map_err(|e| e.at_line(line))?;
                let pattern = StoppingPattern::from_letter(field("pattern")?)
                    .ok_or_else(|| Error::parse(line, "pattern must be R or S"))?;
                path.stops.push(PathStop { station, track, pattern, arrival: time("arr")?, departure: time("dep")? });
            }
            "run" => {
                let id = positional.first().ok_or_else(|| Error::parse(line, "run needs a segment"))?;
                let segment = network.segment_ix(id).map_err(|e| e.at_line(line))?;
                let track = network.segment_track_ix(segment, field("track")?).map_err(|e| e.at_line(line))?;
                path.runs.push(PathRun { segment, track, entry: time("entry")?, exit: time("exit")? });
            }
            other => return Err(Error::parse(line, format!("unknown record `{other}`"))),
        }
    }
    Ok(paths)
}
