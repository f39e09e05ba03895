//! The line-oriented document format.
//!
//! Documents are split into `[section]` blocks; each following line is one
//! record made of positional tokens and `key=value` pairs. Values containing
//! spaces are double-quoted. Lines starting with `#` are comments. The
//! grammar is documented in `docs/formats.md`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::doc::*;
use super::{Direction, Network, ParameterSet, Timetable};
use crate::error::{Error, Result};
use crate::time::TimePoint;

struct Record {
    line: usize,
    positional: Vec<String>,
    keyed: BTreeMap<String, String>,
}

impl Record {
    fn parse(line: usize, text: &str) -> Result<Record> {
        let mut positional = Vec::new();
        let mut keyed = BTreeMap::new();
        for token in tokenize(line, text)? {
            match token.split_once('=') {
                Some((k, v)) if !k.is_empty() && !k.starts_with('"') => {
                    if keyed.insert(k.to_owned(), unquote(v)).is_some() {
                        return Err(Error::parse(line, format!("field `{k}` given twice")));
                    }
                }
                _ => positional.push(unquote(&token)),
            }
        }
        Ok(Record { line, positional, keyed })
    }

    fn take(&mut self, key: &str) -> Option<String> {
        self.keyed.remove(key)
    }

    fn require(&mut self, key: &str) -> Result<String> {
        self.take(key)
            .ok_or_else(|| Error::parse(self.line, format!("missing field `{key}`")))
    }

    fn int(&mut self, key: &str) -> Result<Option<i64>> {
        let line = self.line;
        self.take(key)
            .map(|v| v.parse::<i64>().map_err(|_| Error::parse(line, format!("field `{key}`: `{v}` is not an integer"))))
            .transpose()
    }

    fn positionals(&self, n: usize) -> Result<()> {
        if self.positional.len() != n {
            return Err(Error::parse(
                self.line,
                format!("expected {n} positional field(s), found {}", self.positional.len()),
            ));
        }
        Ok(())
    }

    fn done(self) -> Result<()> {
        match self.keyed.keys().next() {
            Some(k) => Err(Error::parse(self.line, format!("unknown field `{k}`"))),
            None => Ok(()),
        }
    }
}

fn tokenize(line: usize, text: &str) -> Result<Vec<String>> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut quoted = false;
    for c in text.chars() {
        match c {
            '"' => {
                quoted = !quoted;
                cur.push(c);
            }
            c if c.is_whitespace() && !quoted => {
                if !cur.is_empty() {
                    out.push(std::mem::take(&mut cur));
                }
            }
            c => cur.push(c),
        }
    }
    if quoted {
        return Err(Error::parse(line, "unterminated quote"));
    }
    if !cur.is_empty() {
        out.push(cur);
    }
    Ok(out)
}

fn unquote(s: &str) -> String {
    s.strip_prefix('"').and_then(|s| s.strip_suffix('"')).unwrap_or(s).to_owned()
}

fn quote(s: &str) -> String {
    if s.is_empty() || s.chars().any(|c| c.is_whitespace() || c == '=' || c == '|') {
        format!("\"{s}\"")
    } else {
        s.to_owned()
    }
}

/// Iterates `(section header, record)` pairs.
fn sections(document: &str) -> Result<Vec<(String, Record)>> {
    let mut current: Option<String> = None;
    let mut out = Vec::new();
    for (i, raw) in document.lines().enumerate() {
        let line = i + 1;
        let text = raw.trim();
        if text.is_empty() || text.starts_with('#') {
            continue;
        }
        if let Some(header) = text.strip_prefix('[') {
            let header = header
                .strip_suffix(']')
                .ok_or_else(|| Error::parse(line, "unterminated section header"))?;
            current = Some(header.trim().to_owned());
            continue;
        }
        let section = current
            .clone()
            .ok_or_else(|| Error::parse(line, "record before the first section header"))?;
        out.push((section, Record::parse(line, text)?));
    }
    Ok(out)
}

fn parse_window(line: usize, v: &str) -> Result<[TimeValue; 2]> {
    let (a, b) = v
        .split_once("..")
        .ok_or_else(|| Error::parse(line, format!("window `{v}` must look like `start..end`")))?;
    Ok([TimeValue::Text(a.to_owned()), TimeValue::Text(b.to_owned())])
}

fn parse_transition(line: usize, tokens: &[String]) -> Result<TransitionDoc> {
    if tokens.len() != 5 {
        return Err(Error::parse(line, "a transition is `dep STATION TRACK SEGMENT TRACK` or `arr SEGMENT TRACK STATION TRACK`"));
    }
    let t = |i: usize| tokens[i].clone();
    match tokens[0].as_str() {
        "dep" => Ok(TransitionDoc {
            direction: Direction::Departing,
            station: t(1),
            station_track: t(2),
            segment: t(3),
            segment_track: t(4),
        }),
        "arr" => Ok(TransitionDoc {
            direction: Direction::Arriving,
            segment: t(1),
            segment_track: t(2),
            station: t(3),
            station_track: t(4),
        }),
        other => Err(Error::parse(line, format!("transition kind `{other}` is neither `dep` nor `arr`"))),
    }
}

fn transition_tokens(t: &TransitionDoc) -> String {
    match t.direction {
        Direction::Departing => format!(
            "dep {} {} {} {}",
            quote(&t.station),
            quote(&t.station_track),
            quote(&t.segment),
            quote(&t.segment_track)
        ),
        Direction::Arriving => format!(
            "arr {} {} {} {}",
            quote(&t.segment),
            quote(&t.segment_track),
            quote(&t.station),
            quote(&t.station_track)
        ),
    }
}

fn list(v: &str) -> Vec<String> {
    v.split(',').filter(|s| !s.is_empty()).map(str::to_owned).collect()
}

pub(super) fn parse_network(document: &str) -> Result<NetworkDoc> {
    let mut doc = NetworkDoc::default();
    for (section, mut rec) in sections(document)? {
        let line = rec.line;
        match section.as_str() {
            "meta" => {
                doc.epoch = rec.take("epoch");
                rec.positionals(0)?;
                rec.done()?;
            }
            "stations" => {
                rec.positionals(1)?;
                let min_dwell = rec.int("min_dwell")?;
                let arrival_window = rec.take("arrival_window").map(|v| parse_window(line, &v)).transpose()?;
                let departure_window = rec.take("departure_window").map(|v| parse_window(line, &v)).transpose()?;
                doc.stations.push(StationDoc {
                    id: rec.positional[0].clone(),
                    name: rec.take("name"),
                    tracks: list(&rec.require("tracks")?),
                    min_dwell,
                    arrival_window,
                    departure_window,
                });
                rec.done()?;
            }
            "segments" => {
                rec.positionals(1)?;
                let blocks = rec.int("blocks")?.unwrap_or(1);
                let blocks = u32::try_from(blocks).map_err(|_| Error::parse(line, "blocks out of range"))?;
                doc.segments.push(SegmentDoc {
                    id: rec.positional[0].clone(),
                    from: rec.require("from")?,
                    to: rec.require("to")?,
                    tracks: list(&rec.require("tracks")?),
                    blocks,
                    resource: rec.take("resource"),
                });
                rec.done()?;
            }
            "transitions" => {
                doc.transitions.push(parse_transition(line, &rec.positional)?);
                rec.done()?;
            }
            "conflicts" => {
                let bar = rec.positional.iter().position(|t| t == "|").ok_or_else(|| {
                    Error::parse(line, "a conflict is two transitions separated by `|`")
                })?;
                let a = parse_transition(line, &rec.positional[..bar])?;
                let b = parse_transition(line, &rec.positional[bar + 1..])?;
                doc.conflicts.push(ConflictDoc { a, b });
                rec.done()?;
            }
            other => return Err(Error::parse(line, format!("unknown section `{other}`"))),
        }
    }
    Ok(doc)
}

pub(super) fn parse_timetable(document: &str) -> Result<TimetableDoc> {
    let mut doc = TimetableDoc::default();
    for (section, mut rec) in sections(document)? {
        let line = rec.line;
        if section == "meta" {
            doc.epoch = rec.take("epoch");
            rec.done()?;
            continue;
        }
        let Some(train) = section.strip_prefix("train") else {
            return Err(Error::parse(line, format!("unknown section `{section}`")));
        };
        let id = unquote(train.trim());
        if id.is_empty() {
            return Err(Error::parse(line, "train section needs an id: `[train ID]`"));
        }
        if doc.trains.last().map_or(true, |t| t.id != id) {
            doc.trains.push(TrainDoc { id, events: Vec::new() });
        }
        rec.positionals(1)?;
        let event = TrainEventDoc {
            station: rec.positional[0].clone(),
            arrival: rec.take("arr").map(TimeValue::Text),
            departure: rec.take("dep").map(TimeValue::Text),
            track: rec.require("track")?,
            segment_track: rec.take("seg_track"),
        };
        rec.done()?;
        doc.trains.last_mut().unwrap().events.push(event);
    }
    Ok(doc)
}

pub(super) fn parse_params(document: &str) -> Result<ParamsDoc> {
    let mut doc = ParamsDoc::default();
    for (section, mut rec) in sections(document)? {
        let line = rec.line;
        let margin = |rec: &mut Record| -> Result<(i64, i64)> {
            let before = rec.int("before")?.ok_or_else(|| Error::parse(line, "missing field `before`"))?;
            let after = rec.int("after")?.ok_or_else(|| Error::parse(line, "missing field `after`"))?;
            Ok((before, after))
        };
        match section.as_str() {
            "defaults" => {
                rec.positionals(0)?;
                doc.defaults.beta = rec.int("beta")?.or(doc.defaults.beta);
                doc.defaults.gamma = rec.int("gamma")?.or(doc.defaults.gamma);
                doc.defaults.delta = rec.int("delta")?.or(doc.defaults.delta);
                doc.defaults.delta_arrive_depart =
                    rec.int("delta_arrive_depart")?.or(doc.defaults.delta_arrive_depart);
                rec.done()?;
            }
            "run_times" => {
                rec.positionals(1)?;
                doc.run_times.push(RunTimeDoc {
                    segment: rec.positional[0].clone(),
                    rr: rec.int("rr")?,
                    rs: rec.int("rs")?,
                    sr: rec.int("sr")?,
                    ss: rec.int("ss")?,
                });
                rec.done()?;
            }
            "beta" => {
                rec.positionals(2)?;
                let (before, after) = margin(&mut rec)?;
                doc.beta.push(BetaDoc {
                    train: rec.positional[0].clone(),
                    segment: rec.positional[1].clone(),
                    before,
                    after,
                });
                rec.done()?;
            }
            "gamma" => {
                rec.positionals(3)?;
                let (before, after) = margin(&mut rec)?;
                doc.gamma.push(GammaDoc {
                    train: rec.positional[0].clone(),
                    station: rec.positional[1].clone(),
                    track: rec.positional[2].clone(),
                    before,
                    after,
                });
                rec.done()?;
            }
            "delta" => {
                rec.positionals(6)?;
                let (before, after) = margin(&mut rec)?;
                doc.delta.push(DeltaDoc {
                    train: rec.positional[0].clone(),
                    transition: parse_transition(line, &rec.positional[1..])?,
                    before,
                    after,
                });
                rec.done()?;
            }
            other => return Err(Error::parse(line, format!("unknown section `{other}`"))),
        }
    }
    Ok(doc)
}

fn time_text(t: &TimeValue) -> String {
    match t {
        TimeValue::Secs(s) => TimePoint(*s).to_string(),
        TimeValue::Text(s) => quote(s),
    }
}

pub fn write_network(network: &Network) -> String {
    let doc = network.to_doc();
    let mut out = String::from("# railpath network\n");
    if let Some(e) = &doc.epoch {
        let _ = write!(out, "[meta]\nepoch={e}\n");
    }
    out.push_str("[stations]\n");
    for s in &doc.stations {
        let _ = write!(out, "{} tracks={}", quote(&s.id), s.tracks.join(","));
        if let Some(n) = &s.name {
            let _ = write!(out, " name={}", quote(n));
        }
        if let Some(d) = s.min_dwell {
            let _ = write!(out, " min_dwell={d}");
        }
        if let Some([a, b]) = &s.arrival_window {
            let _ = write!(out, " arrival_window={}..{}", time_text(a), time_text(b));
        }
        if let Some([a, b]) = &s.departure_window {
            let _ = write!(out, " departure_window={}..{}", time_text(a), time_text(b));
        }
        out.push('\n');
    }
    out.push_str("[segments]\n");
    for l in &doc.segments {
        let _ = write!(
            out,
            "{} from={} to={} tracks={} blocks={}",
            quote(&l.id),
            quote(&l.from),
            quote(&l.to),
            l.tracks.join(","),
            l.blocks
        );
        if let Some(r) = &l.resource {
            let _ = write!(out, " resource={}", quote(r));
        }
        out.push('\n');
    }
    out.push_str("[transitions]\n");
    for t in &doc.transitions {
        out.push_str(&transition_tokens(t));
        out.push('\n');
    }
    out.push_str("[conflicts]\n");
    for c in &doc.conflicts {
        let _ = writeln!(out, "{} | {}", transition_tokens(&c.a), transition_tokens(&c.b));
    }
    out
}

pub fn write_timetable(timetable: &Timetable, network: &Network) -> String {
    let doc = timetable.to_doc(network);
    let mut out = String::from("# railpath timetable\n");
    if let Some(e) = &doc.epoch {
        let _ = write!(out, "[meta]\nepoch={e}\n");
    }
    for t in &doc.trains {
        let _ = writeln!(out, "[train {}]", t.id);
        for e in &t.events {
            let _ = write!(out, "{}", quote(&e.station));
            if let Some(a) = &e.arrival {
                let _ = write!(out, " arr={}", time_text(a));
            }
            if let Some(d) = &e.departure {
                let _ = write!(out, " dep={}", time_text(d));
            }
            let _ = write!(out, " track={}", quote(&e.track));
            if let Some(k) = &e.segment_track {
                let _ = write!(out, " seg_track={}", quote(k));
            }
            out.push('\n');
        }
    }
    out
}

pub fn write_params(params: &ParameterSet, network: &Network, timetable: &Timetable) -> String {
    let doc = params.to_doc(network, timetable);
    let mut out = String::from("# railpath parameters\n[defaults]\n");
    let d = &doc.defaults;
    let field = |name: &str, v: Option<i64>| v.map(|v| format!(" {name}={v}")).unwrap_or_default();
    let defaults = [
        field("beta", d.beta),
        field("gamma", d.gamma),
        field("delta", d.delta),
        field("delta_arrive_depart", d.delta_arrive_depart),
    ]
    .concat();
    let _ = writeln!(out, "{}", defaults.trim_start());
    out.push_str("[run_times]\n");
    for r in &doc.run_times {
        let _ = writeln!(
            out,
            "{}{}{}{}{}",
            quote(&r.segment),
            field("rr", r.rr),
            field("rs", r.rs),
            field("sr", r.sr),
            field("ss", r.ss)
        );
    }
    if !doc.beta.is_empty() {
        out.push_str("[beta]\n");
        for b in &doc.beta {
            let _ = writeln!(out, "{} {} before={} after={}", quote(&b.train), quote(&b.segment), b.before, b.after);
        }
    }
    if !doc.gamma.is_empty() {
        out.push_str("[gamma]\n");
        for g in &doc.gamma {
            let _ = writeln!(
                out,
                "{} {} {} before={} after={}",
                quote(&g.train),
                quote(&g.station),
                quote(&g.track),
                g.before,
                g.after
            );
        }
    }
    if !doc.delta.is_empty() {
        out.push_str("[delta]\n");
        for dl in &doc.delta {
            let _ = writeln!(
                out,
                "{} {} before={} after={}",
                quote(&dl.train),
                transition_tokens(&dl.transition),
                dl.before,
                dl.after
            );
        }
    }
    out
}
