//! Time-distance diagrams as SVG.
//!
//! Distance is the cumulative fastest running time from the first station,
//! so a train at line speed draws a straight line. Stations with more than
//! one track — where trains can meet or overtake — get grey grid lines.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::model::{Network, ParameterSet, StationIx, Timetable, Window};
use crate::paths::TrainPath;

#[derive(Clone, Debug)]
pub struct PlotOptions {
    pub width: f64,
    pub height: f64,
    /// Time runs horizontally unless this is set.
    pub distance_horizontal: bool,
    /// Time range shown; defaults to the span of everything drawn.
    pub window: Option<Window>,
}

impl Default for PlotOptions {
    fn default() -> Self {
        PlotOptions { width: 1000.0, height: 600.0, distance_horizontal: false, window: None }
    }
}

const MARGIN: f64 = 60.0;

/// Fastest-running-time distance from station 0, ignoring direction.
fn positions(network: &Network, params: &ParameterSet) -> HashMap<StationIx, i64> {
    let mut dist = HashMap::new();
    if network.stations().is_empty() {
        return dist;
    }
    let mut heap = BinaryHeap::from([Reverse((0i64, StationIx(0)))]);
    while let Some(Reverse((d, s))) = heap.pop() {
        if dist.contains_key(&s) {
            continue;
        }
        dist.insert(s, d);
        for &l in network.out_segments(s).iter().chain(network.in_segments(s)) {
            let seg = network.segment(l);
            let other = if seg.from == s { seg.to } else { seg.from };
            let w = params.run_times(l).and_then(|r| r.fastest()).map_or(60, |d| d.secs());
            if !dist.contains_key(&other) {
                heap.push(Reverse((d + w, other)));
            }
        }
    }
    dist
}

fn tick_step(span: i64) -> i64 {
    const STEPS: [i64; 9] = [60, 300, 600, 900, 1800, 3600, 7200, 21600, 86400];
    STEPS.iter().copied().find(|&s| span / s <= 12).unwrap_or(86400)
}

fn clock(t: i64) -> String {
    let day = t.div_euclid(86400);
    let s = t.rem_euclid(86400);
    let hm = format!("{:02}:{:02}", s / 3600, s % 3600 / 60);
    if day == 0 {
        hm
    } else {
        format!("{hm}+{day}")
    }
}

pub fn render_svg(
    network: &Network,
    params: &ParameterSet,
    timetable: &Timetable,
    paths: &[TrainPath],
    options: &PlotOptions,
) -> Result<String> {
    let pos = positions(network, params);
    let lookup = |s: StationIx| {
        pos.get(&s).copied().ok_or_else(|| {
            Error::InvalidValue(format!("station `{}` is not connected to the diagram", network.station(s).id))
        })
    };
    let mut polylines: Vec<(Vec<(i64, i64)>, bool)> = Vec::new();
    for train in timetable.trains() {
        let mut pts = Vec::new();
        for e in &train.events {
            let x = lookup(e.station)?;
            pts.push((e.arrival.secs(), x));
            pts.push((e.departure.secs(), x));
        }
        polylines.push((pts, false));
    }
    for p in paths {
        let mut pts = Vec::new();
        for s in &p.stops {
            let x = lookup(s.station)?;
            pts.push((s.arrival.secs(), x));
            pts.push((s.departure.secs(), x));
        }
        polylines.push((pts, true));
    }

    let (t0, t1) = match options.window {
        Some(w) => (w.start.secs(), w.end.secs()),
        None => {
            let times = polylines.iter().flat_map(|(p, _)| p.iter().map(|&(t, _)| t));
            let lo = times.clone().min().unwrap_or(0);
            let hi = times.max().unwrap_or(3600).max(lo + 60);
            (lo, hi)
        }
    };
    let d_max = pos.values().copied().max().unwrap_or(0).max(1);
    let (w, h) = (options.width, options.height);
    let time_len = if options.distance_horizontal { h } else { w } - 2.0 * MARGIN;
    let dist_len = if options.distance_horizontal { w } else { h } - 2.0 * MARGIN;
    let project = |t: i64, d: i64| -> (f64, f64) {
        let a = MARGIN + (t - t0) as f64 / (t1 - t0) as f64 * time_len;
        let b = MARGIN + d as f64 / d_max as f64 * dist_len;
        if options.distance_horizontal {
            (b, a)
        } else {
            (a, b)
        }
    };

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="10">"#
    );
    let _ = writeln!(svg, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(svg, r#"<clipPath id="plot"><rect x="{MARGIN}" y="{MARGIN}" width="{:.1}" height="{:.1}"/></clipPath>"#, w - 2.0 * MARGIN, h - 2.0 * MARGIN);

    let mut stations: Vec<(i64, StationIx)> = pos.iter().map(|(&s, &d)| (d, s)).collect();
    stations.sort();
    let _ = writeln!(svg, r#"<g class="stations">"#);
    for &(d, s) in &stations {
        let st = network.station(s);
        let meet = st.tracks.len() > 1;
        let (x0, y0) = project(t0, d);
        let (x1, y1) = project(t1, d);
        let (stroke, width) = if meet { ("#bbbbbb", 1.5) } else { ("#eeeeee", 0.5) };
        let _ = writeln!(
            svg,
            r#"<line x1="{x0:.1}" y1="{y0:.1}" x2="{x1:.1}" y2="{y1:.1}" stroke="{stroke}" stroke-width="{width}"/>"#
        );
        let (lx, ly, anchor) = if options.distance_horizontal { (x0, y0 - 6.0, "middle") } else { (x0 - 6.0, y0 + 3.0, "end") };
        let _ = writeln!(svg, r#"<text x="{lx:.1}" y="{ly:.1}" text-anchor="{anchor}">{}</text>"#, escape(st.id.as_str()));
    }
    let _ = writeln!(svg, "</g>");

    let step = tick_step(t1 - t0);
    let _ = writeln!(svg, r#"<g class="time-axis">"#);
    let mut t = t0.div_euclid(step) * step;
    if t < t0 {
        t += step;
    }
    while t <= t1 {
        let (x, y) = project(t, d_max);
        let (lx, ly, anchor) = if options.distance_horizontal { (x + 6.0, y + 3.0, "start") } else { (x, y + 16.0, "middle") };
        let _ = writeln!(svg, r#"<text x="{lx:.1}" y="{ly:.1}" text-anchor="{anchor}">{}</text>"#, clock(t));
        let (ax, ay) = project(t, 0);
        let _ = writeln!(
            svg,
            r##"<line x1="{ax:.1}" y1="{ay:.1}" x2="{x:.1}" y2="{y:.1}" stroke="#f4f4f4" stroke-width="0.5"/>"##
        );
        t += step;
    }
    let _ = writeln!(svg, "</g>");

    for (class, candidate) in [("trains", false), ("candidates", true)] {
        let _ = writeln!(svg, r#"<g class="{class}" clip-path="url(#plot)">"#);
        for (pts, _) in polylines.iter().filter(|(_, c)| *c == candidate) {
            let coords: Vec<String> = pts
                .iter()
                .map(|&(t, d)| {
                    let (x, y) = project(t, d);
                    format!("{x:.1},{y:.1}")
                })
                .collect();
            let style = if candidate {
                r##"stroke="#d62728" stroke-width="2" stroke-dasharray="6 3""##
            } else {
                r##"stroke="#333333" stroke-width="1""##
            };
            let _ = writeln!(svg, r#"<polyline fill="none" {style} points="{}"/>"#, coords.join(" "));
        }
        let _ = writeln!(svg, "</g>");
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}
