//! Query timings over growing windows, preprocessing excluded.

use std::fmt::Write as _;

use crate::dp::{self, TableSize};
use crate::error::Result;
use crate::model::{InsertionRequest, Network, ParameterSet, Timetable, Window};
use crate::pipeline;

#[derive(Clone, Debug)]
pub struct BenchRow {
    pub multiple: u32,
    pub window: Window,
    pub preprocess_ms: f64,
    /// Query time of each repetition.
    pub runs_ms: Vec<f64>,
    pub frontier: usize,
    pub table_sizes: Vec<TableSize>,
}

impl BenchRow {
    pub fn mean_ms(&self) -> f64 {
        self.runs_ms.iter().sum::<f64>() / self.runs_ms.len().max(1) as f64
    }
}

/// For each multiple `m`, queries the window `[start, start + m·len]` of
/// `request` `repetitions` times.
pub fn run(
    network: &Network,
    timetable: &Timetable,
    params: &ParameterSet,
    request: &InsertionRequest,
    multiples: &[u32],
    repetitions: usize,
) -> Result<Vec<BenchRow>> {
    let base = request.window;
    let len = base.end - base.start;
    let mut rows = Vec::with_capacity(multiples.len());
    for &m in multiples {
        let window = Window::new(base.start, base.start + len * i64::from(m));
        let req = InsertionRequest { window, ..request.clone() };
        let t0 = std::time::Instant::now();
        let prepared = pipeline::prepare(network, timetable, params, &req)?;
        let preprocess_ms = t0.elapsed().as_secs_f64() * 1e3;
        let mut runs_ms = Vec::with_capacity(repetitions);
        let mut last = None;
        for _ in 0..repetitions.max(1) {
            let (tables, frontier, _, timings) = pipeline::query(network, params, &req, &prepared)?;
            runs_ms.push(timings.query_ms());
            last = Some((tables, frontier.len()));
        }
        let (tables, frontier) = last.expect("at least one repetition");
        log::info!("window x{m}: {:.3} ms mean", runs_ms.iter().sum::<f64>() / runs_ms.len() as f64);
        rows.push(BenchRow {
            multiple: m,
            window,
            preprocess_ms,
            runs_ms,
            frontier,
            table_sizes: dp::table_sizes(network, &tables, &prepared.free),
        });
    }
    Ok(rows)
}

pub fn timing_tsv(rows: &[BenchRow]) -> String {
    let mut out = String::from("multiple\twindow_s\tpreprocess_ms\tquery_mean_ms\truns\tfrontier\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{}\t{}\t{:.3}\t{:.3}\t{}\t{}",
            r.multiple,
            r.window.end - r.window.start,
            r.preprocess_ms,
            r.mean_ms(),
            r.runs_ms.len(),
            r.frontier
        );
    }
    out
}

/// Table-size profile: one line per route location.
pub fn table_size_tsv(sizes: &[TableSize]) -> String {
    let mut out = String::from("location\titems\tfree_intervals\n");
    for s in sizes {
        let _ = writeln!(out, "{}\t{}\t{}", s.location, s.items, s.free_intervals);
    }
    out
}

/// Least-squares line through `(x, y)`: slope, intercept and R².
pub fn linear_fit(points: &[(f64, f64)]) -> (f64, f64, f64) {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let syy: f64 = points.iter().map(|p| (p.1 - my).powi(2)).sum();
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    (slope, my - slope * mx, r2)
}
