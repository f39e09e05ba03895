//! Insertion of one train path into an existing macroscopic timetable.
//!
//! The pipeline computes free intervals for every station track, transition
//! and segment track on a set of candidate routes, sweeps an interval
//! dynamic program over the route arcs, and reads back every non-dominated
//! `(departure, arrival)` pair together with a concrete path.

pub mod algebra;
pub mod bench;
pub mod diagram;
pub mod dp;
pub mod error;
pub mod free_intervals;
pub mod model;
pub mod oracle;
pub mod paths;
pub mod pipeline;
pub mod routing;
pub mod synth;
pub mod time;

pub use error::{Error, Result};
pub use time::{Duration, TimePoint};
