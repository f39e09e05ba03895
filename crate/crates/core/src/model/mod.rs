//! Infrastructure, timetable and parameter types plus document ingestion.

mod doc;
mod network;
mod params;
mod text;
mod timetable;
mod validate;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use doc::{
    ConflictDoc, NetworkDoc, ParamsDoc, RunTimeDoc, SegmentDoc, StationDoc, TimetableDoc, TrainDoc,
    TrainEventDoc, TransitionDoc,
};
pub use network::{Network, Segment, Station, StationConstraints, Transition};
pub use params::{Margins, ParamDefaults, ParameterSet, RunTimes};
pub use timetable::{Movement, SegmentOcc, StationOcc, Timetable, Train, TrainEvent};
pub use validate::{validate, Diagnostic, Severity};

use crate::error::{Error, Result};
use crate::time::TimePoint;

macro_rules! string_id {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
        #[serde(transparent)]
        pub struct $name(pub String);

        impl $name {
            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl From<&str> for $name {
            fn from(s: &str) -> Self {
                $name(s.to_owned())
            }
        }
    };
}

string_id!(StationId);
string_id!(SegmentId);
string_id!(TrackId);
string_id!(TrainId);

macro_rules! index_type {
    ($name:ident) => {
        #[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub struct $name(pub usize);
    };
}

index_type!(StationIx);
index_type!(SegmentIx);
index_type!(TransitionIx);

/// Whether a transition leaves a station onto a segment or enters it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Departing,
    Arriving,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum StoppingPattern {
    Run,
    Stop,
}

impl StoppingPattern {
    pub const ALL: [StoppingPattern; 2] = [StoppingPattern::Run, StoppingPattern::Stop];

    pub fn letter(self) -> char {
        match self {
            StoppingPattern::Run => 'R',
            StoppingPattern::Stop => 'S',
        }
    }

    pub fn from_letter(c: &str) -> Option<Self> {
        match c {
            "R" | "r" => Some(StoppingPattern::Run),
            "S" | "s" => Some(StoppingPattern::Stop),
            _ => None,
        }
    }
}

impl fmt::Display for StoppingPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

/// Stopping patterns at the two ends of a segment.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PatternPair(pub StoppingPattern, pub StoppingPattern);

impl fmt::Display for PatternPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.0, self.1)
    }
}

/// A closed interval of instants.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Window {
    pub start: TimePoint,
    pub end: TimePoint,
}

impl Window {
    pub fn new(start: TimePoint, end: TimePoint) -> Self {
        Window { start, end }
    }

    pub fn contains(&self, t: TimePoint) -> bool {
        self.start <= t && t <= self.end
    }
}

impl fmt::Display for Window {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.start, self.end)
    }
}

/// A query: insert one train from `origin` to `destination` within `window`.
#[derive(Clone, Debug)]
pub struct InsertionRequest {
    pub origin: StationIx,
    pub destination: StationIx,
    pub window: Window,
    /// Intermediate stations where the inserted train may not stop.
    pub no_stop: Vec<StationIx>,
    /// Number of shortest routes offered to the arc ordering.
    pub route_count: usize,
}

impl InsertionRequest {
    pub const DEFAULT_ROUTES: usize = 3;

    pub fn new(origin: StationIx, destination: StationIx, window: Window) -> Result<Self> {
        let request = InsertionRequest {
            origin,
            destination,
            window,
            no_stop: Vec::new(),
            route_count: Self::DEFAULT_ROUTES,
        };
        request.check()?;
        Ok(request)
    }

    pub fn check(&self) -> Result<()> {
        if self.origin == self.destination {
            return Err(Error::Request("origin equals destination".into()));
        }
        if self.window.start >= self.window.end {
            return Err(Error::Request(format!("empty window {}", self.window)));
        }
        if self.route_count == 0 {
            return Err(Error::Request("route count must be at least 1".into()));
        }
        Ok(())
    }

    pub fn may_stop(&self, s: StationIx) -> bool {
        !self.no_stop.contains(&s)
    }

    /// Stopping patterns the inserted train may use at `s`.
    pub fn patterns_at(&self, s: StationIx) -> &'static [StoppingPattern] {
        if s == self.origin || s == self.destination {
            &[StoppingPattern::Stop]
        } else if self.may_stop(s) {
            &StoppingPattern::ALL
        } else {
            &[StoppingPattern::Run]
        }
    }
}

/// Parses a network document, detecting the line or tree format.
pub fn load_network(document: &str) -> Result<Network> {
    let doc = if is_tree(document) {
        serde_json::from_str::<NetworkDoc>(document)?
    } else {
        text::parse_network(document)?
    };
    let network = Network::from_doc(&doc)?;
    for station in network.unreachable_stations() {
        log::warn!(
            "station `{}` is not connected to the rest of the network",
            network.station(station).id
        );
    }
    Ok(network)
}

pub fn load_timetable(document: &str, network: &Network) -> Result<Timetable> {
    let doc = if is_tree(document) {
        serde_json::from_str::<TimetableDoc>(document)?
    } else {
        text::parse_timetable(document)?
    };
    Timetable::from_doc(&doc, network)
}

pub fn load_parameters(
    document: &str,
    network: &Network,
    timetable: &Timetable,
) -> Result<ParameterSet> {
    let doc = if is_tree(document) {
        serde_json::from_str::<ParamsDoc>(document)?
    } else {
        text::parse_params(document)?
    };
    ParameterSet::from_doc(&doc, network, timetable)
}

pub use text::{write_network, write_params, write_timetable};

fn is_tree(document: &str) -> bool {
    document.trim_start().starts_with('{')
}

#[cfg(test)]
mod tests;
