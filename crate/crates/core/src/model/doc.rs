//! Serializable document trees shared by the line and tree formats.

use serde::{Deserialize, Serialize};

use super::Direction;
use crate::error::Result;
use crate::time::{parse_time, Epoch, TimePoint};

/// An instant as written in a document: integer seconds or text.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TimeValue {
    Secs(i64),
    Text(String),
}

impl TimeValue {
    pub fn resolve(&self, epoch: Option<Epoch>) -> Result<TimePoint> {
        match self {
            TimeValue::Secs(s) => Ok(TimePoint(*s)),
            TimeValue::Text(t) => parse_time(t, epoch),
        }
    }
}

impl From<TimePoint> for TimeValue {
    fn from(t: TimePoint) -> Self {
        TimeValue::Secs(t.secs())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct NetworkDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epoch: Option<String>,
    pub stations: Vec<StationDoc>,
    pub segments: Vec<SegmentDoc>,
    #[serde(default)]
    pub transitions: Vec<TransitionDoc>,
    #[serde(default)]
    pub conflicts: Vec<ConflictDoc>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StationDoc {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub tracks: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_dwell: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub arrival_window: Option<[TimeValue; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub departure_window: Option<[TimeValue; 2]>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SegmentDoc {
    pub id: String,
    pub from: String,
    pub to: String,
    pub tracks: Vec<String>,
    #[serde(default = "one")]
    pub blocks: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resource: Option<String>,
}

fn one() -> u32 {
    1
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TransitionDoc {
    pub direction: Direction,
    pub station: String,
    pub station_track: String,
    pub segment: String,
    pub segment_track: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConflictDoc {
    pub a: TransitionDoc,
    pub b: TransitionDoc,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TimetableDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epoch: Option<String>,
    pub trains: Vec<TrainDoc>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainDoc {
    pub id: String,
    pub events: Vec<TrainEventDoc>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainEventDoc {
    pub station: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub arrival: Option<TimeValue>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub departure: Option<TimeValue>,
    pub track: String,
    /// Track used on the segment towards the next event's station.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub segment_track: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ParamsDoc {
    #[serde(default)]
    pub defaults: DefaultsDoc,
    #[serde(default)]
    pub run_times: Vec<RunTimeDoc>,
    #[serde(default)]
    pub beta: Vec<BetaDoc>,
    #[serde(default)]
    pub gamma: Vec<GammaDoc>,
    #[serde(default)]
    pub delta: Vec<DeltaDoc>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct DefaultsDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta_arrive_depart: Option<i64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RunTimeDoc {
    pub segment: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rr: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rs: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sr: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ss: Option<i64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BetaDoc {
    pub train: String,
    pub segment: String,
    pub before: i64,
    pub after: i64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GammaDoc {
    pub train: String,
    pub station: String,
    pub track: String,
    pub before: i64,
    pub after: i64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeltaDoc {
    pub train: String,
    pub transition: TransitionDoc,
    pub before: i64,
    pub after: i64,
}
