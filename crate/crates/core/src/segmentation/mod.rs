//! Feature identification and the two segmentation modes: operator-drawn
//! regions validated one at a time, and seeded recursive division.

mod auto;
mod feature;
mod manual;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fingerprint::{FeatureSet, PointId, SubareaId};

pub use auto::{plan_auto, segment_auto, AutoOutcome, AutoPlan, FailedLeaf, FailureReport, LeafFailure, PlannedLeaf};
pub use feature::{box_distance, feature_of, is_distinct, matches_feature};
pub use manual::{commit_subarea, resegment_subarea, segment_manual_check};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SegmentationParams {
    /// Slack added to each side of a range when matching an observation.
    pub margin: f64,
    /// Slack used when testing two features for distinctness.
    pub distinct_margin: f64,
    /// Cohesion threshold: widest permitted per-beacon range.
    pub max_range_width: f64,
    /// Smallest subarea edge in meters.
    pub min_cell_size: f64,
    /// Division budget for automatic segmentation.
    pub max_iterations: usize,
    pub min_points_per_subarea: usize,
}

impl Default for SegmentationParams {
    fn default() -> Self {
        SegmentationParams {
            margin: 2.0,
            distinct_margin: 0.0,
            max_range_width: 20.0,
            min_cell_size: 2.0,
            max_iterations: 4096,
            min_points_per_subarea: 3,
        }
    }
}

impl SegmentationParams {
    pub fn validate(&self) -> Result<()> {
        let finite_pos = |v: f64| v.is_finite() && v > 0.0;
        if !(self.margin.is_finite() && self.margin >= 0.0) {
            return Err(Error::invalid("margin must be finite and non-negative"));
        }
        if !(self.distinct_margin.is_finite() && self.distinct_margin >= 0.0) {
            return Err(Error::invalid("distinct_margin must be finite and non-negative"));
        }
        if !finite_pos(self.max_range_width) || !finite_pos(self.min_cell_size) {
            return Err(Error::invalid("max_range_width and min_cell_size must be positive"));
        }
        if self.max_iterations == 0 || self.min_points_per_subarea == 0 {
            return Err(Error::invalid(
                "max_iterations and min_points_per_subarea must be at least 1",
            ));
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Verdicts

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VerdictReason {
    Ok,
    NotCohesive,
    NotDistinctFrom(SubareaId),
    TooFewPoints,
}

impl fmt::Display for VerdictReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VerdictReason::Ok => f.write_str("ok"),
            VerdictReason::NotCohesive => f.write_str("not-cohesive"),
            VerdictReason::NotDistinctFrom(id) => write!(f, "not-distinct-from:{id}"),
            VerdictReason::TooFewPoints => f.write_str("too-few-points"),
        }
    }
}

impl FromStr for VerdictReason {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ok" => Ok(VerdictReason::Ok),
            "not-cohesive" => Ok(VerdictReason::NotCohesive),
            "too-few-points" => Ok(VerdictReason::TooFewPoints),
            _ => s
                .strip_prefix("not-distinct-from:")
                .filter(|id| !id.is_empty())
                .map(|id| VerdictReason::NotDistinctFrom(SubareaId::from(id)))
                .ok_or_else(|| Error::invalid(format!("unknown verdict reason `{s}`"))),
        }
    }
}

impl Serialize for VerdictReason {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for VerdictReason {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentationVerdict {
    pub accepted: bool,
    pub reason: VerdictReason,
    pub feature: Option<FeatureSet>,
    /// Unassigned reference points inside the region.
    pub members: Vec<PointId>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reason_strings_round_trip() {
        for r in [
            VerdictReason::Ok,
            VerdictReason::NotCohesive,
            VerdictReason::TooFewPoints,
            VerdictReason::NotDistinctFrom("A03".into()),
        ] {
            assert_eq!(r.to_string().parse::<VerdictReason>().unwrap(), r);
        }
        assert_eq!(VerdictReason::NotDistinctFrom("A03".into()).to_string(), "not-distinct-from:A03");
        assert!("not-distinct-from:".parse::<VerdictReason>().is_err());
    }

    #[test]
    fn params_validation() {
        assert!(SegmentationParams::default().validate().is_ok());
        let bad = SegmentationParams { min_points_per_subarea: 0, ..Default::default() };
        assert!(bad.validate().is_err());
        let bad = SegmentationParams { max_range_width: 0.0, ..Default::default() };
        assert!(bad.validate().is_err());
    }
}
