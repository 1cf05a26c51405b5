//! Subarea-gated RSS fingerprint localization.
//!
//! The offline phase surveys reference points into a [`FingerprintDatabase`]
//! and divides the floor into subareas whose per-beacon RSS ranges tell them
//! apart. Online, an observation is matched to a subarea and positioned from
//! its three nearest members. A seeded RF simulator and an evaluation harness
//! make the whole pipeline reproducible without radio hardware.

pub mod error;
pub mod estimator;
pub mod eval;
pub mod fingerprint;
pub mod geometry;
pub mod segmentation;
pub mod sim;

pub use error::{Error, Result};
pub use estimator::{
    estimate_3nnf, estimate_knn, estimate_rbf, estimate_tracked, identify_subarea, train_rbf,
    EstimationResult, EstimatorParams, Method, Neighbor, RbfModel, RbfParams, TrackingParams,
};
pub use fingerprint::{
    average_samples, common_beacons, load_database, parse_samples, rss_distance, save_database, BeaconId,
    BeaconNode, DbMeta, FeatureSet, FingerprintDatabase, Interval, PointId, RawSampleBatch,
    ReferencePoint, RssVector, Subarea, SubareaId,
};
pub use geometry::{Point, Rect};
pub use segmentation::{
    box_distance, commit_subarea, feature_of, is_distinct, matches_feature, resegment_subarea,
    segment_auto, segment_manual_check, AutoOutcome, SegmentationParams, SegmentationVerdict,
    VerdictReason,
};
pub use sim::{Floorplan, PropagationParams, Scenario};
