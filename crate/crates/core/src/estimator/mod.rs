//! Online phase: subarea identification, the subarea-gated three-neighbour
//! estimator, the global k-NN and RBF baselines, and tracking mode.

mod identify;
mod knn;
mod nnf;
mod rbf;
mod tracking;

use serde::{Deserialize, Serialize};

use crate::fingerprint::{PointId, SubareaId};
use crate::geometry::Point;

pub use identify::{identify_subarea, Identification};
pub use knn::estimate_knn;
pub use nnf::estimate_3nnf;
pub use rbf::{estimate_rbf, train_rbf, RbfModel, RbfParams};
pub use tracking::{estimate_tracked, median_nn_distance, TrackingParams};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EstimatorParams {
    /// RSS slack when matching an observation against feature ranges.
    pub margin: f64,
}

impl Default for EstimatorParams {
    fn default() -> Self {
        EstimatorParams { margin: 2.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "3NNF")]
    Nnf3,
    #[serde(rename = "KNN")]
    Knn,
    #[serde(rename = "RBF")]
    Rbf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Neighbor {
    pub id: PointId,
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimationResult {
    pub position: Point,
    pub subarea: Option<SubareaId>,
    /// Ascending by distance.
    pub neighbors: Vec<Neighbor>,
    pub method: Method,
    pub fallback_used: bool,
    /// Reference points searched to produce this estimate.
    pub candidates: usize,
}

/// Ascending by `(distance, id)`.
pub(crate) fn rank(neighbors: &mut [Neighbor]) {
    neighbors.sort_by(|a, b| a.distance.total_cmp(&b.distance).then_with(|| a.id.cmp(&b.id)));
}
