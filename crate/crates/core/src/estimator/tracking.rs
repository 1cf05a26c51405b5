use serde::{Deserialize, Serialize};

use super::identify::identify_among;
use super::nnf::{estimate_3nnf, nearest_in_subarea};
use super::{EstimationResult, EstimatorParams};
use crate::error::{Error, Result};
use crate::fingerprint::{rss_distance, FingerprintDatabase, RssVector, Subarea};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrackingParams {
    pub margin: f64,
    /// Best-neighbour RSS distance above which the full search runs instead.
    pub reacquire_threshold: f64,
}

impl TrackingParams {
    /// Threshold set to three times the database's median nearest-neighbour
    /// RSS distance.
    pub fn for_database(db: &FingerprintDatabase, margin: f64) -> Self {
        let threshold = median_nn_distance(db).map(|d| 3.0 * d).unwrap_or(f64::INFINITY);
        TrackingParams {
            margin,
            reacquire_threshold: threshold,
        }
    }
}

/// Median over reference points of the RSS distance to their nearest
/// comparable neighbour.
pub fn median_nn_distance(db: &FingerprintDatabase) -> Option<f64> {
    let pts = db.reference_points();
    let mut nn: Vec<f64> = pts
        .iter()
        .enumerate()
        .filter_map(|(i, a)| {
            pts.iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .filter_map(|(_, b)| rss_distance(&a.vector, &b.vector).ok())
                .min_by(f64::total_cmp)
        })
        .collect();
    if nn.is_empty() {
        return None;
    }
    nn.sort_by(f64::total_cmp);
    let n = nn.len();
    Some(if n % 2 == 1 { nn[n / 2] } else { (nn[n / 2 - 1] + nn[n / 2]) / 2.0 })
}

/// Searches only the previous subarea and the subareas touching it. Falls
/// back to the full estimator (and reports every reference point as
/// searched) when the best candidate is further than the threshold.
pub fn estimate_tracked(
    db: &FingerprintDatabase,
    v: &RssVector,
    previous: &EstimationResult,
    params: &TrackingParams,
) -> Result<EstimationResult> {
    let prev_id = previous
        .subarea
        .as_ref()
        .ok_or_else(|| Error::invalid("previous estimate carries no subarea"))?;
    let prev = db
        .subarea(prev_id)
        .ok_or_else(|| Error::Stale(format!("subarea {prev_id} no longer exists")))?;
    let candidates: Vec<&Subarea> = db
        .subareas()
        .iter()
        .filter(|s| s.id == prev.id || s.region.touches(&prev.region))
        .collect();
    let searched: usize = candidates.iter().map(|s| db.members(&s.id).count()).sum();

    let local = identify_among(db, v, params.margin, &candidates)
        .and_then(|ident| nearest_in_subarea(db, v, &ident));
    match local {
        Ok(mut r) if r.neighbors.first().is_some_and(|n| n.distance <= params.reacquire_threshold) => {
            r.candidates = searched;
            Ok(r)
        }
        Ok(_) | Err(Error::Unlocatable) | Err(Error::InvalidInput(_)) => {
            let est = EstimatorParams { margin: params.margin };
            let mut r = estimate_3nnf(db, v, &est)?;
            r.fallback_used = true;
            r.candidates = db.reference_points().len();
            Ok(r)
        }
        Err(e) => Err(e),
    }
}
