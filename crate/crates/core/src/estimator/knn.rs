use super::{rank, EstimationResult, Method, Neighbor};
use crate::error::{Error, Result};
use crate::fingerprint::{rss_distance, FingerprintDatabase, RssVector};
use crate::geometry::Point;

/// Unweighted centroid of the `k` globally nearest reference points.
pub fn estimate_knn(db: &FingerprintDatabase, v: &RssVector, k: usize) -> Result<EstimationResult> {
    if k == 0 {
        return Err(Error::invalid("k must be at least 1"));
    }
    let mut ranked: Vec<(Neighbor, Point)> = db
        .reference_points()
        .iter()
        .filter_map(|p| {
            rss_distance(v, &p.vector)
                .ok()
                .map(|d| (Neighbor { id: p.id.clone(), distance: d }, p.position))
        })
        .collect();
    if ranked.len() < k {
        return Err(Error::invalid(format!(
            "need {k} comparable reference points, found {}",
            ranked.len()
        )));
    }
    ranked.sort_by(|a, b| a.0.distance.total_cmp(&b.0.distance).then_with(|| a.0.id.cmp(&b.0.id)));
    ranked.truncate(k);
    let x = ranked.iter().map(|(_, p)| p.x).sum::<f64>() / k as f64;
    let y = ranked.iter().map(|(_, p)| p.y).sum::<f64>() / k as f64;
    let mut neighbors: Vec<Neighbor> = ranked.into_iter().map(|(n, _)| n).collect();
    rank(&mut neighbors);
    Ok(EstimationResult {
        position: Point::new(x, y),
        subarea: None,
        neighbors,
        method: Method::Knn,
        fallback_used: false,
        candidates: db.reference_points().len(),
    })
}
