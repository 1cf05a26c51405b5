use super::identify::{identify_among, Identification};
use super::{rank, EstimationResult, EstimatorParams, Method, Neighbor};
use crate::error::{Error, Result};
use crate::fingerprint::{rss_distance, FingerprintDatabase, RssVector, Subarea};
use crate::geometry::Point;

const K: usize = 3;
const DELTA: f64 = 1e-6;

/// Identify the subarea, then average the three nearest members' positions
/// with weights `1 / (d + 1e-6)`. An exact match returns that point.
pub fn estimate_3nnf(db: &FingerprintDatabase, v: &RssVector, params: &EstimatorParams) -> Result<EstimationResult> {
    let all: Vec<&Subarea> = db.subareas().iter().collect();
    let ident = identify_among(db, v, params.margin, &all)?;
    nearest_in_subarea(db, v, &ident)
}

pub(crate) fn nearest_in_subarea(
    db: &FingerprintDatabase,
    v: &RssVector,
    ident: &Identification,
) -> Result<EstimationResult> {
    let members: Vec<_> = db.members(&ident.subarea).collect();
    let searched = members.len();
    let mut ranked: Vec<(Neighbor, Point)> = members
        .into_iter()
        .filter_map(|p| {
            rss_distance(v, &p.vector)
                .ok()
                .map(|d| (Neighbor { id: p.id.clone(), distance: d }, p.position))
        })
        .collect();
    if ranked.is_empty() {
        return Err(Error::invalid(format!(
            "subarea {} has no member comparable with the observation",
            ident.subarea
        )));
    }
    ranked.sort_by(|a, b| a.0.distance.total_cmp(&b.0.distance).then_with(|| a.0.id.cmp(&b.0.id)));
    ranked.truncate(K);

    let position = if ranked[0].0.distance == 0.0 {
        ranked[0].1
    } else {
        let (mut sx, mut sy, mut sw) = (0.0, 0.0, 0.0);
        for (n, p) in &ranked {
            let w = 1.0 / (n.distance + DELTA);
            sx += w * p.x;
            sy += w * p.y;
            sw += w;
        }
        Point::new(sx / sw, sy / sw)
    };
    let mut neighbors: Vec<Neighbor> = ranked.into_iter().map(|(n, _)| n).collect();
    rank(&mut neighbors);
    Ok(EstimationResult {
        position,
        subarea: Some(ident.subarea.clone()),
        neighbors,
        method: Method::Nnf3,
        fallback_used: ident.fallback,
        candidates: searched,
    })
}
