use crate::error::{Error, Result};
use crate::fingerprint::{rss_distance, FingerprintDatabase, RssVector, Subarea, SubareaId};
use crate::segmentation::{box_distance, matches_feature};

#[derive(Debug, Clone, PartialEq)]
pub struct Identification {
    pub subarea: SubareaId,
    pub fallback: bool,
}

/// The subarea whose feature uniquely matches `v`; otherwise the closest
/// feature box, ties broken by mean RSS distance to members, then by id.
pub fn identify_subarea(db: &FingerprintDatabase, v: &RssVector, params: &super::EstimatorParams) -> Result<Identification> {
    let all: Vec<&Subarea> = db.subareas().iter().collect();
    identify_among(db, v, params.margin, &all)
}

pub(crate) fn identify_among(
    db: &FingerprintDatabase,
    v: &RssVector,
    margin: f64,
    subareas: &[&Subarea],
) -> Result<Identification> {
    if subareas.is_empty() {
        return Err(Error::invalid("the database has no subareas"));
    }
    let mut matching = subareas.iter().filter(|s| matches_feature(v, &s.feature, margin));
    if let (Some(only), None) = (matching.next(), matching.next()) {
        return Ok(Identification {
            subarea: only.id.clone(),
            fallback: false,
        });
    }

    let mut best: Option<(f64, f64, &SubareaId)> = None;
    for s in subareas {
        let Ok(d) = box_distance(v, &s.feature) else {
            continue;
        };
        let better = match &best {
            None => true,
            Some((bd, _, _)) if d < *bd => true,
            Some((bd, _, _)) if d > *bd => false,
            Some((_, bm, bid)) => {
                let m = mean_member_distance(db, v, &s.id);
                m < *bm || (m == *bm && s.id < **bid)
            }
        };
        if better {
            let m = mean_member_distance(db, v, &s.id);
            best = Some((d, m, &s.id));
        }
    }
    best.map(|(_, _, id)| Identification {
        subarea: id.clone(),
        fallback: true,
    })
    .ok_or(Error::Unlocatable)
}

fn mean_member_distance(db: &FingerprintDatabase, v: &RssVector, id: &SubareaId) -> f64 {
    let ds: Vec<f64> = db.members(id).filter_map(|p| rss_distance(v, &p.vector).ok()).collect();
    if ds.is_empty() {
        f64::INFINITY
    } else {
        ds.iter().sum::<f64>() / ds.len() as f64
    }
}
