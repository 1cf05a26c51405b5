use super::feature::{feature_of, is_distinct};
use super::{SegmentationParams, SegmentationVerdict, VerdictReason};
use crate::error::{Error, Result};
use crate::fingerprint::{
    average_samples, FeatureSet, FingerprintDatabase, RawSampleBatch, ReferencePoint, Subarea,
    SubareaId,
};
use crate::geometry::Rect;

/// Validates an operator-drawn region against the current database. Never
/// mutates; a positive verdict is committed separately.
pub fn segment_manual_check(
    db: &FingerprintDatabase,
    region: &Rect,
    params: &SegmentationParams,
) -> SegmentationVerdict {
    let members: Vec<&ReferencePoint> = db
        .reference_points()
        .iter()
        .filter(|p| p.subarea.is_none() && region.contains(&p.position))
        .collect();
    let ids = members.iter().map(|p| p.id.clone()).collect();
    let reject = |reason| SegmentationVerdict {
        accepted: false,
        reason,
        feature: None,
        members: Vec::new(),
    };

    if members.is_empty() || members.len() < params.min_points_per_subarea {
        return reject(VerdictReason::TooFewPoints);
    }
    let feature = feature_of(members.iter().copied()).expect("members non-empty");
    if feature.max_width() > params.max_range_width {
        return reject(VerdictReason::NotCohesive);
    }
    if let Some(other) = db
        .subareas()
        .iter()
        .find(|s| !is_distinct(&feature, &s.feature, params.distinct_margin))
    {
        return reject(VerdictReason::NotDistinctFrom(other.id.clone()));
    }
    SegmentationVerdict {
        accepted: true,
        reason: VerdictReason::Ok,
        feature: Some(feature),
        members: ids,
    }
}

/// Stores an accepted region. `observed_revision` is the database revision
/// the verdict was computed against; any mutation since then is a conflict.
pub fn commit_subarea(
    db: &mut FingerprintDatabase,
    region: &Rect,
    feature: &FeatureSet,
    observed_revision: u64,
    params: &SegmentationParams,
) -> Result<SubareaId> {
    if db.revision() != observed_revision {
        return Err(Error::Conflict(format!(
            "database changed since the check (revision {} != {})",
            db.revision(),
            observed_revision
        )));
    }
    let verdict = segment_manual_check(db, region, params);
    if !verdict.accepted {
        return Err(Error::Conflict(format!("region is not acceptable: {}", verdict.reason)));
    }
    if verdict.feature.as_ref() != Some(feature) {
        return Err(Error::Conflict("feature does not match the current members".into()));
    }
    let id = db.next_subarea_id();
    for p in db.reference_points.iter_mut() {
        if verdict.members.contains(&p.id) {
            p.subarea = Some(id.clone());
        }
    }
    db.subareas.push(Subarea {
        id: id.clone(),
        region: *region,
        feature: feature.clone(),
    });
    db.bump();
    Ok(id)
}

/// Replaces one subarea's reference points with freshly collected ones and
/// recomputes only that subarea's feature.
pub fn resegment_subarea(
    db: &mut FingerprintDatabase,
    id: &SubareaId,
    fresh: &[RawSampleBatch],
) -> Result<Subarea> {
    let region = db
        .subarea(id)
        .ok_or_else(|| Error::invalid(format!("unknown subarea {id}")))?
        .region;
    if fresh.is_empty() {
        return Err(Error::invalid("resegmenting needs at least one fresh point"));
    }
    let mut vectors = Vec::with_capacity(fresh.len());
    for (i, b) in fresh.iter().enumerate() {
        if !region.contains(&b.point) {
            return Err(Error::invalid(format!(
                "fresh point {i} at ({}, {}) lies outside subarea {id}",
                b.point.x, b.point.y
            )));
        }
        if fresh[..i].iter().any(|o| o.point == b.point) {
            return Err(Error::Conflict(format!("fresh point {i} repeats a position")));
        }
        let clash = db
            .reference_points()
            .iter()
            .any(|p| p.subarea.as_ref() != Some(id) && p.position == b.point);
        if clash {
            return Err(Error::Conflict(format!(
                "fresh point {i} collides with a reference point outside {id}"
            )));
        }
        vectors.push(average_samples(b)?);
    }
    let known = |v: &crate::fingerprint::RssVector| {
        db.beacons().is_empty() || v.beacons().all(|b| db.beacons().iter().any(|n| &n.id == b))
    };
    if let Some(i) = vectors.iter().position(|v| !known(v)) {
        return Err(Error::invalid(format!("fresh point {i} reads an unknown beacon")));
    }

    db.reference_points.retain(|p| p.subarea.as_ref() != Some(id));
    for (b, vector) in fresh.iter().zip(vectors) {
        let pid = db.next_point_id();
        db.reference_points.push(ReferencePoint {
            id: pid,
            position: b.point,
            vector,
            subarea: Some(id.clone()),
        });
    }
    let feature = feature_of(db.members(id)).expect("fresh points are members");
    let slot = db.subareas.iter_mut().find(|s| &s.id == id).expect("checked above");
    slot.feature = feature;
    let updated = slot.clone();
    db.bump();
    Ok(updated)
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;

    use super::*;
    use crate::fingerprint::{BeaconId, BeaconNode, DbMeta, RssVector};
    use crate::geometry::Point;

    fn rect(x0: f64, y0: f64, x1: f64, y1: f64) -> Rect {
        Rect::new(x0, y0, x1, y1).unwrap()
    }

    /// Two clusters: left half reads b1 high, right half reads b1 low.
    fn fixture() -> FingerprintDatabase {
        let mut db = FingerprintDatabase::new(
            DbMeta::new("fixture"),
            Some(rect(0.0, 0.0, 10.0, 4.0)),
            vec![BeaconNode::new("b1", 0.0, 2.0, ""), BeaconNode::new("b2", 10.0, 2.0, "")],
        )
        .unwrap();
        for (i, x) in [1.0, 2.0, 3.0, 7.0, 8.0, 9.0].iter().enumerate() {
            let left = *x < 5.0;
            let b1 = if left { 70.0 + i as f64 } else { 40.0 + i as f64 };
            let b2 = if left { 40.0 + i as f64 } else { 70.0 + i as f64 };
            let v = RssVector::from_pairs([("b1", b1), ("b2", b2)]).unwrap();
            db.add_reference_vector(Point::new(*x, 2.0), v).unwrap();
        }
        db
    }

    fn params() -> SegmentationParams {
        SegmentationParams::default()
    }

    #[test]
    fn check_then_commit() {
        let mut db = fixture();
        let before = db.to_json();
        let rev = db.revision();
        let v = segment_manual_check(&db, &rect(0.0, 0.0, 5.0, 4.0), &params());
        assert!(v.accepted);
        assert_eq!(v.reason, VerdictReason::Ok);
        assert_eq!(v.members.len(), 3);
        assert_eq!(db.to_json(), before);
        assert_eq!(db.revision(), rev);

        let id = commit_subarea(&mut db, &rect(0.0, 0.0, 5.0, 4.0), v.feature.as_ref().unwrap(), rev, &params()).unwrap();
        assert_eq!(db.members(&id).count(), 3);
        assert!(db.members(&id).all(|p| p.position.x < 5.0));

        let rev = db.revision();
        let v2 = segment_manual_check(&db, &rect(5.0, 0.0, 10.0, 4.0), &params());
        assert!(v2.accepted);
        commit_subarea(&mut db, &rect(5.0, 0.0, 10.0, 4.0), v2.feature.as_ref().unwrap(), rev, &params()).unwrap();
        assert_eq!(db.subareas().len(), 2);
        db.validate().unwrap();
    }

    #[test]
    fn stale_commit_conflicts() {
        let mut db = fixture();
        let rev = db.revision();
        let v = segment_manual_check(&db, &rect(0.0, 0.0, 5.0, 4.0), &params());
        db.add_reference_vector(Point::new(4.0, 1.0), RssVector::from_pairs([("b1", 71.0)]).unwrap())
            .unwrap();
        let err = commit_subarea(&mut db, &rect(0.0, 0.0, 5.0, 4.0), v.feature.as_ref().unwrap(), rev, &params());
        assert!(matches!(err, Err(Error::Conflict(_))));
        assert!(db.subareas().is_empty());
    }

    #[test]
    fn rejections() {
        let mut db = fixture();
        let empty = segment_manual_check(&db, &rect(4.0, 0.0, 6.0, 4.0), &params());
        assert_eq!(empty.reason, VerdictReason::TooFewPoints);
        assert!(!empty.accepted && empty.feature.is_none());

        let wide = segment_manual_check(&db, &rect(0.0, 0.0, 10.0, 4.0), &params());
        assert_eq!(wide.reason, VerdictReason::NotCohesive);

        // commit the left cluster, then propose a region whose ranges duplicate it
        let rev = db.revision();
        let v = segment_manual_check(&db, &rect(0.0, 0.0, 5.0, 4.0), &params());
        commit_subarea(&mut db, &rect(0.0, 0.0, 5.0, 4.0), v.feature.as_ref().unwrap(), rev, &params()).unwrap();
        for (x, b1, b2) in [(1.5, 70.5, 40.5), (2.5, 71.5, 41.5), (3.5, 71.0, 41.0)] {
            db.add_reference_vector(Point::new(x, 3.0), RssVector::from_pairs([("b1", b1), ("b2", b2)]).unwrap())
                .unwrap();
        }
        let dup = segment_manual_check(&db, &rect(0.0, 2.5, 5.0, 4.0), &params());
        assert_eq!(dup.reason, VerdictReason::NotDistinctFrom("A01".into()));
    }

    #[test]
    fn resegment_touches_only_target() {
        let mut db = fixture();
        for r in [rect(0.0, 0.0, 5.0, 4.0), rect(5.0, 0.0, 10.0, 4.0)] {
            let rev = db.revision();
            let v = segment_manual_check(&db, &r, &params());
            commit_subarea(&mut db, &r, v.feature.as_ref().unwrap(), rev, &params()).unwrap();
        }
        let a01 = SubareaId::from("A01");
        let a02 = SubareaId::from("A02");
        let other_before = db.subarea_rows(&a02).unwrap();
        let feature_before = db.subarea(&a01).unwrap().feature.clone();

        let same: Vec<RawSampleBatch> = db
            .members(&a01)
            .map(|p| {
                let m: BTreeMap<BeaconId, Vec<f64>> = p.vector.iter().map(|(b, x)| (b.clone(), vec![x])).collect();
                RawSampleBatch::new(p.position, m).unwrap()
            })
            .collect();
        let updated = resegment_subarea(&mut db, &a01, &same).unwrap();
        assert_eq!(updated.feature, feature_before);

        let shifted: Vec<RawSampleBatch> = same
            .iter()
            .map(|b| {
                let m = b.samples().iter().map(|(k, s)| (k.clone(), vec![s[0] - 5.0])).collect();
                RawSampleBatch::new(b.point, m).unwrap()
            })
            .collect();
        let updated = resegment_subarea(&mut db, &a01, &shifted).unwrap();
        assert_ne!(updated.feature, feature_before);
        assert_eq!(db.subarea_rows(&a02).unwrap(), other_before);
        db.validate().unwrap();

        let mut m = BTreeMap::new();
        m.insert(BeaconId::from("b1"), vec![50.0]);
        let outside = RawSampleBatch::new(Point::new(8.0, 1.0), m).unwrap();
        assert!(matches!(resegment_subarea(&mut db, &a01, &[outside]), Err(Error::InvalidInput(_))));
    }
}
