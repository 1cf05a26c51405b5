use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::fingerprint::{BeaconId, FeatureSet, Interval, ReferencePoint, RssVector};

/// Per-beacon `[min, max]` over the points that observed each beacon.
pub fn feature_of<'a, I>(points: I) -> Result<FeatureSet>
where
    I: IntoIterator<Item = &'a ReferencePoint>,
{
    feature_of_vectors(points.into_iter().map(|p| &p.vector))
}

pub(crate) fn feature_of_vectors<'a, I>(vectors: I) -> Result<FeatureSet>
where
    I: IntoIterator<Item = &'a RssVector>,
{
    let mut ranges: BTreeMap<BeaconId, Interval> = BTreeMap::new();
    let mut any = false;
    for v in vectors {
        any = true;
        for (b, x) in v.iter() {
            ranges
                .entry(b.clone())
                .and_modify(|iv| {
                    iv.lo = iv.lo.min(x);
                    iv.hi = iv.hi.max(x);
                })
                .or_insert(Interval { lo: x, hi: x });
        }
    }
    if !any {
        return Err(Error::invalid("feature of an empty point set"));
    }
    FeatureSet::new(ranges)
}

/// True iff every shared beacon's reading lies in the margin-inflated range.
/// No shared beacon means no match.
pub fn matches_feature(v: &RssVector, f: &FeatureSet, margin: f64) -> bool {
    let mut shared = false;
    for (b, x) in v.iter() {
        if let Some(iv) = f.get(b) {
            shared = true;
            if !iv.contains(x, margin) {
                return false;
            }
        }
    }
    shared
}

pub fn box_distance(v: &RssVector, f: &FeatureSet) -> Result<f64> {
    let mut sum = 0.0;
    let mut shared = false;
    for (b, x) in v.iter() {
        if let Some(iv) = f.get(b) {
            shared = true;
            let d = iv.violation(x);
            sum += d * d;
        }
    }
    if !shared {
        return Err(Error::NoOverlap);
    }
    Ok(sum.sqrt())
}

/// Some shared beacon has disjoint margin-inflated ranges.
pub fn is_distinct(a: &FeatureSet, b: &FeatureSet, margin: f64) -> bool {
    a.iter().any(|(k, ia)| {
        b.get(k).is_some_and(|ib| {
            ia.hi + margin < ib.lo - margin || ib.hi + margin < ia.lo - margin
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point;

    fn v(pairs: &[(&str, f64)]) -> RssVector {
        RssVector::from_pairs(pairs.iter().copied()).unwrap()
    }

    fn f(pairs: &[(&str, f64, f64)]) -> FeatureSet {
        FeatureSet::new(
            pairs
                .iter()
                .map(|(k, lo, hi)| (BeaconId::from(*k), Interval { lo: *lo, hi: *hi }))
                .collect(),
        )
        .unwrap()
    }

    fn rp(vec: RssVector) -> ReferencePoint {
        ReferencePoint {
            id: "r".into(),
            position: Point::new(0.0, 0.0),
            vector: vec,
            subarea: None,
        }
    }

    #[test]
    fn feature_ranges() {
        let pts = [v(&[("b1", 62.0)]), v(&[("b1", 70.0)]), v(&[("b1", 75.0)])].map(rp);
        assert_eq!(feature_of(&pts).unwrap(), f(&[("b1", 62.0, 75.0)]));
        assert_eq!(feature_of(&[rp(v(&[("b1", 40.0)]))]).unwrap(), f(&[("b1", 40.0, 40.0)]));
        let partial = [v(&[("b1", 1.0), ("b2", 7.0)]), v(&[("b1", 3.0)])].map(rp);
        assert_eq!(feature_of(&partial).unwrap(), f(&[("b1", 1.0, 3.0), ("b2", 7.0, 7.0)]));
        assert!(feature_of(&Vec::<ReferencePoint>::new()).is_err());
    }

    #[test]
    fn matching() {
        let fb = f(&[("b1", 62.0, 75.0)]);
        assert!(matches_feature(&v(&[("b1", 68.0)]), &fb, 0.0));
        assert!(!matches_feature(&v(&[("b1", 61.0)]), &fb, 0.0));
        assert!(matches_feature(&v(&[("b1", 61.0)]), &fb, 2.0));
        assert!(!matches_feature(&v(&[("b9", 50.0)]), &fb, 0.0));
    }

    #[test]
    fn box_distances() {
        let fb = f(&[("b1", 62.0, 75.0)]);
        assert_eq!(box_distance(&v(&[("b1", 68.0)]), &fb).unwrap(), 0.0);
        assert_eq!(box_distance(&v(&[("b1", 60.0)]), &fb).unwrap(), 2.0);
        let f2 = f(&[("b1", 62.0, 75.0), ("b2", 70.0, 77.0)]);
        assert_eq!(box_distance(&v(&[("b1", 60.0), ("b2", 80.0)]), &f2).unwrap(), 13f64.sqrt());
        assert!(matches!(box_distance(&v(&[("b9", 1.0)]), &fb), Err(Error::NoOverlap)));
    }

    #[test]
    fn distinctness() {
        let a = f(&[("b1", 62.0, 75.0)]);
        assert!(is_distinct(&a, &f(&[("b1", 80.0, 90.0)]), 0.0));
        assert!(!is_distinct(&a, &f(&[("b1", 70.0, 90.0)]), 0.0));
        assert!(!is_distinct(&a, &f(&[("b1", 77.0, 90.0)]), 2.0));
        assert!(is_distinct(&a, &f(&[("b1", 77.0, 90.0)]), 0.0));
        // touching endpoints are not disjoint
        assert!(!is_distinct(&a, &f(&[("b1", 75.0, 90.0)]), 0.0));
        // no shared beacon
        assert!(!is_distinct(&a, &f(&[("b2", 0.0, 1.0)]), 0.0));
    }
}
