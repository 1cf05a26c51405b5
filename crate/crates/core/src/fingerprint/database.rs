use std::collections::{BTreeMap, BTreeSet};

use super::{
    average_samples, BeaconNode, PointId, RawSampleBatch, ReferencePoint, RssVector,
    Subarea, SubareaId,
};
use crate::error::{Error, Result};
use crate::geometry::{Point, Rect};

pub const FORMAT_VERSION: u64 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct DbMeta {
    pub scenario: String,
    /// Seconds since the Unix epoch.
    pub created: u64,
    pub version: u64,
}

impl DbMeta {
    /// Metadata stamped from `SOURCE_DATE_EPOCH` (or 0) so output stays reproducible.
    pub fn new(scenario: impl Into<String>) -> Self {
        let created = std::env::var("SOURCE_DATE_EPOCH")
            .ok()
            .and_then(|s| s.trim().parse().ok())
            .unwrap_or(0);
        DbMeta {
            scenario: scenario.into(),
            created,
            version: FORMAT_VERSION,
        }
    }
}

/// Beacons, reference points and subareas produced by the offline phase.
///
/// The revision counter tracks in-memory mutations; it is not persisted and
/// does not take part in equality.
#[derive(Debug, Clone)]
pub struct FingerprintDatabase {
    pub(crate) meta: DbMeta,
    pub(crate) bounds: Option<Rect>,
    pub(crate) beacons: Vec<BeaconNode>,
    pub(crate) reference_points: Vec<ReferencePoint>,
    pub(crate) subareas: Vec<Subarea>,
    pub(crate) revision: u64,
}

impl PartialEq for FingerprintDatabase {
    fn eq(&self, other: &Self) -> bool {
        self.meta == other.meta
            && self.bounds == other.bounds
            && self.beacons == other.beacons
            && self.reference_points == other.reference_points
            && self.subareas == other.subareas
    }
}

impl FingerprintDatabase {
    pub fn new(meta: DbMeta, bounds: Option<Rect>, beacons: Vec<BeaconNode>) -> Result<Self> {
        let db = FingerprintDatabase {
            meta,
            bounds,
            beacons,
            reference_points: Vec::new(),
            subareas: Vec::new(),
            revision: 0,
        };
        db.validate()?;
        Ok(db)
    }

    /// Assembles a database from parts and checks every invariant.
    pub fn from_parts(
        meta: DbMeta,
        bounds: Option<Rect>,
        beacons: Vec<BeaconNode>,
        reference_points: Vec<ReferencePoint>,
        subareas: Vec<Subarea>,
    ) -> Result<Self> {
        let db = FingerprintDatabase {
            meta,
            bounds,
            beacons,
            reference_points,
            subareas,
            revision: 0,
        };
        db.validate()?;
        Ok(db)
    }

    pub fn meta(&self) -> &DbMeta {
        &self.meta
    }

    pub fn bounds(&self) -> Option<Rect> {
        self.bounds
    }

    pub fn beacons(&self) -> &[BeaconNode] {
        &self.beacons
    }

    pub fn reference_points(&self) -> &[ReferencePoint] {
        &self.reference_points
    }

    pub fn subareas(&self) -> &[Subarea] {
        &self.subareas
    }

    pub fn revision(&self) -> u64 {
        self.revision
    }

    pub(crate) fn bump(&mut self) {
        self.revision += 1;
    }

    pub fn point(&self, id: &PointId) -> Option<&ReferencePoint> {
        self.reference_points.iter().find(|p| &p.id == id)
    }

    pub fn subarea(&self, id: &SubareaId) -> Option<&Subarea> {
        self.subareas.iter().find(|s| &s.id == id)
    }

    pub fn members<'a>(&'a self, id: &'a SubareaId) -> impl Iterator<Item = &'a ReferencePoint> + 'a {
        self.reference_points
            .iter()
            .filter(move |p| p.subarea.as_ref() == Some(id))
    }

    pub fn is_segmented(&self) -> bool {
        !self.subareas.is_empty()
    }

    /// Bounds if attached, else the bounding box of the reference points
    /// (padded when degenerate).
    pub fn extent(&self) -> Option<Rect> {
        if let Some(b) = self.bounds {
            return Some(b);
        }
        let pts = &self.reference_points;
        if pts.is_empty() {
            return None;
        }
        let (mut x0, mut y0, mut x1, mut y1) = (f64::MAX, f64::MAX, f64::MIN, f64::MIN);
        for p in pts {
            x0 = x0.min(p.position.x);
            y0 = y0.min(p.position.y);
            x1 = x1.max(p.position.x);
            y1 = y1.max(p.position.y);
        }
        if x1 - x0 < 1.0 {
            x0 -= 0.5;
            x1 += 0.5;
        }
        if y1 - y0 < 1.0 {
            y0 -= 0.5;
            y1 += 0.5;
        }
        Rect::new(x0, y0, x1, y1).ok()
    }

    /// Averages the batch and stores it as a new, unassigned reference point.
    pub fn add_reference_point(&mut self, position: Point, batch: &RawSampleBatch) -> Result<PointId> {
        let vector = average_samples(batch)?;
        self.add_reference_vector(position, vector)
    }

    pub fn add_reference_vector(&mut self, position: Point, vector: RssVector) -> Result<PointId> {
        self.check_new_position(position)?;
        self.check_vector_beacons(&vector)?;
        let id = self.next_point_id();
        self.reference_points.push(ReferencePoint {
            id: id.clone(),
            position,
            vector,
            subarea: None,
        });
        self.bump();
        Ok(id)
    }

    pub(crate) fn check_new_position(&self, position: Point) -> Result<()> {
        if !position.is_finite() {
            return Err(Error::invalid("position must be finite"));
        }
        if let Some(b) = self.bounds {
            if !b.contains(&position) {
                return Err(Error::invalid(format!(
                    "position ({}, {}) lies outside the floor bounds",
                    position.x, position.y
                )));
            }
        }
        if self.reference_points.iter().any(|p| p.position == position) {
            return Err(Error::Conflict(format!(
                "a reference point already exists at ({}, {})",
                position.x, position.y
            )));
        }
        Ok(())
    }

    fn check_vector_beacons(&self, v: &RssVector) -> Result<()> {
        if self.beacons.is_empty() {
            return Ok(());
        }
        for b in v.beacons() {
            if !self.beacons.iter().any(|n| &n.id == b) {
                return Err(Error::invalid(format!("unknown beacon {b}")));
            }
        }
        Ok(())
    }

    pub(crate) fn next_point_id(&self) -> PointId {
        let used: BTreeSet<&str> = self.reference_points.iter().map(|p| p.id.as_str()).collect();
        (self.reference_points.len() + 1..)
            .map(|n| format!("r{n:04}"))
            .find(|s| !used.contains(s.as_str()))
            .map(PointId)
            .expect("unbounded id range")
    }

    pub(crate) fn next_subarea_id(&self) -> SubareaId {
        let used: BTreeSet<&str> = self.subareas.iter().map(|s| s.id.as_str()).collect();
        (self.subareas.len() + 1..)
            .map(|n| format!("A{n:02}"))
            .find(|s| !used.contains(s.as_str()))
            .map(SubareaId)
            .expect("unbounded id range")
    }

    /// Drops every subarea and assignment.
    pub fn clear_segmentation(&mut self) {
        self.subareas.clear();
        for p in &mut self.reference_points {
            p.subarea = None;
        }
        self.bump();
    }

    /// Checks referential integrity, uniqueness and geometry.
    pub fn validate(&self) -> Result<()> {
        if self.meta.version != super::FORMAT_VERSION {
            return Err(Error::Version {
                found: self.meta.version,
                expected: super::FORMAT_VERSION,
            });
        }
        let mut beacon_ids = BTreeSet::new();
        for (i, b) in self.beacons.iter().enumerate() {
            if !beacon_ids.insert(&b.id) {
                return Err(Error::invalid(format!("beacons[{i}]: duplicate id {}", b.id)));
            }
            if !b.position.is_finite() {
                return Err(Error::invalid(format!("beacons[{i}]: position not finite")));
            }
            if let Some(r) = self.bounds {
                if !r.contains(&b.position) {
                    return Err(Error::invalid(format!("beacons[{i}]: outside floor bounds")));
                }
            }
        }

        let subarea_ids: BTreeMap<&SubareaId, &Subarea> =
            self.subareas.iter().map(|s| (&s.id, s)).collect();
        if subarea_ids.len() != self.subareas.len() {
            return Err(Error::invalid("subareas: duplicate id"));
        }

        let mut point_ids = BTreeSet::new();
        let mut positions: Vec<(u64, u64)> = Vec::with_capacity(self.reference_points.len());
        for (i, p) in self.reference_points.iter().enumerate() {
            if !point_ids.insert(&p.id) {
                return Err(Error::invalid(format!("reference_points[{i}]: duplicate id {}", p.id)));
            }
            if !p.position.is_finite() {
                return Err(Error::invalid(format!("reference_points[{i}]: position not finite")));
            }
            positions.push((p.position.x.to_bits(), p.position.y.to_bits()));
            if !self.beacons.is_empty() {
                for b in p.vector.beacons() {
                    if !beacon_ids.contains(b) {
                        return Err(Error::invalid(format!(
                            "reference_points[{i}]: unknown beacon {b}"
                        )));
                    }
                }
            }
            if let Some(s) = &p.subarea {
                match subarea_ids.get(s) {
                    None => {
                        return Err(Error::invalid(format!(
                            "reference_points[{i}]: unknown subarea {s}"
                        )))
                    }
                    Some(sub) if !sub.region.contains(&p.position) => {
                        return Err(Error::invalid(format!(
                            "reference_points[{i}]: lies outside subarea {s}"
                        )))
                    }
                    _ => {}
                }
            }
        }
        positions.sort_unstable();
        if positions.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::invalid("reference_points: duplicate position"));
        }

        for (i, s) in self.subareas.iter().enumerate() {
            if !beacon_ids.is_empty() {
                for (b, _) in s.feature.iter() {
                    if !beacon_ids.contains(b) {
                        return Err(Error::invalid(format!("subareas[{i}]: unknown beacon {b}")));
                    }
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fingerprint::BeaconId;

    fn db() -> FingerprintDatabase {
        FingerprintDatabase::new(
            DbMeta::new("t"),
            Some(Rect::new(0.0, 0.0, 10.0, 10.0).unwrap()),
            vec![BeaconNode::new("b1", 0.0, 0.0, ""), BeaconNode::new("b2", 10.0, 10.0, "")],
        )
        .unwrap()
    }

    fn batch(x: f64, y: f64) -> RawSampleBatch {
        let mut m = BTreeMap::new();
        m.insert(BeaconId::from("b1"), vec![60.0, 62.0]);
        RawSampleBatch::new(Point::new(x, y), m).unwrap()
    }

    #[test]
    fn add_points() {
        let mut d = db();
        let id = d.add_reference_point(Point::new(3.0, 4.0), &batch(3.0, 4.0)).unwrap();
        assert_eq!(id.as_str(), "r0001");
        assert_eq!(d.reference_points().len(), 1);
        assert_eq!(d.point(&id).unwrap().vector.get(&"b1".into()), Some(61.0));
        assert!(d.point(&id).unwrap().subarea.is_none());
        assert!(matches!(
            d.add_reference_point(Point::new(3.0, 4.0), &batch(3.0, 4.0)),
            Err(Error::Conflict(_))
        ));
        assert!(matches!(
            d.add_reference_point(Point::new(11.0, 4.0), &batch(11.0, 4.0)),
            Err(Error::InvalidInput(_))
        ));
        assert_eq!(d.revision(), 1);
    }

    #[test]
    fn seventy_points() {
        let mut d = FingerprintDatabase::new(
            DbMeta::new("t"),
            Some(Rect::new(0.0, 0.0, 41.5, 11.3).unwrap()),
            vec![BeaconNode::new("b1", 0.0, 0.0, "")],
        )
        .unwrap();
        for i in 0..70 {
            let p = Point::new((i % 14) as f64 * 2.0 + 1.0, (i / 14) as f64 * 2.0 + 1.0);
            d.add_reference_point(p, &batch(p.x, p.y)).unwrap();
        }
        assert_eq!(d.reference_points().len(), 70);
    }

    #[test]
    fn unknown_beacon_rejected() {
        let mut d = db();
        let v = RssVector::from_pairs([("b9", 1.0)]).unwrap();
        assert!(d.add_reference_vector(Point::new(1.0, 1.0), v).is_err());
    }
}
