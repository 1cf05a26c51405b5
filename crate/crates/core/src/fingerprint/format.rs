//! JSON database document.
//!
//! Keys are emitted sorted (serde_json's default map is ordered) and floats
//! use the shortest round-trip representation.

use std::io::Write;

use serde::{Deserialize, Serialize};

use super::{
    BeaconId, BeaconNode, DbMeta, FeatureSet, FingerprintDatabase, PointId, ReferencePoint,
    RssVector, Subarea, SubareaId, FORMAT_VERSION,
};
use crate::error::{Error, Result};
use crate::geometry::{Point, Rect};

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DbFile {
    version: u64,
    meta: MetaRow,
    bounds: Option<Rect>,
    beacons: Vec<BeaconRow>,
    reference_points: Vec<PointRow>,
    subareas: Vec<SubareaRow>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MetaRow {
    scenario: String,
    created: u64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BeaconRow {
    id: BeaconId,
    x: f64,
    y: f64,
    label: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct PointRow {
    id: PointId,
    x: f64,
    y: f64,
    readings: RssVector,
    subarea: Option<SubareaId>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct SubareaRow {
    id: SubareaId,
    rect: Rect,
    feature: FeatureSet,
}

impl From<&ReferencePoint> for PointRow {
    fn from(p: &ReferencePoint) -> Self {
        PointRow {
            id: p.id.clone(),
            x: p.position.x,
            y: p.position.y,
            readings: p.vector.clone(),
            subarea: p.subarea.clone(),
        }
    }
}

impl From<&Subarea> for SubareaRow {
    fn from(s: &Subarea) -> Self {
        SubareaRow {
            id: s.id.clone(),
            rect: s.region,
            feature: s.feature.clone(),
        }
    }
}

fn to_file(db: &FingerprintDatabase) -> DbFile {
    DbFile {
        version: db.meta.version,
        meta: MetaRow {
            scenario: db.meta.scenario.clone(),
            created: db.meta.created,
        },
        bounds: db.bounds,
        beacons: db
            .beacons
            .iter()
            .map(|b| BeaconRow {
                id: b.id.clone(),
                x: b.position.x,
                y: b.position.y,
                label: b.tx_label.clone(),
            })
            .collect(),
        reference_points: db.reference_points.iter().map(PointRow::from).collect(),
        subareas: db.subareas.iter().map(SubareaRow::from).collect(),
    }
}

/// Serializes one row as a single sorted-key JSON line; used to compare rows
/// across saves.
pub(crate) fn row_json<T: Serialize>(row: &T) -> String {
    let v = serde_json::to_value(row).expect("rows are always representable");
    serde_json::to_string(&v).expect("values are always representable")
}

/// Writes the database document. Repeated saves are byte-identical.
pub fn save_database<W: Write>(db: &FingerprintDatabase, mut out: W) -> Result<()> {
    let value = serde_json::to_value(to_file(db))
        .map_err(|e| Error::invalid(format!("database not serializable: {e}")))?;
    let text = serde_json::to_string_pretty(&value)
        .map_err(|e| Error::invalid(format!("database not serializable: {e}")))?;
    out.write_all(text.as_bytes())?;
    out.write_all(b"\n")?;
    Ok(())
}

/// Parses a database document, reporting syntax errors by line and column
/// and version mismatches explicitly.
pub fn load_database(text: &str) -> Result<FingerprintDatabase> {
    let raw: serde_json::Value = serde_json::from_str(text).map_err(|e| Error::from_json(&e))?;
    match raw.get("version") {
        Some(v) => match v.as_u64() {
            Some(FORMAT_VERSION) => {}
            Some(found) => {
                return Err(Error::Version {
                    found,
                    expected: FORMAT_VERSION,
                })
            }
            None => {
                return Err(Error::Parse {
                    line: 1,
                    column: 1,
                    message: "field `version` must be a non-negative integer".into(),
                })
            }
        },
        None => {
            return Err(Error::Parse {
                line: 1,
                column: 1,
                message: "missing field `version`".into(),
            })
        }
    }
    let file: DbFile = serde_json::from_str(text).map_err(|e| Error::from_json(&e))?;

    let meta = DbMeta {
        scenario: file.meta.scenario,
        created: file.meta.created,
        version: file.version,
    };
    let beacons = file
        .beacons
        .into_iter()
        .map(|b| BeaconNode {
            id: b.id,
            position: Point::new(b.x, b.y),
            tx_label: b.label,
        })
        .collect();
    let reference_points = file
        .reference_points
        .into_iter()
        .map(|p| ReferencePoint {
            id: p.id,
            position: Point::new(p.x, p.y),
            vector: p.readings,
            subarea: p.subarea,
        })
        .collect();
    let subareas = file
        .subareas
        .into_iter()
        .map(|s| Subarea {
            id: s.id,
            region: s.rect,
            feature: s.feature,
        })
        .collect();
    FingerprintDatabase::from_parts(meta, file.bounds, beacons, reference_points, subareas)
}

impl FingerprintDatabase {
    /// Convenience wrapper around [`save_database`].
    pub fn to_json(&self) -> String {
        let mut buf = Vec::new();
        save_database(self, &mut buf).expect("writing to memory cannot fail");
        String::from_utf8(buf).expect("serde_json emits UTF-8")
    }

    /// Serialized subarea row and the rows of its member points, one line each.
    pub fn subarea_rows(&self, id: &SubareaId) -> Option<Vec<String>> {
        let s = self.subarea(id)?;
        let mut rows = vec![row_json(&SubareaRow::from(s))];
        rows.extend(self.members(id).map(|p| row_json(&PointRow::from(p))));
        Some(rows)
    }
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;

    use super::*;
    use crate::fingerprint::Interval;

    fn sample() -> FingerprintDatabase {
        let mut ranges = BTreeMap::new();
        ranges.insert(BeaconId::from("b1"), Interval { lo: 62.0, hi: 75.0 });
        FingerprintDatabase::from_parts(
            DbMeta {
                scenario: "demo".into(),
                created: 7,
                version: FORMAT_VERSION,
            },
            Some(Rect::new(0.0, 0.0, 10.0, 5.0).unwrap()),
            vec![BeaconNode::new("b1", 0.0, 0.0, "corner")],
            vec![
                ReferencePoint {
                    id: "r0001".into(),
                    position: Point::new(1.0, 1.0),
                    vector: RssVector::from_pairs([("b1", 75.0)]).unwrap(),
                    subarea: Some("A01".into()),
                },
                ReferencePoint {
                    id: "r0002".into(),
                    position: Point::new(2.0, 1.5),
                    vector: RssVector::from_pairs([("b1", 62.0)]).unwrap(),
                    subarea: Some("A01".into()),
                },
            ],
            vec![Subarea {
                id: "A01".into(),
                region: Rect::new(0.0, 0.0, 5.0, 5.0).unwrap(),
                feature: FeatureSet::new(ranges).unwrap(),
            }],
        )
        .unwrap()
    }

    #[test]
    fn round_trip_and_bytes() {
        let db = sample();
        let a = db.to_json();
        let b = db.to_json();
        assert_eq!(a, b);
        let back = load_database(&a).unwrap();
        assert_eq!(back, db);
        assert_eq!(back.to_json(), a);
    }

    #[test]
    fn keys_sorted() {
        let text = sample().to_json();
        let order: Vec<usize> = ["\"beacons\"", "\"bounds\"", "\"meta\"", "\"reference_points\"", "\"subareas\"", "\"version\""]
            .iter()
            .map(|k| text.find(k).unwrap())
            .collect();
        assert!(order.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn truncated_is_parse_error() {
        let text = sample().to_json();
        let cut = &text[..text.len() / 2];
        match load_database(cut) {
            Err(Error::Parse { line, .. }) => assert!(line > 1),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn version_mismatch() {
        let text = sample().to_json().replace("\"version\": 1", "\"version\": 9");
        assert!(matches!(
            load_database(&text),
            Err(Error::Version { found: 9, expected: 1 })
        ));
        assert!(matches!(load_database("{}"), Err(Error::Parse { .. })));
    }

    #[test]
    fn field_errors_carry_position() {
        let text = sample().to_json().replace("\"rss\": 62.0", "\"rss\": \"x\"");
        match load_database(&text) {
            Err(Error::Parse { line, column, .. }) => assert!(line > 1 && column > 0),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn integrity_checked() {
        let text = sample().to_json().replace("\"subarea\": \"A01\"", "\"subarea\": \"A09\"");
        assert!(matches!(load_database(&text), Err(Error::InvalidInput(_))));
    }
}
