//! Fingerprint domain types, the RSS distance and database persistence.

mod database;
mod distance;
mod format;
mod ingest;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Point, Rect};

pub use database::{DbMeta, FingerprintDatabase, FORMAT_VERSION};
pub use distance::{average_samples, common_beacons, rss_distance};
pub use format::{load_database, save_database};
pub use ingest::parse_samples;

macro_rules! string_id {
    ($(#[$doc:meta])* $name:ident) => {
        $(#[$doc])*
        #[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        #[serde(transparent)]
        pub struct $name(pub String);

        impl $name {
            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl From<&str> for $name {
            fn from(s: &str) -> Self {
                $name(s.to_string())
            }
        }

        impl From<String> for $name {
            fn from(s: String) -> Self {
                $name(s)
            }
        }
    };
}

string_id!(BeaconId);
string_id!(PointId);
string_id!(SubareaId);

fn check_reading(beacon: &BeaconId, value: f64) -> Result<()> {
    if !value.is_finite() || value < 0.0 {
        return Err(Error::invalid(format!(
            "reading for beacon {beacon} must be finite and non-negative, got {value}"
        )));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Beacons

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BeaconNode {
    pub id: BeaconId,
    pub position: Point,
    #[serde(default)]
    pub tx_label: String,
}

impl BeaconNode {
    pub fn new(id: impl Into<BeaconId>, x: f64, y: f64, tx_label: impl Into<String>) -> Self {
        BeaconNode {
            id: id.into(),
            position: Point::new(x, y),
            tx_label: tx_label.into(),
        }
    }
}

// ---------------------------------------------------------------------------
// RSS vectors

/// Averaged per-beacon readings at one point. Larger values are stronger;
/// beacons out of range are absent.
#[derive(Debug, Clone, PartialEq)]
pub struct RssVector {
    readings: BTreeMap<BeaconId, f64>,
}

impl RssVector {
    pub fn new(readings: BTreeMap<BeaconId, f64>) -> Result<Self> {
        if readings.is_empty() {
            return Err(Error::invalid("an RSS vector needs at least one reading"));
        }
        for (b, v) in &readings {
            check_reading(b, *v)?;
        }
        Ok(RssVector { readings })
    }

    /// Builds a vector from `(beacon, value)` pairs, rejecting duplicates.
    pub fn from_pairs<I, K>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (K, f64)>,
        K: Into<BeaconId>,
    {
        let mut readings = BTreeMap::new();
        for (k, v) in pairs {
            let k = k.into();
            if readings.insert(k.clone(), v).is_some() {
                return Err(Error::invalid(format!("duplicate beacon {k} in RSS vector")));
            }
        }
        RssVector::new(readings)
    }

    pub fn get(&self, beacon: &BeaconId) -> Option<f64> {
        self.readings.get(beacon).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&BeaconId, f64)> {
        self.readings.iter().map(|(k, v)| (k, *v))
    }

    pub fn beacons(&self) -> impl Iterator<Item = &BeaconId> {
        self.readings.keys()
    }

    pub fn len(&self) -> usize {
        self.readings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.readings.is_empty()
    }

    pub fn as_map(&self) -> &BTreeMap<BeaconId, f64> {
        &self.readings
    }
}

#[derive(Serialize, Deserialize)]
struct ReadingRow {
    beacon: BeaconId,
    rss: f64,
}

impl Serialize for RssVector {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<ReadingRow> = self
            .iter()
            .map(|(b, rss)| ReadingRow { beacon: b.clone(), rss })
            .collect();
        rows.serialize(s)
    }
}

impl<'de> Deserialize<'de> for RssVector {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<ReadingRow>::deserialize(d)?;
        RssVector::from_pairs(rows.into_iter().map(|r| (r.beacon, r.rss)))
            .map_err(serde::de::Error::custom)
    }
}

// ---------------------------------------------------------------------------
// Feature sets

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, v: f64, margin: f64) -> bool {
        v >= self.lo - margin && v <= self.hi + margin
    }

    /// Distance from `v` to the interval; zero inside.
    pub fn violation(&self, v: f64) -> f64 {
        if v < self.lo {
            self.lo - v
        } else if v > self.hi {
            v - self.hi
        } else {
            0.0
        }
    }
}

/// Per-beacon closed RSS intervals characterizing a subarea.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FeatureSet {
    ranges: BTreeMap<BeaconId, Interval>,
}

impl FeatureSet {
    pub fn new(ranges: BTreeMap<BeaconId, Interval>) -> Result<Self> {
        for (b, iv) in &ranges {
            check_reading(b, iv.lo)?;
            check_reading(b, iv.hi)?;
            if iv.lo > iv.hi {
                return Err(Error::invalid(format!(
                    "interval for beacon {b} has lo {} > hi {}",
                    iv.lo, iv.hi
                )));
            }
        }
        Ok(FeatureSet { ranges })
    }

    pub fn get(&self, beacon: &BeaconId) -> Option<&Interval> {
        self.ranges.get(beacon)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&BeaconId, &Interval)> {
        self.ranges.iter()
    }

    pub fn len(&self) -> usize {
        self.ranges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranges.is_empty()
    }

    /// Largest interval width over all beacons.
    pub fn max_width(&self) -> f64 {
        self.ranges.values().map(Interval::width).fold(0.0, f64::max)
    }
}

#[derive(Serialize, Deserialize)]
struct RangeRow {
    beacon: BeaconId,
    lo: f64,
    hi: f64,
}

impl Serialize for FeatureSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<RangeRow> = self
            .iter()
            .map(|(b, iv)| RangeRow { beacon: b.clone(), lo: iv.lo, hi: iv.hi })
            .collect();
        rows.serialize(s)
    }
}

impl<'de> Deserialize<'de> for FeatureSet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<RangeRow>::deserialize(d)?;
        let mut ranges = BTreeMap::new();
        for r in rows {
            let iv = Interval { lo: r.lo, hi: r.hi };
            if ranges.insert(r.beacon.clone(), iv).is_some() {
                return Err(serde::de::Error::custom(format!(
                    "duplicate beacon {} in feature",
                    r.beacon
                )));
            }
        }
        FeatureSet::new(ranges).map_err(serde::de::Error::custom)
    }
}

// ---------------------------------------------------------------------------
// Reference points, subareas, raw batches

#[derive(Debug, Clone, PartialEq)]
pub struct ReferencePoint {
    pub id: PointId,
    pub position: Point,
    pub vector: RssVector,
    pub subarea: Option<SubareaId>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Subarea {
    pub id: SubareaId,
    pub region: Rect,
    pub feature: FeatureSet,
}

/// Individual readings collected at one point, before averaging.
#[derive(Debug, Clone, PartialEq)]
pub struct RawSampleBatch {
    pub point: Point,
    samples: BTreeMap<BeaconId, Vec<f64>>,
}

impl RawSampleBatch {
    pub fn new(point: Point, samples: BTreeMap<BeaconId, Vec<f64>>) -> Result<Self> {
        if !point.is_finite() {
            return Err(Error::invalid("sample point must be finite"));
        }
        for (b, list) in &samples {
            if list.is_empty() {
                return Err(Error::invalid(format!("empty sample list for beacon {b}")));
            }
            for v in list {
                check_reading(b, *v)?;
            }
        }
        Ok(RawSampleBatch { point, samples })
    }

    pub fn samples(&self) -> &BTreeMap<BeaconId, Vec<f64>> {
        &self.samples
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub(crate) fn push(&mut self, beacon: BeaconId, value: f64) -> Result<()> {
        check_reading(&beacon, value)?;
        self.samples.entry(beacon).or_default().push(value);
        Ok(())
    }
}
