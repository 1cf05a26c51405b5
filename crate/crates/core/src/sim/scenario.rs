use serde::{Deserialize, Serialize};

use super::floorplan::Floorplan;
use super::propagation::PropagationParams;
use super::rng::{stream, unit, Purpose};
use crate::error::{Error, Result};
use crate::fingerprint::{BeaconNode, DbMeta, FingerprintDatabase};
use crate::geometry::{Point, Rect};
use crate::segmentation::SegmentationParams;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Placement {
    /// Cell-centred uniform grid of exactly `count` points.
    Grid { count: usize },
    /// Uniform random positions drawn from the scenario seed.
    Random { count: usize },
    Points(Vec<Point>),
}

impl Placement {
    pub fn count(&self) -> usize {
        match self {
            Placement::Grid { count } | Placement::Random { count } => *count,
            Placement::Points(p) => p.len(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    pub floorplan: Floorplan,
    pub beacons: Vec<BeaconNode>,
    #[serde(default)]
    pub propagation: PropagationParams,
    pub reference_grid: Placement,
    pub test_points: Placement,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub segmentation: SegmentationParams,
    #[serde(default)]
    pub manual_regions: Vec<Rect>,
    #[serde(default)]
    pub walk: Vec<Point>,
}

/// Column/row counts whose product is `m` and whose aspect ratio is closest
/// (in log scale) to the floor's.
pub fn grid_layout(m: usize, bounds: &Rect) -> (usize, usize) {
    let target = (bounds.width() / bounds.height()).ln();
    let mut best = (m, 1);
    let mut best_err = f64::INFINITY;
    for cols in 1..=m {
        if m % cols != 0 {
            continue;
        }
        let rows = m / cols;
        let err = ((cols as f64 / rows as f64).ln() - target).abs();
        if err < best_err {
            best = (cols, rows);
            best_err = err;
        }
    }
    best
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self> {
        let s: Scenario = serde_json::from_str(text).map_err(|e| Error::from_json(&e))?;
        s.validate()?;
        Ok(s)
    }

    pub fn to_json(&self) -> String {
        let v = serde_json::to_value(self).expect("scenario is representable");
        let mut s = serde_json::to_string_pretty(&v).expect("value is representable");
        s.push('\n');
        s
    }

    pub fn validate(&self) -> Result<()> {
        self.floorplan.validate()?;
        self.propagation.validate()?;
        self.segmentation.validate()?;
        let b = self.floorplan.bounds;
        for (i, n) in self.beacons.iter().enumerate() {
            if !n.position.is_finite() || !b.contains(&n.position) {
                return Err(Error::invalid(format!("beacons[{i}]: must lie inside the floor bounds")));
            }
            if self.beacons[..i].iter().any(|o| o.id == n.id) {
                return Err(Error::invalid(format!("beacons[{i}]: duplicate id {}", n.id)));
            }
        }
        if self.beacons.is_empty() {
            return Err(Error::invalid("a scenario needs at least one beacon"));
        }
        if self.reference_grid.count() < 3 {
            return Err(Error::invalid("a scenario needs at least 3 reference points"));
        }
        let check_points = |what: &str, pts: &[Point]| -> Result<()> {
            match pts.iter().position(|p| !p.is_finite() || !b.contains(p)) {
                Some(i) => Err(Error::invalid(format!("{what}[{i}]: must lie inside the floor bounds"))),
                None => Ok(()),
            }
        };
        if let Placement::Points(p) = &self.reference_grid {
            check_points("reference_grid", p)?;
        }
        if let Placement::Points(p) = &self.test_points {
            check_points("test_points", p)?;
        }
        check_points("walk", &self.walk)?;
        Ok(())
    }

    pub fn bounds(&self) -> Rect {
        self.floorplan.bounds
    }

    pub fn with_seed(&self, seed: u64) -> Scenario {
        Scenario { seed, ..self.clone() }
    }

    pub fn with_sigma(&self, sigma: f64) -> Scenario {
        let mut s = self.clone();
        s.propagation.shadowing_sigma = sigma;
        s
    }

    /// Replaces a grid or random placement count; explicit lists are kept.
    pub fn with_reference_count(&self, m: usize) -> Scenario {
        let mut s = self.clone();
        s.reference_grid = match &self.reference_grid {
            Placement::Grid { .. } => Placement::Grid { count: m },
            Placement::Random { .. } => Placement::Random { count: m },
            p @ Placement::Points(_) => p.clone(),
        };
        s
    }

    pub fn reference_positions(&self) -> Vec<Point> {
        self.place(&self.reference_grid, 0, &[])
    }

    /// Test positions; never coincide with a reference position.
    pub fn test_positions(&self) -> Vec<Point> {
        let refs = self.reference_positions();
        self.place(&self.test_points, 1, &refs)
    }

    fn place(&self, rule: &Placement, stream_index: u64, avoid: &[Point]) -> Vec<Point> {
        let b = self.bounds();
        match rule {
            Placement::Points(p) => p.clone(),
            Placement::Grid { count } => {
                let (cols, rows) = grid_layout(*count, &b);
                let (dx, dy) = (b.width() / cols as f64, b.height() / rows as f64);
                (0..rows)
                    .flat_map(|j| {
                        (0..cols).map(move |i| {
                            Point::new(b.x0 + (i as f64 + 0.5) * dx, b.y0 + (j as f64 + 0.5) * dy)
                        })
                    })
                    .collect()
            }
            Placement::Random { count } => {
                let mut rng = stream(self.seed, Purpose::Placement, stream_index, 0);
                let mut out = Vec::with_capacity(*count);
                while out.len() < *count {
                    let p = Point::new(b.x0 + unit(&mut rng) * b.width(), b.y0 + unit(&mut rng) * b.height());
                    if !avoid.contains(&p) {
                        out.push(p);
                    }
                }
                out
            }
        }
    }

    /// An empty database carrying this scenario's bounds and beacons.
    pub fn empty_database(&self) -> FingerprintDatabase {
        FingerprintDatabase::new(DbMeta::new(self.name.clone()), Some(self.bounds()), self.beacons.clone())
            .expect("validated scenario yields a valid database")
    }
}
