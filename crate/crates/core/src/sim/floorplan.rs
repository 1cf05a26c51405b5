use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{segments_cross, Point, Rect};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Wall {
    pub from: Point,
    pub to: Point,
    /// Penetration loss in dB (RSS units).
    pub attenuation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Floorplan {
    pub name: String,
    pub bounds: Rect,
    #[serde(default)]
    pub walls: Vec<Wall>,
}

impl Floorplan {
    pub fn validate(&self) -> Result<()> {
        for (i, w) in self.walls.iter().enumerate() {
            if !w.from.is_finite() || !w.to.is_finite() {
                return Err(Error::invalid(format!("walls[{i}]: endpoints must be finite")));
            }
            if !(w.attenuation.is_finite() && w.attenuation >= 0.0) {
                return Err(Error::invalid(format!("walls[{i}]: attenuation must be >= 0")));
            }
        }
        Ok(())
    }

    /// Summed attenuation of the walls strictly crossed by the segment `a -> b`.
    pub fn attenuation_between(&self, a: &Point, b: &Point) -> f64 {
        self.walls
            .iter()
            .filter(|w| segments_cross(a, b, &w.from, &w.to))
            .map(|w| w.attenuation)
            .sum()
    }
}
