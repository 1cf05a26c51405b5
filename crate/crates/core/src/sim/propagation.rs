use rand::RngCore;
use serde::{Deserialize, Serialize};

use super::floorplan::Floorplan;
use super::rng::standard_normal;
use crate::error::{Error, Result};
use crate::fingerprint::BeaconNode;
use crate::geometry::Point;

const MIN_DISTANCE: f64 = 0.1;

/// Log-distance path loss with wall penetration and Gaussian shadowing,
/// on the non-negative magnitude scale (reference distance 1 m).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PropagationParams {
    pub rss_at_d0: f64,
    pub path_loss_exponent: f64,
    pub shadowing_sigma: f64,
    pub floor_value: f64,
    pub samples_per_reading: usize,
}

impl Default for PropagationParams {
    fn default() -> Self {
        PropagationParams {
            rss_at_d0: 90.0,
            path_loss_exponent: 2.0,
            shadowing_sigma: 0.0,
            floor_value: 0.0,
            samples_per_reading: 10,
        }
    }
}

impl PropagationParams {
    pub fn validate(&self) -> Result<()> {
        let all_finite = [self.rss_at_d0, self.path_loss_exponent, self.shadowing_sigma, self.floor_value]
            .iter()
            .all(|v| v.is_finite());
        if !all_finite {
            return Err(Error::invalid("propagation parameters must be finite"));
        }
        if self.path_loss_exponent <= 0.0 {
            return Err(Error::invalid("path_loss_exponent must be positive"));
        }
        if self.shadowing_sigma < 0.0 {
            return Err(Error::invalid("shadowing_sigma must be non-negative"));
        }
        if self.floor_value < 0.0 || self.rss_at_d0 <= self.floor_value {
            return Err(Error::invalid("need 0 <= floor_value < rss_at_d0"));
        }
        if self.samples_per_reading == 0 {
            return Err(Error::invalid("samples_per_reading must be at least 1"));
        }
        Ok(())
    }
}

pub fn mean_rss(fp: &Floorplan, p: &PropagationParams, beacon: &BeaconNode, point: &Point) -> f64 {
    let d = beacon.position.distance(point).max(MIN_DISTANCE);
    let walls = fp.attenuation_between(&beacon.position, point);
    let rss = p.rss_at_d0 - 10.0 * p.path_loss_exponent * d.log10() - walls;
    rss.max(p.floor_value)
}

pub fn sample_rss<R: RngCore>(
    fp: &Floorplan,
    p: &PropagationParams,
    beacon: &BeaconNode,
    point: &Point,
    rng: &mut R,
) -> f64 {
    let m = mean_rss(fp, p, beacon, point);
    if p.shadowing_sigma == 0.0 {
        return m;
    }
    (m + p.shadowing_sigma * standard_normal(rng)).max(p.floor_value)
}
