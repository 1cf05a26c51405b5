use super::propagation::sample_rss;
use super::rng::{stream, Purpose};
use super::scenario::Scenario;
use crate::error::{Error, Result};
use crate::fingerprint::{FingerprintDatabase, RssVector};
use crate::geometry::Point;

/// One averaged observation at `point`: `samples_per_reading` draws per
/// beacon from the stream `(purpose, index, beacon)`. Beacons whose average
/// sits at the floor value are out of range and omitted.
pub fn observe(scenario: &Scenario, point: &Point, purpose: Purpose, index: u64) -> Option<RssVector> {
    let p = &scenario.propagation;
    let n = p.samples_per_reading.max(1);
    let readings = scenario
        .beacons
        .iter()
        .enumerate()
        .filter_map(|(bi, beacon)| {
            let mut rng = stream(scenario.seed, purpose, index, bi as u64);
            let total: f64 = (0..n)
                .map(|_| sample_rss(&scenario.floorplan, p, beacon, point, &mut rng))
                .sum();
            let avg = total / n as f64;
            (avg > p.floor_value).then(|| (beacon.id.clone(), avg))
        })
        .collect();
    RssVector::new(readings).ok()
}

pub fn survey(scenario: &Scenario) -> Result<FingerprintDatabase> {
    survey_positions(scenario, &scenario.reference_positions())
}

pub fn survey_positions(scenario: &Scenario, positions: &[Point]) -> Result<FingerprintDatabase> {
    scenario.validate()?;
    let mut db = scenario.empty_database();
    for (i, pt) in positions.iter().enumerate() {
        let v = observe(scenario, pt, Purpose::Survey, i as u64)
            .ok_or_else(|| Error::invalid(format!("no beacon audible at ({}, {})", pt.x, pt.y)))?;
        db.add_reference_vector(*pt, v)?;
    }
    db.revision = 0;
    Ok(db)
}

/// Test positions with their observations, drawn from the query streams.
pub fn test_queries(scenario: &Scenario) -> Vec<(Point, RssVector)> {
    scenario
        .test_positions()
        .into_iter()
        .enumerate()
        .filter_map(|(i, p)| observe(scenario, &p, Purpose::Query, i as u64).map(|v| (p, v)))
        .collect()
}
