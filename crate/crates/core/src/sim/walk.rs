use std::io::Write;

use super::rng::Purpose;
use super::scenario::Scenario;
use super::survey::observe;
use crate::error::{Error, Result};
use crate::fingerprint::RssVector;
use crate::geometry::Point;

#[derive(Debug, Clone, PartialEq)]
pub struct WalkStep {
    pub t: usize,
    pub position: Point,
    pub vector: RssVector,
}

/// Positions every `step` meters along the polyline, always including each
/// waypoint.
pub fn walk_positions(waypoints: &[Point], step: f64) -> Result<Vec<Point>> {
    if waypoints.is_empty() {
        return Err(Error::invalid("a walk needs at least one waypoint"));
    }
    if !(step.is_finite() && step > 0.0) {
        return Err(Error::invalid("walk step must be positive"));
    }
    let mut out = vec![waypoints[0]];
    for pair in waypoints.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        let len = a.distance(&b);
        if len == 0.0 {
            continue;
        }
        let n = (len / step + 1e-9).floor() as usize;
        for k in 1..=n {
            let f = (k as f64 * step / len).min(1.0);
            out.push(Point::new(a.x + (b.x - a.x) * f, a.y + (b.y - a.y) * f));
        }
        if (n as f64) * step < len - 1e-9 {
            out.push(b);
        }
    }
    Ok(out)
}

pub fn walk(scenario: &Scenario, waypoints: &[Point], step: f64) -> Result<Vec<WalkStep>> {
    let b = scenario.bounds();
    if let Some(i) = waypoints.iter().position(|p| !p.is_finite() || !b.contains(p)) {
        return Err(Error::invalid(format!("waypoint {i} lies outside the floor bounds")));
    }
    walk_positions(waypoints, step)?
        .into_iter()
        .enumerate()
        .map(|(t, position)| {
            observe(scenario, &position, Purpose::Walk, t as u64)
                .map(|vector| WalkStep { t, position, vector })
                .ok_or_else(|| Error::invalid(format!("no beacon audible at step {t}")))
        })
        .collect()
}

/// Writes `t x y beacon_id rss`, one reading per line.
pub fn export_trace<W: Write>(steps: &[WalkStep], mut out: W) -> Result<()> {
    writeln!(out, "# t x y beacon_id rss")?;
    for s in steps {
        for (b, rss) in s.vector.iter() {
            writeln!(out, "{} {} {} {} {}", s.t, s.position.x, s.position.y, b, rss)?;
        }
    }
    Ok(())
}
