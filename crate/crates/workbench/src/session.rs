use std::sync::Arc;

use fingerzone_core::sim::{self, observe, rng::Purpose, Scenario};
use fingerzone_core::{
    commit_subarea, segment_auto, segment_manual_check, AutoOutcome, Error, FingerprintDatabase, Point, Rect,
    Result, SegmentationParams, SubareaId,
};
use serde_json::{json, Value};

use crate::walk::{WalkFeed, WalkPlan};

/// Working state of one surveyor: scenario, database, and at most one live walk.
pub struct Session {
    scenario: Scenario,
    db: FingerprintDatabase,
    collected: u64,
    walks: u64,
    walk: Option<Arc<WalkFeed>>,
}

fn db_value(db: &FingerprintDatabase) -> Value {
    serde_json::from_str(&db.to_json()).expect("database serializes to JSON")
}

impl Session {
    pub fn new(scenario: Scenario) -> Self {
        let db = scenario.empty_database();
        Session {
            scenario,
            db,
            collected: 0,
            walks: 0,
            walk: None,
        }
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn database(&self) -> &FingerprintDatabase {
        &self.db
    }

    pub fn revision(&self) -> u64 {
        self.db.revision()
    }

    fn walk_live(&self) -> bool {
        self.walk.as_ref().is_some_and(|w| !w.is_done())
    }

    /// Database document plus walls, revision and walk status.
    pub fn render(&self) -> Value {
        let mut v = db_value(&self.db);
        let obj = v.as_object_mut().expect("database document is an object");
        obj.insert("name".into(), json!(self.scenario.floorplan.name));
        obj.insert("floor".into(), json!(self.scenario.bounds()));
        obj.insert("walls".into(), json!(self.scenario.floorplan.walls));
        obj.insert("revision".into(), json!(self.db.revision()));
        obj.insert("walk_active".into(), json!(self.walk_live()));
        v
    }

    fn point_row(&self, id: &fingerzone_core::PointId) -> Value {
        let doc = db_value(&self.db);
        doc["reference_points"]
            .as_array()
            .and_then(|rows| rows.iter().find(|r| r["id"] == json!(id)))
            .cloned()
            .unwrap_or(Value::Null)
    }

    fn subarea_row(&self, id: &SubareaId) -> Value {
        let doc = db_value(&self.db);
        doc["subareas"]
            .as_array()
            .and_then(|rows| rows.iter().find(|r| r["id"] == json!(id)))
            .cloned()
            .unwrap_or(Value::Null)
    }

    pub fn collect(&mut self, at: Point) -> Result<Value> {
        if !at.is_finite() || !self.scenario.bounds().contains(&at) {
            return Err(Error::InvalidInput(format!("({}, {}) lies outside the floor", at.x, at.y)));
        }
        if self.db.reference_points().iter().any(|p| p.position == at) {
            return Err(Error::Conflict(format!("a reference point already exists at ({}, {})", at.x, at.y)));
        }
        let vector = observe(&self.scenario, &at, Purpose::Collect, self.collected)
            .ok_or_else(|| Error::InvalidInput("no beacon is audible at this position".into()))?;
        self.collected += 1;
        let id = self.db.add_reference_vector(at, vector)?;
        Ok(json!({ "point": self.point_row(&id), "revision": self.db.revision() }))
    }

    pub fn check(&self, rect: &Rect) -> Value {
        let verdict = segment_manual_check(&self.db, rect, &self.scenario.segmentation);
        let mut v = serde_json::to_value(&verdict).expect("verdict serializes");
        v["revision"] = json!(self.db.revision());
        v
    }

    pub fn commit(&mut self, rect: &Rect, revision: u64) -> Result<Value> {
        if revision != self.db.revision() {
            return Err(Error::Conflict(format!(
                "revision {revision} is stale, current revision is {}",
                self.db.revision()
            )));
        }
        let params = self.scenario.segmentation.clone();
        let verdict = segment_manual_check(&self.db, rect, &params);
        let feature = match (&verdict.feature, verdict.accepted) {
            (Some(f), true) => f.clone(),
            _ => return Err(Error::InvalidInput(format!("region rejected: {}", verdict.reason))),
        };
        let id = commit_subarea(&mut self.db, rect, &feature, revision, &params)?;
        Ok(json!({ "subarea": self.subarea_row(&id), "revision": self.db.revision() }))
    }

    pub fn auto(&mut self, params: Option<SegmentationParams>, seed: Option<u64>) -> Result<Value> {
        let params = params.unwrap_or_else(|| self.scenario.segmentation.clone());
        let seed = seed.unwrap_or(self.scenario.seed);
        Ok(match segment_auto(&mut self.db, &params, seed)? {
            AutoOutcome::Success { subareas, iterations, attempts } => json!({
                "status": "success",
                "subareas": subareas.iter().map(|id| self.subarea_row(id)).collect::<Vec<_>>(),
                "iterations": iterations,
                "attempts": attempts,
                "revision": self.db.revision(),
            }),
            AutoOutcome::Failure(report) => json!({
                "status": "failure",
                "report": report,
                "revision": self.db.revision(),
            }),
        })
    }

    pub fn start_walk(&mut self, waypoints: Option<Vec<Point>>, step: f64) -> Result<(Arc<WalkFeed>, WalkPlan)> {
        if !self.db.is_segmented() {
            return Err(Error::Conflict("the database has no subareas yet".into()));
        }
        if self.walk_live() {
            return Err(Error::Conflict("a walk is already running".into()));
        }
        let waypoints = waypoints.unwrap_or_else(|| self.scenario.walk.clone());
        let steps = sim::walk(&self.scenario, &waypoints, step)?;
        self.walks += 1;
        let feed = Arc::new(WalkFeed::new(self.walks));
        self.walk = Some(feed.clone());
        Ok((feed, WalkPlan::new(self.db.clone(), steps)))
    }

    pub fn latest_walk(&self) -> Option<Arc<WalkFeed>> {
        self.walk.clone()
    }

    /// Replaces the database; its revision starts again from zero.
    pub fn load(&mut self, db: FingerprintDatabase) -> Result<Value> {
        if self.walk_live() {
            return Err(Error::Conflict("cannot load while a walk is running".into()));
        }
        self.db = db;
        Ok(json!({
            "revision": self.db.revision(),
            "reference_points": self.db.reference_points().len(),
            "subareas": self.db.subareas().len(),
        }))
    }
}
