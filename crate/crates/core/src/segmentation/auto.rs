//! Seeded recursive bisection.
//!
//! A rectangle whose points are cohesive becomes a leaf; otherwise it is cut
//! at a jittered position inside the middle third of its longer axis (the
//! shorter axis is tried once the longer one is exhausted). A failed branch
//! retries other cuts, and a failed attempt restarts from the full extent
//! with fresh draws, all charged to one iteration budget. A final pass
//! re-splits leaves whose features are not pairwise distinct.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::feature::{feature_of_vectors, is_distinct};
use super::SegmentationParams;
use crate::error::{Error, Result};
use crate::fingerprint::{FeatureSet, FingerprintDatabase, PointId, Subarea, SubareaId};
use crate::geometry::Rect;
use crate::sim::rng::{stream, Purpose};

const CUTS_PER_AXIS: usize = 3;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LeafFailure {
    TooFewPoints,
    BelowMinCell,
    NotCohesive,
    /// Index into the failing attempt's leaf list.
    NotDistinctFrom(usize),
}

impl Serialize for LeafFailure {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            LeafFailure::TooFewPoints => s.serialize_str("too-few-points"),
            LeafFailure::BelowMinCell => s.serialize_str("below-min-cell"),
            LeafFailure::NotCohesive => s.serialize_str("not-cohesive"),
            LeafFailure::NotDistinctFrom(i) => s.collect_str(&format_args!("not-distinct-from:{i}")),
        }
    }
}

impl<'de> Deserialize<'de> for LeafFailure {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        match s.as_str() {
            "too-few-points" => Ok(LeafFailure::TooFewPoints),
            "below-min-cell" => Ok(LeafFailure::BelowMinCell),
            "not-cohesive" => Ok(LeafFailure::NotCohesive),
            _ => s
                .strip_prefix("not-distinct-from:")
                .and_then(|i| i.parse().ok())
                .map(LeafFailure::NotDistinctFrom)
                .ok_or_else(|| serde::de::Error::custom(format!("unknown leaf failure `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailedLeaf {
    pub rect: Rect,
    pub reason: LeafFailure,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailureReport {
    pub iterations: usize,
    pub attempts: usize,
    /// Offending leaves of the last attempt.
    pub leaves: Vec<FailedLeaf>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlannedLeaf {
    pub rect: Rect,
    pub members: Vec<PointId>,
    pub feature: FeatureSet,
}

#[derive(Debug, Clone, PartialEq)]
pub enum AutoPlan {
    Success { leaves: Vec<PlannedLeaf>, iterations: usize, attempts: usize },
    Failure(FailureReport),
}

#[derive(Debug, Clone, PartialEq)]
pub enum AutoOutcome {
    Success { subareas: Vec<SubareaId>, iterations: usize, attempts: usize },
    Failure(FailureReport),
}

impl AutoOutcome {
    pub fn is_success(&self) -> bool {
        matches!(self, AutoOutcome::Success { .. })
    }
}

// ---------------------------------------------------------------------------

struct Leaf {
    rect: Rect,
    idx: Vec<usize>,
    feature: FeatureSet,
}

enum Stop {
    Budget,
    Offense(Vec<FailedLeaf>),
}

struct Search<'a> {
    db: &'a FingerprintDatabase,
    params: &'a SegmentationParams,
    rng: ChaCha8Rng,
    used: usize,
}

impl Search<'_> {
    fn tick(&mut self) -> std::result::Result<(), Stop> {
        if self.used >= self.params.max_iterations {
            return Err(Stop::Budget);
        }
        self.used += 1;
        Ok(())
    }

    fn feature(&self, idx: &[usize]) -> FeatureSet {
        let pts = self.db.reference_points();
        feature_of_vectors(idx.iter().map(|&i| &pts[i].vector)).expect("non-empty index set")
    }

    fn divide(&mut self, rect: Rect, idx: Vec<usize>) -> std::result::Result<Vec<Leaf>, Stop> {
        self.tick()?;
        if idx.is_empty() {
            return Ok(Vec::new());
        }
        if idx.len() < self.params.min_points_per_subarea {
            return Err(offense(rect, LeafFailure::TooFewPoints));
        }
        let feature = self.feature(&idx);
        if feature.max_width() <= self.params.max_range_width {
            return Ok(vec![Leaf { rect, idx, feature }]);
        }
        self.split(rect, &idx, LeafFailure::NotCohesive)
    }

    fn split(&mut self, rect: Rect, idx: &[usize], why: LeafFailure) -> std::result::Result<Vec<Leaf>, Stop> {
        let mut last = offense(rect, why);
        let axes = if rect.width() >= rect.height() { [0, 1] } else { [1, 0] };
        for axis in axes {
            let (lo, hi) = if axis == 0 { (rect.x0, rect.x1) } else { (rect.y0, rect.y1) };
            for _ in 0..CUTS_PER_AXIS {
                self.tick()?;
                let u: f64 = self.rng.random();
                let cut = lo + (hi - lo) * (1.0 + u) / 3.0;
                if cut - lo < self.params.min_cell_size || hi - cut < self.params.min_cell_size {
                    last = offense(rect, LeafFailure::BelowMinCell);
                    continue;
                }
                let pts = self.db.reference_points();
                let coord = |i: usize| if axis == 0 { pts[i].position.x } else { pts[i].position.y };
                let (left, right): (Vec<usize>, Vec<usize>) = idx.iter().partition(|&&i| coord(i) <= cut);
                let (lrect, rrect) = if axis == 0 {
                    (
                        Rect { x1: cut, ..rect },
                        Rect { x0: cut, ..rect },
                    )
                } else {
                    (
                        Rect { y1: cut, ..rect },
                        Rect { y0: cut, ..rect },
                    )
                };
                let min = self.params.min_points_per_subarea;
                if let Some(r) = [(lrect, &left), (rrect, &right)]
                    .iter()
                    .find(|(_, s)| !s.is_empty() && s.len() < min)
                {
                    last = offense(r.0, LeafFailure::TooFewPoints);
                    continue;
                }
                let mut leaves = match self.divide(lrect, left) {
                    Ok(l) => l,
                    Err(Stop::Budget) => return Err(Stop::Budget),
                    Err(o) => {
                        last = o;
                        continue;
                    }
                };
                match self.divide(rrect, right) {
                    Ok(r) => {
                        leaves.extend(r);
                        return Ok(leaves);
                    }
                    Err(Stop::Budget) => return Err(Stop::Budget),
                    Err(o) => last = o,
                }
            }
        }
        Err(last)
    }

    fn distinct_pass(&mut self, mut leaves: Vec<Leaf>) -> std::result::Result<Vec<Leaf>, Stop> {
        let margin = self.params.distinct_margin;
        loop {
            let pair = (0..leaves.len())
                .flat_map(|i| (i + 1..leaves.len()).map(move |j| (i, j)))
                .find(|&(i, j)| !is_distinct(&leaves[i].feature, &leaves[j].feature, margin));
            let Some((i, j)) = pair else {
                return Ok(leaves);
            };
            // larger leaf first
            let order = if leaves[j].rect.area() > leaves[i].rect.area() { [j, i] } else { [i, j] };
            let mut replaced = false;
            for k in order {
                let other = if k == i { j } else { i };
                let rect = leaves[k].rect;
                let idx = leaves[k].idx.clone();
                match self.split(rect, &idx, LeafFailure::NotDistinctFrom(other)) {
                    Ok(children) => {
                        leaves.splice(k..=k, children);
                        replaced = true;
                        break;
                    }
                    Err(Stop::Budget) => return Err(Stop::Budget),
                    Err(Stop::Offense(_)) => {}
                }
            }
            if !replaced {
                return Err(Stop::Offense(vec![
                    FailedLeaf { rect: leaves[i].rect, reason: LeafFailure::NotDistinctFrom(j) },
                    FailedLeaf { rect: leaves[j].rect, reason: LeafFailure::NotDistinctFrom(i) },
                ]));
            }
        }
    }
}

fn offense(rect: Rect, reason: LeafFailure) -> Stop {
    Stop::Offense(vec![FailedLeaf { rect, reason }])
}

/// Computes an automatic segmentation without touching the database.
pub fn plan_auto(db: &FingerprintDatabase, params: &SegmentationParams, seed: u64) -> Result<AutoPlan> {
    params.validate()?;
    let n = db.reference_points().len();
    if n == 0 || n < params.min_points_per_subarea {
        return Err(Error::invalid(format!(
            "automatic segmentation needs at least {} reference points, found {n}",
            params.min_points_per_subarea.max(1)
        )));
    }
    let extent = db.extent().expect("points exist");
    let mut search = Search {
        db,
        params,
        rng: stream(seed, Purpose::Segmentation, 0, 0),
        used: 0,
    };
    let mut attempts = 0;
    let mut last = Vec::new();
    loop {
        attempts += 1;
        let result = search
            .divide(extent, (0..n).collect())
            .and_then(|leaves| search.distinct_pass(leaves));
        match result {
            Ok(mut leaves) => {
                leaves.sort_by(|a, b| {
                    (a.rect.y0, a.rect.x0)
                        .partial_cmp(&(b.rect.y0, b.rect.x0))
                        .expect("finite coordinates")
                });
                let pts = db.reference_points();
                let leaves = leaves
                    .into_iter()
                    .map(|l| PlannedLeaf {
                        rect: l.rect,
                        members: l.idx.iter().map(|&i| pts[i].id.clone()).collect(),
                        feature: l.feature,
                    })
                    .collect();
                return Ok(AutoPlan::Success { leaves, iterations: search.used, attempts });
            }
            Err(Stop::Offense(o)) => last = o,
            Err(Stop::Budget) => {
                return Ok(AutoPlan::Failure(FailureReport {
                    iterations: search.used,
                    attempts,
                    leaves: last,
                }))
            }
        }
    }
}

/// Runs [`plan_auto`] and, on success, replaces the database's segmentation
/// with the planned subareas in one step. On failure nothing changes.
pub fn segment_auto(db: &mut FingerprintDatabase, params: &SegmentationParams, seed: u64) -> Result<AutoOutcome> {
    match plan_auto(db, params, seed)? {
        AutoPlan::Failure(r) => Ok(AutoOutcome::Failure(r)),
        AutoPlan::Success { leaves, iterations, attempts } => {
            let ids: Vec<SubareaId> = (1..=leaves.len()).map(|n| SubareaId(format!("A{n:02}"))).collect();
            for p in db.reference_points.iter_mut() {
                p.subarea = leaves
                    .iter()
                    .zip(&ids)
                    .find(|(l, _)| l.members.contains(&p.id))
                    .map(|(_, id)| id.clone());
            }
            db.subareas = leaves
                .into_iter()
                .zip(&ids)
                .map(|(l, id)| Subarea { id: id.clone(), region: l.rect, feature: l.feature })
                .collect();
            db.bump();
            Ok(AutoOutcome::Success { subareas: ids, iterations, attempts })
        }
    }
}
