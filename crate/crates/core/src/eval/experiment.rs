use std::fmt;

use super::config::{ExperimentConfig, MethodSpec, SegmentationMode};
use crate::error::{Error, Result};
use crate::estimator::{
    estimate_3nnf, estimate_knn, estimate_rbf, estimate_tracked, train_rbf, EstimationResult,
    TrackingParams,
};
use crate::fingerprint::{FingerprintDatabase, RssVector, Subarea, SubareaId};
use crate::geometry::Point;
use crate::segmentation::{commit_subarea, feature_of, segment_auto, segment_manual_check};
use crate::sim::{survey, test_queries, walk, Scenario};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Ok,
    SegmentationFailed,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Outcome::Ok => "ok",
            Outcome::SegmentationFailed => "segmentation-failed",
        })
    }
}

impl std::str::FromStr for Outcome {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ok" => Ok(Outcome::Ok),
            "segmentation-failed" => Ok(Outcome::SegmentationFailed),
            _ => Err(Error::invalid(format!("unknown outcome `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricsRow {
    pub scenario: String,
    /// Floor size as `W x H` in meters.
    pub area: String,
    pub method: String,
    pub m: usize,
    pub seed: u64,
    pub outcome: Outcome,
    pub subareas: usize,
    pub mean_error: Option<f64>,
    pub median_error: Option<f64>,
    pub max_error: Option<f64>,
    /// Per-query Euclidean errors in meters, in query order.
    pub errors: Vec<f64>,
    /// Fraction of queries whose identified subarea contains the true position.
    pub hit_rate: Option<f64>,
    pub candidates_mean: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SegmentationSummary {
    pub success: bool,
    pub subareas: usize,
    pub rejected_regions: usize,
}

pub(crate) fn median(xs: &[f64]) -> Option<f64> {
    if xs.is_empty() {
        return None;
    }
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    Some(if n % 2 == 1 { v[n / 2] } else { (v[n / 2 - 1] + v[n / 2]) / 2.0 })
}

fn mean(xs: &[f64]) -> Option<f64> {
    (!xs.is_empty()).then(|| xs.iter().sum::<f64>() / xs.len() as f64)
}

/// Segments `db` in place according to `mode`.
pub fn apply_segmentation(
    db: &mut FingerprintDatabase,
    scenario: &Scenario,
    mode: &SegmentationMode,
    seed: u64,
) -> Result<SegmentationSummary> {
    let params = &scenario.segmentation;
    match mode {
        SegmentationMode::Auto => {
            let out = segment_auto(db, params, seed)?;
            Ok(SegmentationSummary {
                success: out.is_success(),
                subareas: db.subareas().len(),
                rejected_regions: 0,
            })
        }
        SegmentationMode::Manual => {
            let mut rejected = 0;
            for region in &scenario.manual_regions {
                let verdict = segment_manual_check(db, region, params);
                match verdict.feature {
                    Some(f) if verdict.accepted => {
                        let rev = db.revision();
                        commit_subarea(db, region, &f, rev, params)?;
                    }
                    _ => rejected += 1,
                }
            }
            Ok(SegmentationSummary {
                success: db.is_segmented(),
                subareas: db.subareas().len(),
                rejected_regions: rejected,
            })
        }
        SegmentationMode::None => {
            db.clear_segmentation();
            let region = db.extent().ok_or_else(|| Error::invalid("database has no extent"))?;
            let feature = feature_of(db.reference_points())?;
            let id = SubareaId::from("A01");
            for p in db.reference_points.iter_mut() {
                p.subarea = Some(id.clone());
            }
            db.subareas.push(Subarea { id, region, feature });
            db.bump();
            Ok(SegmentationSummary {
                success: true,
                subareas: 1,
                rejected_regions: 0,
            })
        }
    }
}

fn hit(db: &FingerprintDatabase, r: &EstimationResult, truth: &Point) -> bool {
    r.subarea
        .as_ref()
        .and_then(|id| db.subarea(id))
        .is_some_and(|s| s.region.contains(truth))
}

struct Run<'a> {
    config: &'a ExperimentConfig,
    scenario: Scenario,
    seed: u64,
    m: usize,
    base: FingerprintDatabase,
    segmented: FingerprintDatabase,
    summary: SegmentationSummary,
    queries: Vec<(Point, RssVector)>,
}

impl Run<'_> {
    fn row(&self, method: MethodSpec, errors: Vec<f64>, hits: Option<f64>, cands: Option<f64>) -> MetricsRow {
        let b = self.scenario.bounds();
        MetricsRow {
            scenario: self.scenario.name.clone(),
            area: format!("{} x {}", b.width(), b.height()),
            method: method.to_string(),
            m: self.m,
            seed: self.seed,
            outcome: Outcome::Ok,
            subareas: self.summary.subareas,
            mean_error: mean(&errors),
            median_error: median(&errors),
            max_error: errors.iter().copied().reduce(f64::max),
            errors,
            hit_rate: hits,
            candidates_mean: cands,
        }
    }

    fn failed(&self, method: MethodSpec) -> MetricsRow {
        let mut r = self.row(method, Vec::new(), None, None);
        r.outcome = Outcome::SegmentationFailed;
        r
    }

    fn evaluate(&self, method: MethodSpec) -> Result<MetricsRow> {
        let est = &self.config.estimator;
        match method {
            MethodSpec::Nnf3 => {
                if !self.summary.success {
                    return Ok(self.failed(method));
                }
                let mut errors = Vec::with_capacity(self.queries.len());
                let mut hits = 0usize;
                let mut cands = Vec::new();
                for (truth, v) in &self.queries {
                    let r = estimate_3nnf(&self.segmented, v, est)?;
                    errors.push(r.position.distance(truth));
                    hits += usize::from(hit(&self.segmented, &r, truth));
                    cands.push(r.candidates as f64);
                }
                let n = self.queries.len().max(1) as f64;
                Ok(self.row(method, errors, Some(hits as f64 / n), mean(&cands)))
            }
            MethodSpec::Knn(k) => {
                let errors = self
                    .queries
                    .iter()
                    .map(|(truth, v)| estimate_knn(&self.base, v, k).map(|r| r.position.distance(truth)))
                    .collect::<Result<Vec<f64>>>()?;
                Ok(self.row(method, errors, None, None))
            }
            MethodSpec::Rbf => {
                let model = train_rbf(&self.base, &self.config.rbf)?;
                let errors = self
                    .queries
                    .iter()
                    .map(|(truth, v)| estimate_rbf(&model, v).position.distance(truth))
                    .collect();
                Ok(self.row(method, errors, None, None))
            }
            MethodSpec::Track => {
                if !self.summary.success {
                    return Ok(self.failed(method));
                }
                if self.scenario.walk.is_empty() {
                    return Err(Error::invalid("tracking runs need a walk in the scenario"));
                }
                let steps = walk(&self.scenario, &self.scenario.walk, self.config.walk_step)?;
                let db = &self.segmented;
                let tp = TrackingParams::for_database(db, est.margin);
                let mut prev: Option<EstimationResult> = None;
                let (mut errors, mut cands, mut hits) = (Vec::new(), Vec::new(), 0usize);
                for s in &steps {
                    let r = match &prev {
                        None => {
                            let mut r = estimate_3nnf(db, &s.vector, est)?;
                            r.candidates = db.reference_points().len();
                            r
                        }
                        Some(p) => estimate_tracked(db, &s.vector, p, &tp)?,
                    };
                    errors.push(r.position.distance(&s.position));
                    cands.push(r.candidates as f64);
                    hits += usize::from(hit(db, &r, &s.position));
                    prev = Some(r);
                }
                let n = steps.len().max(1) as f64;
                Ok(self.row(method, errors, Some(hits as f64 / n), mean(&cands)))
            }
        }
    }
}

/// Survey, segment and estimate every test point for each (seed, m, method).
/// Rows come back sorted by (method, m, seed).
pub fn run_experiment(config: &ExperimentConfig) -> Result<Vec<MetricsRow>> {
    config.validate()?;
    let mut rows = Vec::new();
    for &seed in &config.seeds {
        for m in config.m_list() {
            let scenario = config.scenario.with_seed(seed).with_reference_count(m);
            let base = survey(&scenario)?;
            let mut segmented = base.clone();
            let needs_segments = config
                .methods
                .iter()
                .any(|m| matches!(m, MethodSpec::Nnf3 | MethodSpec::Track));
            let summary = if needs_segments {
                apply_segmentation(&mut segmented, &scenario, &config.segmentation, seed)?
            } else {
                SegmentationSummary { success: false, subareas: 0, rejected_regions: 0 }
            };
            let queries = test_queries(&scenario);
            let run = Run {
                config,
                m: base.reference_points().len(),
                scenario,
                seed,
                base,
                segmented,
                summary,
                queries,
            };
            for &method in &config.methods {
                rows.push(run.evaluate(method)?);
            }
        }
    }
    rows.sort_by(|a, b| (&a.method, a.m, a.seed).cmp(&(&b.method, b.m, b.seed)));
    Ok(rows)
}

pub fn sweep_reference_points(config: &ExperimentConfig) -> Result<Vec<MetricsRow>> {
    if config.m_values.len() < 2 {
        return Err(Error::invalid("a sweep needs at least two reference-point counts"));
    }
    run_experiment(config)
}
