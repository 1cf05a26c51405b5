use std::fmt::Write;

use crate::error::Result;
use crate::segmentation::{segment_auto, AutoOutcome};
use crate::sim::{survey, Scenario};

#[derive(Debug, Clone, PartialEq)]
pub struct SegStudyRow {
    pub scenario: String,
    pub seed: u64,
    pub sigma: f64,
    pub success: bool,
    pub subareas: usize,
    pub iterations: usize,
    pub attempts: usize,
}

/// One beacon's range within one subarea; `None` when no member heard it.
#[derive(Debug, Clone, PartialEq)]
pub struct RangeRow {
    pub scenario: String,
    pub seed: u64,
    pub subarea: String,
    pub beacon: String,
    pub lo: Option<f64>,
    pub hi: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SegStudy {
    pub rows: Vec<SegStudyRow>,
    pub ranges: Vec<RangeRow>,
}

impl SegStudy {
    pub fn success_rate(&self, scenario: &str) -> Option<f64> {
        let rows: Vec<_> = self.rows.iter().filter(|r| r.scenario == scenario).collect();
        (!rows.is_empty()).then(|| rows.iter().filter(|r| r.success).count() as f64 / rows.len() as f64)
    }

    pub fn summary(&self) -> String {
        let mut names: Vec<&str> = self.rows.iter().map(|r| r.scenario.as_str()).collect();
        names.dedup();
        let mut out = String::new();
        for name in names {
            let rows: Vec<_> = self.rows.iter().filter(|r| r.scenario == name).collect();
            let ok: Vec<_> = rows.iter().filter(|r| r.success).collect();
            let _ = write!(out, "{name}: {}/{} seeds segmented", ok.len(), rows.len());
            if let (Some(lo), Some(hi)) = (
                ok.iter().map(|r| r.subareas).min(),
                ok.iter().map(|r| r.subareas).max(),
            ) {
                let _ = write!(out, ", {lo}-{hi} subareas");
            }
            out.push('\n');
        }
        out
    }
}

/// Automatic segmentation of each scenario's survey for every seed.
pub fn segmentation_study(scenarios: &[Scenario], seeds: &[u64]) -> Result<SegStudy> {
    let mut study = SegStudy::default();
    for base in scenarios {
        for &seed in seeds {
            let scenario = base.with_seed(seed);
            let mut db = survey(&scenario)?;
            let outcome = segment_auto(&mut db, &scenario.segmentation, seed)?;
            let (success, iterations, attempts) = match &outcome {
                AutoOutcome::Success { iterations, attempts, .. } => (true, *iterations, *attempts),
                AutoOutcome::Failure(r) => (false, r.iterations, r.attempts),
            };
            study.rows.push(SegStudyRow {
                scenario: scenario.name.clone(),
                seed,
                sigma: scenario.propagation.shadowing_sigma,
                success,
                subareas: db.subareas().len(),
                iterations,
                attempts,
            });
            for s in db.subareas() {
                for b in db.beacons() {
                    let iv = s.feature.get(&b.id);
                    study.ranges.push(RangeRow {
                        scenario: scenario.name.clone(),
                        seed,
                        subarea: s.id.to_string(),
                        beacon: b.id.to_string(),
                        lo: iv.map(|i| i.lo),
                        hi: iv.map(|i| i.hi),
                    });
                }
            }
        }
    }
    Ok(study)
}
