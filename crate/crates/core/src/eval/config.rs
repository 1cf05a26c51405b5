use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::estimator::{EstimatorParams, RbfParams};
use crate::sim::Scenario;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MethodSpec {
    Nnf3,
    Knn(usize),
    Rbf,
    /// Tracking-mode estimates along the scenario's walk.
    Track,
}

impl fmt::Display for MethodSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MethodSpec::Nnf3 => f.write_str("3NNF"),
            MethodSpec::Knn(k) => write!(f, "KNN({k})"),
            MethodSpec::Rbf => f.write_str("RBF"),
            MethodSpec::Track => f.write_str("3NNF-TRACK"),
        }
    }
}

impl FromStr for MethodSpec {
    type Err = Error;

    /// Accepts `3nnf`, `rbf`, `track`, `knn` (k = 2), `knnK`, `knn(K)` and
    /// `Knn` spellings, case-insensitively.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_lowercase();
        match t.as_str() {
            "3nnf" | "nnf" => return Ok(MethodSpec::Nnf3),
            "rbf" => return Ok(MethodSpec::Rbf),
            "track" | "3nnf-track" => return Ok(MethodSpec::Track),
            "knn" => return Ok(MethodSpec::Knn(2)),
            _ => {}
        }
        let k = if let Some(rest) = t.strip_prefix("knn") {
            rest.trim_start_matches('(').trim_end_matches(')')
        } else if let Some(rest) = t.strip_suffix("nn") {
            rest
        } else {
            ""
        };
        match k.parse::<usize>() {
            Ok(k) if k >= 1 => Ok(MethodSpec::Knn(k)),
            _ => Err(Error::invalid(format!("unknown method `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SegmentationMode {
    Auto,
    /// The scenario's manual regions, checked and committed in order.
    Manual,
    /// One subarea spanning the whole floor.
    None,
}

impl FromStr for SegmentationMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "auto" => Ok(SegmentationMode::Auto),
            "manual" => Ok(SegmentationMode::Manual),
            "none" => Ok(SegmentationMode::None),
            _ => Err(Error::invalid(format!("unknown segmentation mode `{s}`"))),
        }
    }
}

impl fmt::Display for SegmentationMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SegmentationMode::Auto => "auto",
            SegmentationMode::Manual => "manual",
            SegmentationMode::None => "none",
        })
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub scenario: Scenario,
    pub methods: Vec<MethodSpec>,
    pub segmentation: SegmentationMode,
    pub seeds: Vec<u64>,
    /// Reference-point counts; empty means the scenario's own count.
    pub m_values: Vec<usize>,
    pub estimator: EstimatorParams,
    pub rbf: RbfParams,
    pub walk_step: f64,
}

impl ExperimentConfig {
    /// Defaults: manual segmentation when the scenario defines regions,
    /// automatic otherwise.
    pub fn new(scenario: Scenario, methods: Vec<MethodSpec>, seeds: Vec<u64>) -> Self {
        let segmentation = if scenario.manual_regions.is_empty() {
            SegmentationMode::Auto
        } else {
            SegmentationMode::Manual
        };
        ExperimentConfig {
            scenario,
            methods,
            segmentation,
            seeds,
            m_values: Vec::new(),
            estimator: EstimatorParams::default(),
            rbf: RbfParams::default(),
            walk_step: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.methods.is_empty() {
            return Err(Error::invalid("at least one method is required"));
        }
        if self.seeds.is_empty() {
            return Err(Error::invalid("at least one seed is required"));
        }
        if self.m_values.iter().any(|&m| m < 3) {
            return Err(Error::invalid("reference-point counts must be at least 3"));
        }
        if !(self.walk_step.is_finite() && self.walk_step > 0.0) {
            return Err(Error::invalid("walk step must be positive"));
        }
        self.scenario.validate()
    }

    pub fn m_list(&self) -> Vec<usize> {
        if self.m_values.is_empty() {
            vec![self.scenario.reference_grid.count()]
        } else {
            self.m_values.clone()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn method_parsing() {
        assert_eq!("3nnf".parse::<MethodSpec>().unwrap(), MethodSpec::Nnf3);
        assert_eq!("3NNF".parse::<MethodSpec>().unwrap(), MethodSpec::Nnf3);
        assert_eq!("knn".parse::<MethodSpec>().unwrap(), MethodSpec::Knn(2));
        assert_eq!("knn3".parse::<MethodSpec>().unwrap(), MethodSpec::Knn(3));
        assert_eq!("KNN(2)".parse::<MethodSpec>().unwrap(), MethodSpec::Knn(2));
        assert_eq!("2nn".parse::<MethodSpec>().unwrap(), MethodSpec::Knn(2));
        assert_eq!("rbf".parse::<MethodSpec>().unwrap(), MethodSpec::Rbf);
        assert_eq!("track".parse::<MethodSpec>().unwrap(), MethodSpec::Track);
        assert!("knn0".parse::<MethodSpec>().is_err());
        assert!("svm".parse::<MethodSpec>().is_err());
        for m in [MethodSpec::Nnf3, MethodSpec::Knn(4), MethodSpec::Rbf, MethodSpec::Track] {
            assert_eq!(m.to_string().parse::<MethodSpec>().unwrap(), m);
        }
    }
}
