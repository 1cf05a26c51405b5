//! Evaluation harness: seeded experiment runs, reference-point sweeps,
//! method comparison tables and segmentation studies.

mod config;
mod csv_io;
mod experiment;
mod report;
mod segstudy;

pub use config::{ExperimentConfig, MethodSpec, SegmentationMode};
pub use csv_io::{read_metrics_csv, write_metrics_csv, write_ranges_csv, write_segstudy_csv};
pub use experiment::{apply_segmentation, run_experiment, sweep_reference_points, MetricsRow, Outcome, SegmentationSummary};
pub use report::{compare_methods, format_band};
pub use segstudy::{segmentation_study, RangeRow, SegStudy, SegStudyRow};
